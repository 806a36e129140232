//! Closed forms for T_n(k, s, d), the Ramanujan sum restricted to a ≡ s (mod d).

use crate::arith;
use crate::scalar::{PowerSum, Scalar};

use super::{
    character_exponent, check_modulus, delta_prime, require_deep_valuation, require_divides,
    EvalOptions, Mutation, SumError,
};

/// c_n(k) = Σ_{δ|(n,k)} δ μ(n/δ).
///
/// Panics if `n == 0`.
pub fn ramanujan_formula(n: u64, k: i64) -> i64 {
    assert!(n > 0, "modulus must be positive");
    let g = arith::gcd_mod(n, k);
    arith::divisors(g)
        .expect("g > 0")
        .into_iter()
        .map(|delta| delta as i64 * arith::moebius(n / delta).expect("n / delta > 0"))
        .sum()
}

/// S(n, k) = ζ_n^k Σ_{ℓ|(n,k)} ℓ φ(n/ℓ), the gcd-weighted character sum
/// Σ_{a=1}^{n} (a − 1, n) ζ_n^{ak}.
pub fn gcd_dft<T: Scalar>(n: u64, k: i64) -> Result<T::Value, SumError> {
    check_modulus(n)?;
    let k = arith::residue(k, n);
    let c: u64 = arith::divisors(arith::gcd(n, k))
        .expect("gcd > 0")
        .into_iter()
        .map(|l| l * arith::euler_phi(n / l).expect("n / l > 0"))
        .sum();
    let mut sum = PowerSum::<T>::new(n);
    sum.add_term(k, T::from_u64(c));
    Ok(sum.finish())
}

fn check_divisor(n: u64, d: u64) -> Result<(), SumError> {
    check_modulus(n)?;
    if d == 0 || n % d != 0 {
        return Err(SumError::DNotDividing { n, d });
    }
    Ok(())
}

/// Σ_{δ|n, (δ,d)=1, (n/(dδ)) | k} (μ(δ)/δ) ζ_n^{δδ′k}, without the n/d factor.
pub(crate) fn inner_delta_sum<T: Scalar>(n: u64, k: u64, s: u64, d: u64, opts: EvalOptions) -> PowerSum<T> {
    let mut sum = PowerSum::<T>::new(n);
    for delta in arith::divisors(n).expect("n > 0") {
        if arith::gcd(delta, d) != 1 {
            continue;
        }
        let q = n / (d * delta);
        if k % q != 0 {
            continue;
        }
        let mut mu = arith::moebius(delta).expect("delta > 0");
        if mu == 0 {
            continue;
        }
        if opts.is(Mutation::MobiusSign) {
            mu = mu.abs();
        }
        let dp = delta_prime(delta, d, s, opts);
        let w = T::from_i64(mu) / T::from_u64(delta);
        sum.add_term(character_exponent(delta, dp, k, n), w);
    }
    sum
}

pub(crate) fn t_lemma1_with<T: Scalar>(
    n: u64,
    k: i64,
    s: i64,
    d: u64,
    opts: EvalOptions,
) -> Result<T::Value, SumError> {
    check_divisor(n, d)?;
    let (k, s) = (arith::residue(k, n), arith::residue(s, n));
    if arith::gcd(s, d) != 1 {
        return Ok(PowerSum::<T>::new(n).finish());
    }
    let sum = inner_delta_sum::<T>(n, k, s, d, opts).scaled(&T::from_u64(n / d));
    Ok(sum.finish())
}

/// T_n(k, s, d) by the Möbius-inverted formula: zero unless (s, d) = 1,
/// otherwise (n/d) Σ_{δ|n, (δ,d)=1, (n/(dδ))|k} (μ(δ)/δ) ζ_n^{δδ′k}
/// with δδ′ ≡ s (mod d).
pub fn t_lemma1<T: Scalar>(n: u64, k: i64, s: i64, d: u64) -> Result<T::Value, SumError> {
    t_lemma1_with::<T>(n, k, s, d, EvalOptions::default())
}

/// [`t_lemma1`] with δ′ replaced by δ′ + shift·d.
pub fn t_lemma1_shifted<T: Scalar>(n: u64, k: i64, s: i64, d: u64, shift: u64) -> Result<T::Value, SumError> {
    t_lemma1_with::<T>(n, k, s, d, EvalOptions { mutation: None, delta_shift: shift })
}

/// T_n(k, s, d) when ν_p(n) ≥ ν_p(k) + 2 for every p | n: the δ-sum
/// collapses to δ = 1.
pub fn t_lemma2<T: Scalar>(n: u64, k: i64, s: i64, d: u64) -> Result<T::Value, SumError> {
    check_divisor(n, d)?;
    require_deep_valuation(n, k)?;
    let (k, s) = (arith::residue(k, n), arith::residue(s, n));
    let mut sum = PowerSum::<T>::new(n);
    if k % (n / d) == 0 && arith::gcd(s, d) == 1 {
        sum.add_term(arith::mul_mod(k, s, n), T::from_u64(n / d));
    }
    Ok(sum.finish())
}

/// T_n(k, s, d) = φ(n)/φ(d) or 0 when n | k.
pub fn t_lemma3<T: Scalar>(n: u64, k: i64, s: i64, d: u64) -> Result<T, SumError> {
    check_divisor(n, d)?;
    require_divides(n, k)?;
    if arith::gcd_mod(d, s) != 1 {
        return Ok(T::zero());
    }
    let phi = |x| T::from_u64(arith::euler_phi(x).expect("x > 0"));
    Ok(phi(n) / phi(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::CycElem;
    use crate::scalar::Exact;
    use crate::sums::oracle::t_bruteforce;

    fn int(v: i64) -> Exact {
        Exact::from_integer(v.into())
    }

    #[test]
    fn ramanujan_formula_examples() {
        assert_eq!(ramanujan_formula(6, 2), -1);
        for p in [2u64, 3, 5, 7, 11, 13] {
            for k in 1..p as i64 {
                assert_eq!(ramanujan_formula(p, k), -1);
            }
        }
        for n in 1..=60u64 {
            let phi = arith::euler_phi(n).unwrap() as i64;
            assert_eq!(ramanujan_formula(n, 0), phi);
            assert_eq!(ramanujan_formula(n, 3 * n as i64), phi);
            for k in 0..n as i64 {
                let brute = crate::sums::ramanujan_bruteforce(n, k);
                assert_eq!(brute.as_rational(), Some(int(ramanujan_formula(n, k))));
            }
        }
    }

    #[test]
    fn gcd_dft_examples() {
        assert_eq!(gcd_dft::<Exact>(4, 0).unwrap().as_rational(), Some(int(8)));
        assert_eq!(gcd_dft::<Exact>(4, 1).unwrap(), CycElem::root_of_unity(4, 1).unwrap().scale(&int(2)));
        assert_eq!(gcd_dft::<Exact>(6, 3).unwrap().as_rational(), Some(int(-5)));
        for n in 1..=60u64 {
            for k in -2..=n as i64 {
                let brute = crate::sums::gcd_dft_bruteforce::<Exact>(n, k).unwrap();
                assert_eq!(gcd_dft::<Exact>(n, k).unwrap(), brute, "S({n},{k})");
            }
        }
    }

    #[test]
    fn lemma1_examples() {
        assert!(t_lemma1::<Exact>(6, 1, 2, 2).unwrap().is_zero());
        let two_i = CycElem::root_of_unity(4, 1).unwrap().scale(&int(2)).to_complex();
        assert!((t_lemma1::<Exact>(8, 2, 1, 4).unwrap().to_complex() - two_i).norm() < 1e-12);
        assert_eq!(t_lemma1::<Exact>(8, 2, 1, 4).unwrap(), t_bruteforce::<Exact>(8, 2, 1, 4).unwrap());
        for n in 1..=50u64 {
            for k in 0..n as i64 {
                let c = t_lemma1::<Exact>(n, k, 0, 1).unwrap();
                assert_eq!(c.as_rational(), Some(int(ramanujan_formula(n, k))), "c_{n}({k})");
            }
        }
        assert_eq!(t_lemma1::<Exact>(10, 1, 1, 3), Err(SumError::DNotDividing { n: 10, d: 3 }));
    }

    #[test]
    fn lemma2_examples() {
        let two_i = CycElem::root_of_unity(8, 2).unwrap().scale(&int(2));
        assert_eq!(t_lemma2::<Exact>(8, 2, 1, 4).unwrap(), two_i);
        assert!(t_lemma2::<Exact>(8, 2, 1, 2).unwrap().is_zero());
        // k = 0 has infinite valuation, so the hypothesis fails
        assert!(matches!(t_lemma2::<Exact>(9, 0, 2, 3), Err(SumError::HypothesisViolation(_))));
        assert!(matches!(t_lemma2::<Exact>(9, 3, 2, 3), Err(SumError::HypothesisViolation(_))));
        assert_eq!(t_lemma2::<Exact>(9, 1, 2, 9).unwrap(), t_bruteforce::<Exact>(9, 1, 2, 9).unwrap());
    }

    #[test]
    fn lemma3_examples() {
        assert_eq!(t_lemma3::<Exact>(6, 0, 1, 2).unwrap(), int(2));
        assert_eq!(t_lemma3::<Exact>(12, 12, 5, 4).unwrap(), int(2));
        assert_eq!(t_lemma3::<Exact>(12, 0, 2, 4).unwrap(), int(0));
        assert_eq!(t_lemma3::<Exact>(9, 0, 2, 3).unwrap(), int(3));
        assert!(matches!(t_lemma3::<Exact>(12, 3, 1, 4), Err(SumError::HypothesisViolation(_))));
    }

    #[test]
    fn delta_prime_shift_is_invisible() {
        for n in 1..=30u64 {
            for d in arith::divisors(n).unwrap() {
                for k in 0..n as i64 {
                    let base = t_lemma1::<Exact>(n, k, 1, d).unwrap();
                    for t in 1..=3 {
                        assert_eq!(t_lemma1_shifted::<Exact>(n, k, 1, d, t).unwrap(), base);
                    }
                }
            }
        }
    }
}
