//! Closed forms for S_f(n, k, s) valid for all k, for deep valuations of n
//! relative to k, and for n | k.

use std::collections::BTreeMap;

use crate::arith;
use crate::evenfn::EvenFunction;
use crate::scalar::{PowerSum, Scalar};

use super::lemma::inner_delta_sum;
use super::{
    character_exponent, delta_prime, require_deep_valuation, require_divides, EvalOptions, Mutation,
    SumError,
};

/// n Σ_{d|n, (d,s)=1} ((μ*f)(d)/d) Σ_{δ|n, (δ,d)=1, (n/(dδ))|k} (μ(δ)/δ) ζ_n^{δδ′k}
fn theorem1_outer_form<T: Scalar>(
    g: &BTreeMap<u64, T>,
    n: u64,
    k: u64,
    s: u64,
    opts: EvalOptions,
) -> PowerSum<T> {
    let mut total = PowerSum::<T>::new(n);
    for (&d, gd) in g {
        if opts.is(Mutation::ShortDivisorRange) && d == n {
            break;
        }
        if gd.is_zero() || arith::gcd(d, s) != 1 {
            continue;
        }
        let coeff = T::from_u64(n) * gd.clone() / T::from_u64(d);
        total.add_scaled(&inner_delta_sum::<T>(n, k, s, d, opts), &coeff);
    }
    total
}

/// Σ_{e|(n,k)} e Σ_{dδ=n/e, (d,δs)=1} (μ*f)(d) μ(δ) ζ_n^{δδ′k}
fn theorem1_triple_form<T: Scalar>(
    g: &BTreeMap<u64, T>,
    n: u64,
    k: u64,
    s: u64,
    opts: EvalOptions,
) -> PowerSum<T> {
    let mut total = PowerSum::<T>::new(n);
    for e in arith::divisors(arith::gcd(n, k)).expect("gcd > 0") {
        let m = n / e;
        for d in arith::divisors(m).expect("m > 0") {
            let delta = m / d;
            if arith::gcd(d, delta) != 1 || arith::gcd(d, s) != 1 {
                continue;
            }
            let mut mu = arith::moebius(delta).expect("delta > 0");
            if opts.is(Mutation::MobiusSign) {
                mu = mu.abs();
            }
            let gd = &g[&d];
            if mu == 0 || gd.is_zero() {
                continue;
            }
            let dp = delta_prime(delta, d, s, opts);
            let w = T::from_u64(e) * gd.clone() * T::from_i64(mu);
            total.add_term(character_exponent(delta, dp, k, n), w);
        }
    }
    total
}

pub(crate) fn s_theorem1_forms_with<T: Scalar>(
    f: &EvenFunction<T>,
    k: i64,
    s: i64,
    opts: EvalOptions,
) -> (T::Value, T::Value) {
    let n = f.modulus();
    let (k, s) = (arith::residue(k, n), arith::residue(s, n));
    let g = f.mobius_transform();
    (
        theorem1_outer_form(&g, n, k, s, opts).finish(),
        theorem1_triple_form(&g, n, k, s, opts).finish(),
    )
}

pub(crate) fn s_theorem1_with<T: Scalar>(
    f: &EvenFunction<T>,
    k: i64,
    s: i64,
    opts: EvalOptions,
) -> Result<T::Value, SumError> {
    let (outer, triple) = s_theorem1_forms_with(f, k, s, opts);
    if !T::agree(&outer, &triple, f.modulus()) {
        return Err(SumError::FormMismatch {
            what: "divisor-pair form vs triple-divisor form",
            left: T::render(&outer),
            right: T::render(&triple),
        });
    }
    Ok(outer)
}

/// Both printed forms of the general evaluation of S_f(n, k, s), in order
/// (double divisor sum, triple divisor sum).
pub fn s_theorem1_forms<T: Scalar>(f: &EvenFunction<T>, k: i64, s: i64) -> (T::Value, T::Value) {
    s_theorem1_forms_with(f, k, s, EvalOptions::default())
}

/// S_f(n, k, s) for arbitrary k; evaluates both forms and fails with
/// `FORM_MISMATCH` if they disagree.
pub fn s_theorem1<T: Scalar>(f: &EvenFunction<T>, k: i64, s: i64) -> Result<T::Value, SumError> {
    s_theorem1_with(f, k, s, EvalOptions::default())
}

/// [`s_theorem1`] with every δ′ replaced by δ′ + shift·d.
pub fn s_theorem1_shifted<T: Scalar>(
    f: &EvenFunction<T>,
    k: i64,
    s: i64,
    shift: u64,
) -> Result<T::Value, SumError> {
    s_theorem1_with(f, k, s, EvalOptions { mutation: None, delta_shift: shift })
}

pub(crate) fn s_theorem2_with<T: Scalar>(
    f: &EvenFunction<T>,
    k: i64,
    s: i64,
    opts: EvalOptions,
) -> Result<T::Value, SumError> {
    let n = f.modulus();
    require_deep_valuation(n, k)?;
    let (k, s) = (arith::residue(k, n), arith::residue(s, n));
    let g = f.mobius_transform();
    let mut acc = T::zero();
    for d in arith::divisors(arith::gcd(n, k)).expect("gcd > 0") {
        if arith::gcd(n / d, s) != 1 {
            continue;
        }
        let gd = if opts.is(Mutation::SwappedQuotient) { &g[&d] } else { &g[&(n / d)] };
        acc += T::from_u64(d) * gd.clone();
    }
    let mut sum = PowerSum::<T>::new(n);
    sum.add_term(arith::mul_mod(k, s, n), acc);
    Ok(sum.finish())
}

/// S_f(n, k, s) = ζ_n^{ks} Σ_{d|(n,k), (n/d,s)=1} d (μ*f)(n/d), valid when
/// ν_p(n) ≥ ν_p(k) + 2 for every p | n.
pub fn s_theorem2<T: Scalar>(f: &EvenFunction<T>, k: i64, s: i64) -> Result<T::Value, SumError> {
    s_theorem2_with(f, k, s, EvalOptions::default())
}

pub(crate) fn s_theorem3_with<T: Scalar>(
    f: &EvenFunction<T>,
    k: i64,
    s: i64,
    opts: EvalOptions,
) -> Result<T, SumError> {
    let n = f.modulus();
    require_divides(n, k)?;
    let s = arith::residue(s, n);
    let phi = |x| T::from_u64(arith::euler_phi(x).expect("x > 0"));
    let mut acc = T::zero();
    for (d, gd) in f.mobius_transform() {
        if !opts.is(Mutation::DroppedCoprimality) && arith::gcd(d, s) != 1 {
            continue;
        }
        acc += gd / phi(d);
    }
    Ok(phi(n) * acc)
}

/// S_f(n, k, s) = φ(n) Σ_{d|n, (d,s)=1} (μ*f)(d)/φ(d), valid when n | k.
pub fn s_theorem3<T: Scalar>(f: &EvenFunction<T>, k: i64, s: i64) -> Result<T, SumError> {
    s_theorem3_with(f, k, s, EvalOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::CycElem;
    use crate::evenfn::{make_gcd_power, make_ramanujan, FunctionSpec};
    use crate::scalar::{Exact, Exponent};
    use crate::sums::oracle::{s_bruteforce, s_decomposition};

    fn int(v: i64) -> Exact {
        Exact::from_integer(v.into())
    }

    fn i_times(n: u64, c: i64) -> CycElem {
        CycElem::root_of_unity(n, n as i64 / 4).unwrap().scale(&int(c))
    }

    fn g(n: u64, m: i64) -> EvenFunction<Exact> {
        make_gcd_power(n, Exponent::Int(m)).unwrap()
    }

    #[test]
    fn theorem1_examples() {
        assert_eq!(s_theorem1(&g(4, 1), 1, 1).unwrap(), i_times(4, 2));
        let c12 = make_ramanujan::<Exact>(12).unwrap();
        assert_eq!(s_theorem1(&c12, 3, 1).unwrap(), i_times(12, 4));
        for n in 1..=12u64 {
            let f = g(n, 1);
            let t3 = s_theorem3(&f, 0, 1).unwrap();
            assert_eq!(s_theorem1(&f, n as i64, 1).unwrap().as_rational(), Some(t3));
        }
    }

    #[test]
    fn theorem1_matches_oracle_small_grid() {
        for n in 1..=16u64 {
            for spec in FunctionSpec::builtins() {
                let f = spec.build::<Exact>(n).unwrap();
                for k in 0..n as i64 {
                    for s in 0..n as i64 {
                        let brute = s_bruteforce(&f, k, s);
                        let (a, b) = s_theorem1_forms(&f, k, s);
                        assert_eq!(a, brute, "{spec} n={n} k={k} s={s}");
                        assert_eq!(b, brute, "{spec} n={n} k={k} s={s}");
                        assert_eq!(s_decomposition(&f, k, s), brute);
                    }
                }
            }
        }
    }

    #[test]
    fn theorem2_examples() {
        assert_eq!(s_theorem2(&g(8, 1), 2, 1).unwrap(), i_times(8, 8));
        assert_eq!(s_theorem2(&g(4, 1), 1, 1).unwrap(), i_times(4, 2));
        assert_eq!(s_theorem2(&g(4, 2), 1, 1).unwrap(), i_times(4, 12));
        assert!(matches!(s_theorem2(&g(9, 1), 3, 1), Err(SumError::HypothesisViolation(_))));
    }

    #[test]
    fn theorem3_examples() {
        assert_eq!(s_theorem3(&g(6, 1), 0, 1).unwrap(), int(8));
        assert_eq!(s_theorem3(&g(6, 1), 0, 0).unwrap(), int(2));
        for spec in FunctionSpec::builtins() {
            let f = spec.build::<Exact>(1).unwrap();
            assert_eq!(s_theorem3(&f, 0, 0).unwrap(), f.eval(1).clone());
        }
        assert!(matches!(s_theorem3(&g(6, 1), 2, 1), Err(SumError::HypothesisViolation(_))));
    }

    #[test]
    fn form_mismatch_is_reported() {
        let opts = EvalOptions::mutated(Some(Mutation::ShortDivisorRange));
        let err = s_theorem1_with(&g(2, 1), 0, 1, opts).unwrap_err();
        assert!(matches!(err, SumError::FormMismatch { .. }));
    }
}
