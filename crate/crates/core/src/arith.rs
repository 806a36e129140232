//! Elementary multiplicative number theory: factorization, divisors, the
//! classical arithmetic functions and modular inverses.
//!
//! Moduli are `u64`; residues such as `k`, `s` and `a` are `i64`. Exact
//! results for integer exponents are returned as [`BigRational`].

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("ZERO_ARGUMENT: {0} requires a positive integer")]
    ZeroArgument(&'static str),
    #[error("NOT_PRIME: {0} is not prime")]
    NotPrime(u64),
    #[error("NON_INVERTIBLE: {a} has no inverse modulo {m}")]
    NonInvertible { a: i64, m: u64 },
}

/// Prime-power factorization of a positive integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    value: u64,
    parts: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn value(&self) -> u64 {
        self.value
    }

    /// `(p, ν_p)` pairs with strictly increasing primes.
    pub fn parts(&self) -> &[(u64, u32)] {
        &self.parts
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.parts.iter().map(|&(p, _)| p)
    }

    /// Exponent of `p` in the factorization, zero when `p` does not divide.
    pub fn exponent(&self, p: u64) -> u32 {
        self.parts
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    pub fn is_squarefree(&self) -> bool {
        self.parts.iter().all(|&(_, e)| e == 1)
    }

    pub fn divisor_count(&self) -> u64 {
        self.parts.iter().map(|&(_, e)| u64::from(e) + 1).product()
    }

    /// All divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.parts {
            let len = out.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(p, e) in &self.parts {
            if !first {
                write!(f, " * ")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

const SIEVE_LIMIT: usize = 1 << 16;

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut composite = vec![false; SIEVE_LIMIT + 1];
        let mut primes = Vec::new();
        for i in 2..=SIEVE_LIMIT {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= SIEVE_LIMIT {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

pub fn factorize(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument("factorize"));
    }
    let mut rest = n;
    let mut parts = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            parts.push((p, e));
        }
    };
    for &p in small_primes() {
        if p * p > rest {
            break;
        }
        push(p, &mut rest);
    }
    // Past the sieve, continue with odd trial divisors.
    let mut p = SIEVE_LIMIT as u64 + 1;
    while rest > 1 && (p as u128) * (p as u128) <= rest as u128 {
        push(p, &mut rest);
        p += 2;
    }
    if rest > 1 {
        parts.push((rest, 1));
    }
    Ok(Factorization { value: n, parts })
}

pub fn is_prime(p: u64) -> bool {
    p >= 2 && factorize(p).map(|f| f.parts == [(p, 1)]).unwrap_or(false)
}

/// A p-adic valuation, with `Infinite` standing for ν_p(0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

pub fn valuation_of(n: u64, p: u64) -> Result<Valuation, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    Ok(valuation_unchecked(n, p))
}

/// ν_p(n) without the primality check on `p`.
pub(crate) fn valuation_unchecked(mut n: u64, p: u64) -> Valuation {
    if n == 0 {
        return Valuation::Infinite;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    Valuation::Finite(v)
}

/// ν_p of an integer residue; sign is irrelevant.
pub(crate) fn valuation_i64(k: i64, p: u64) -> Valuation {
    valuation_unchecked(k.unsigned_abs(), p)
}

pub fn divisors(n: u64) -> Result<Vec<u64>, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument("divisors"));
    }
    Ok(factorize(n)?.divisors())
}

pub fn moebius(n: u64) -> Result<i64, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument("moebius"));
    }
    Ok(moebius_of(&factorize(n)?))
}

pub(crate) fn moebius_of(f: &Factorization) -> i64 {
    if !f.is_squarefree() {
        0
    } else if f.parts.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> Result<u64, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument("euler_phi"));
    }
    Ok(phi_of(&factorize(n)?))
}

pub(crate) fn phi_of(f: &Factorization) -> u64 {
    f.parts
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product()
}

/// `base^m` as an exact rational; negative `m` gives a reciprocal.
pub fn rational_pow(base: u64, m: i64) -> BigRational {
    let b = BigInt::from(base);
    let mag = num_traits::pow::pow(b, m.unsigned_abs() as usize);
    if m >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// Jordan's totient J_m(n) = n^m ∏_{p|n} (1 − p^{−m}), exact for integer `m`.
///
/// `m = 0` yields `[n = 1]`.
pub fn jordan(m: i64, n: u64) -> Result<BigRational, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument("jordan"));
    }
    let f = factorize(n)?;
    Ok(f.parts
        .iter()
        .map(|&(p, e)| rational_pow(p, m * i64::from(e)) - rational_pow(p, m * (i64::from(e) - 1)))
        .fold(BigRational::one(), |acc, x| acc * x))
}

/// Floating-point J_m(n) for real `m`.
pub fn jordan_real(m: f64, n: u64) -> Result<f64, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument("jordan"));
    }
    let f = factorize(n)?;
    Ok(f.parts
        .iter()
        .map(|&(p, e)| (p as f64).powf(m * f64::from(e)) - (p as f64).powf(m * (f64::from(e) - 1.0)))
        .product())
}

/// σ_m(n) = Σ_{d|n} d^m, exact for integer `m`.
pub fn sigma(m: i64, n: u64) -> Result<BigRational, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument("sigma"));
    }
    Ok(divisors(n)?
        .into_iter()
        .map(|d| rational_pow(d, m))
        .fold(BigRational::zero(), |acc, x| acc + x))
}

pub fn sigma_real(m: f64, n: u64) -> Result<f64, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument("sigma"));
    }
    Ok(divisors(n)?.into_iter().map(|d| (d as f64).powf(m)).sum())
}

/// Number of divisors τ(n).
pub fn tau(n: u64) -> Result<u64, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroArgument("tau"));
    }
    Ok(factorize(n)?.divisor_count())
}

/// gcd with the convention (d, 0) = d.
pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// gcd of a modulus with an integer residue.
pub fn gcd_mod(n: u64, a: i64) -> u64 {
    n.gcd(&a.unsigned_abs())
}

/// Representative of `a` in `[0, n)`.
pub fn residue(a: i64, n: u64) -> u64 {
    debug_assert!(n > 0);
    (a as i128).rem_euclid(n as i128) as u64
}

/// Inverse of `a` modulo `m`, in `[0, m)`. `m = 1` returns 0.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64, ArithError> {
    if m == 0 {
        return Err(ArithError::ZeroArgument("mod_inverse"));
    }
    if m == 1 {
        return Ok(0);
    }
    let a_red = residue(a, m) as i128;
    let e = a_red.extended_gcd(&(m as i128));
    if !e.gcd.is_one() {
        return Err(ArithError::NonInvertible { a, m });
    }
    Ok(e.x.rem_euclid(m as i128) as u64)
}

/// `(a * b) mod n` without overflow.
pub(crate) fn mul_mod(a: u64, b: u64, n: u64) -> u64 {
    ((a as u128 * b as u128) % n as u128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn trial_division(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while n > 1 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        out
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().parts().is_empty());
        assert_eq!(factorize(12).unwrap().parts(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(360).unwrap().parts(), trial_division(360).as_slice());
        assert_eq!(factorize(360).unwrap().parts(), &[(2, 3), (3, 2), (5, 1)]);
        assert!(factorize(0).is_err());
        for n in 1..3000u64 {
            assert_eq!(factorize(n).unwrap().parts(), trial_division(n).as_slice(), "n = {n}");
        }
    }

    #[test]
    fn factorize_beyond_sieve() {
        let big = 4_294_967_291u64 * 3; // largest 32-bit prime times 3
        assert_eq!(factorize(big).unwrap().parts(), &[(3, 1), (4_294_967_291, 1)]);
        let sq = 65_537u64 * 65_537;
        assert_eq!(factorize(sq).unwrap().parts(), &[(65_537, 2)]);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(valuation_of(12, 2).unwrap(), Valuation::Finite(2));
        assert_eq!(valuation_of(0, 7).unwrap(), Valuation::Infinite);
        assert_eq!(valuation_of(9, 2).unwrap(), Valuation::Finite(0));
        assert_eq!(valuation_of(9, 4), Err(ArithError::NotPrime(4)));
        assert!(Valuation::Finite(u32::MAX) < Valuation::Infinite);
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(1).unwrap(), vec![1]);
        assert_eq!(divisors(12).unwrap(), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(36).unwrap().len(), 9);
        assert!(divisors(0).is_err());
    }

    #[test]
    fn moebius_and_phi_examples() {
        assert_eq!(moebius(1).unwrap(), 1);
        assert_eq!(moebius(12).unwrap(), 0);
        assert_eq!(moebius(30).unwrap(), -1);
        assert!(moebius(0).is_err());
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(12).unwrap(), 4);
        let direct = (1..=36u64).filter(|a| gcd(*a, 36) == 1).count() as u64;
        assert_eq!(euler_phi(36).unwrap(), direct);
        assert_eq!(direct, 12);
    }

    #[test]
    fn jordan_examples() {
        assert_eq!(jordan(1, 12).unwrap(), q(4, 1));
        assert_eq!(jordan(2, 6).unwrap(), q(24, 1));
        assert_eq!(jordan(2, 1).unwrap(), q(1, 1));
        assert_eq!(jordan(0, 1).unwrap(), q(1, 1));
        assert_eq!(jordan(0, 6).unwrap(), q(0, 1));
        assert!((jordan_real(2.0, 6).unwrap() - 24.0).abs() < 1e-12);
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(0, 12).unwrap(), q(6, 1));
        assert_eq!(sigma(1, 6).unwrap(), q(12, 1));
        assert_eq!(sigma(-1, 4).unwrap(), q(7, 4));
        assert!((sigma_real(-1.0, 4).unwrap() - 1.75).abs() < 1e-15);
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(3, 4).unwrap(), 3);
        assert_eq!(mod_inverse(4, 3).unwrap(), 1);
        assert_eq!(mod_inverse(5, 12).unwrap(), 5);
        assert_eq!(mod_inverse(-1, 7).unwrap(), 6);
        assert_eq!(mod_inverse(9, 1).unwrap(), 0);
        assert_eq!(mod_inverse(6, 4), Err(ArithError::NonInvertible { a: 6, m: 4 }));
    }

    #[test]
    fn multiplicativity_on_coprime_pairs() {
        for a in 1..=300u64 {
            for b in 1..=(300 / a) {
                if gcd(a, b) != 1 {
                    continue;
                }
                assert_eq!(euler_phi(a * b).unwrap(), euler_phi(a).unwrap() * euler_phi(b).unwrap());
                assert_eq!(moebius(a * b).unwrap(), moebius(a).unwrap() * moebius(b).unwrap());
                for m in [0i64, 1, 2, -1] {
                    assert_eq!(jordan(m, a * b).unwrap(), jordan(m, a).unwrap() * jordan(m, b).unwrap());
                    assert_eq!(sigma(m, a * b).unwrap(), sigma(m, a).unwrap() * sigma(m, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn moebius_sums_vanish() {
        for n in 1..=1000u64 {
            let s: i64 = divisors(n).unwrap().into_iter().map(|d| moebius(d).unwrap()).sum();
            assert_eq!(s, i64::from(n == 1), "n = {n}");
        }
    }

    #[test]
    fn jordan_is_moebius_transform_of_powers() {
        for n in 1..=1000u64 {
            for m in 0..=3i64 {
                let oracle = divisors(n)
                    .unwrap()
                    .into_iter()
                    .map(|d| rational_pow(d, m) * BigRational::from_integer(moebius(n / d).unwrap().into()))
                    .fold(BigRational::zero(), |acc, x| acc + x);
                assert_eq!(jordan(m, n).unwrap(), oracle, "J_{m}({n})");
            }
        }
    }

    #[test]
    fn divisor_count_matches_sigma_zero() {
        for n in 1..=1000u64 {
            let len = divisors(n).unwrap().len() as i64;
            assert_eq!(sigma(0, n).unwrap(), q(len, 1));
            assert_eq!(tau(n).unwrap() as i64, len);
        }
    }
}
