//! Coprime splittings n = n1·n2 and the multiplicative evaluation of
//! S_f(n, k, s) for families multiplicative in n.

use serde::{Deserialize, Serialize};

use crate::arith::{self, Valuation};
use crate::evenfn::FunctionSpec;
use crate::scalar::{PowerSum, Scalar};

use super::oracle::s_bruteforce_sum;
use super::{check_modulus, valuation_profile, SumError};

/// n = n1·n2 with (n1, n2) = 1, together with the inverses n1′ ≡ n1^{-1}
/// (mod n2) and n2′ ≡ n2^{-1} (mod n1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Splitting {
    pub n: u64,
    pub k: i64,
    /// Part of n on primes with ν_p(n) ≥ ν_p(k) + 2.
    pub n1: u64,
    /// Part of n on primes with ν_p(n) ≤ ν_p(k).
    pub n2: u64,
    pub n1_inv: u64,
    pub n2_inv: u64,
}

impl Splitting {
    fn coprime(n1: u64, n2: u64, k: i64) -> Result<Self, SumError> {
        if n1 == 0 || n2 == 0 {
            return Err(SumError::ZeroModulus);
        }
        if arith::gcd(n1, n2) != 1 {
            return Err(SumError::CoprimalityViolation { n1, n2 });
        }
        let n = n1 * n2;
        Ok(Splitting {
            n,
            k: arith::residue(k, n) as i64,
            n1,
            n2,
            n1_inv: arith::mod_inverse(n1 as i64, n2).expect("coprime"),
            n2_inv: arith::mod_inverse(n2 as i64, n1).expect("coprime"),
        })
    }
}

/// Splits n by comparing ν_p(n) with ν_p(k): primes with a gap of at least
/// two go to n1, primes with ν_p(n) ≤ ν_p(k) to n2. Any prime with a gap of
/// exactly one makes the splitting undefined.
pub fn split_by_valuation(n: u64, k: i64) -> Result<Splitting, SumError> {
    check_modulus(n)?;
    let mut n1 = 1u64;
    let mut offending = Vec::new();
    for (p, vn, vk) in valuation_profile(n, k) {
        match vk {
            Valuation::Finite(vk) if vn >= vk + 2 => n1 *= p.pow(vn),
            Valuation::Finite(vk) if vn == vk + 1 => offending.push(p),
            _ => {}
        }
    }
    if !offending.is_empty() {
        return Err(SumError::SplitUndefined { n, k, primes: offending });
    }
    Splitting::coprime(n1, n / n1, k)
}

/// S_f(n1, k·n2′, s) · S_f(n2, k·n1′, s), each factor summed by brute force
/// and written at modulus n = n1·n2 through ζ_{n1} = ζ_n^{n2}, ζ_{n2} = ζ_n^{n1}.
pub fn s_split<T: Scalar>(
    spec: &FunctionSpec,
    n1: u64,
    n2: u64,
    k: i64,
    s: i64,
) -> Result<T::Value, SumError> {
    if !spec.is_multiplicative() {
        return Err(SumError::NotMultiplicative(spec.clone()));
    }
    let sp = Splitting::coprime(n1, n2, k)?;
    let n = sp.n;
    let k = arith::residue(k, n);
    let s = arith::residue(s, n);
    let f1 = spec.build::<T>(n1)?;
    let f2 = spec.build::<T>(n2)?;
    let k1 = arith::mul_mod(k, sp.n2_inv, n1.max(1));
    let k2 = arith::mul_mod(k, sp.n1_inv, n2.max(1));
    let left: PowerSum<T> = s_bruteforce_sum(&f1, k1, s % n1, n);
    let right: PowerSum<T> = s_bruteforce_sum(&f2, k2, s % n2, n);
    Ok(left.mul(&right).finish())
}

/// ζ_n^{ks} φ(n2) · Σ_{d|(n1,k), (n1/d,s)=1} d (μ*f_{n1})(n1/d)
///               · Σ_{d|n2, (d,s)=1} (μ*f_{n2})(d)/φ(d),
/// defined when no prime has ν_p(n) − ν_p(k) = 1.
pub fn s_theorem5<T: Scalar>(spec: &FunctionSpec, n: u64, k: i64, s: i64) -> Result<T::Value, SumError> {
    if !spec.is_multiplicative() {
        return Err(SumError::NotMultiplicative(spec.clone()));
    }
    let sp = split_by_valuation(n, k)?;
    let (k, s) = (arith::residue(k, n), arith::residue(s, n));
    let g1 = spec.build::<T>(sp.n1)?.mobius_transform();
    let g2 = spec.build::<T>(sp.n2)?.mobius_transform();
    let phi = |x| T::from_u64(arith::euler_phi(x).expect("x > 0"));

    let mut first = T::zero();
    for d in arith::divisors(arith::gcd(sp.n1, k)).expect("gcd > 0") {
        if arith::gcd(sp.n1 / d, s) == 1 {
            first += T::from_u64(d) * g1[&(sp.n1 / d)].clone();
        }
    }
    let mut second = T::zero();
    for (d, gd) in g2 {
        if arith::gcd(d, s) == 1 {
            second += gd / phi(d);
        }
    }
    let mut sum = PowerSum::<T>::new(n);
    sum.add_term(arith::mul_mod(k, s, n), phi(sp.n2) * first * second);
    Ok(sum.finish())
}
