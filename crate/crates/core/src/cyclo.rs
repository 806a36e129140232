//! Exact arithmetic in the cyclotomic field ℚ(ζ_n).
//!
//! Elements are stored in the power basis `{1, ζ_n, …, ζ_n^(φ(n)−1)}` after
//! reduction modulo the n-th cyclotomic polynomial, so two elements of the
//! same modulus are equal exactly when their stored coefficients are.

use std::collections::HashMap;
use std::f64::consts::TAU;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CycloError {
    #[error("ZERO_ARGUMENT: cyclotomic modulus must be positive")]
    ZeroModulus,
    #[error("MODULUS_MISMATCH: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("LENGTH_MISMATCH: expected {expected} power coefficients, got {got}")]
    LengthMismatch { expected: usize, got: usize },
}

/// The n-th cyclotomic polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycPoly {
    n: u64,
    coeffs: Vec<i64>,
    // nonzero (index, coeff) pairs below the leading term
    lower: Vec<(usize, i64)>,
}

impl CycPoly {
    fn from_coeffs(n: u64, coeffs: Vec<i64>) -> Self {
        let deg = coeffs.len() - 1;
        let lower = coeffs[..deg]
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| (i, c))
            .collect();
        CycPoly { n, coeffs, lower }
    }

    pub fn index(&self) -> u64 {
        self.n
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

impl fmt::Display for CycPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else { "+" };
            if first {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.unsigned_abs();
            match (i, mag) {
                (0, m) => write!(f, "{m}")?,
                (1, 1) => write!(f, "x")?,
                (1, m) => write!(f, "{m}x")?,
                (e, 1) => write!(f, "x^{e}")?,
                (e, m) => write!(f, "{m}x^{e}")?,
            }
        }
        Ok(())
    }
}

fn poly_cache() -> &'static RwLock<HashMap<u64, Arc<CycPoly>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<CycPoly>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Exact quotient of `num` by the monic polynomial `den`.
fn div_exact_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![0i64; qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn];
        quot[i] = c;
        if c != 0 {
            for (j, &d) in den.iter().enumerate() {
                rem[i + j] = rem[i + j]
                    .checked_sub(c.checked_mul(d).expect("cyclotomic coefficient overflow"))
                    .expect("cyclotomic coefficient overflow");
            }
        }
    }
    assert!(rem.iter().all(|&r| r == 0), "inexact cyclotomic division");
    quot
}

/// Φ_n, computed by dividing x^n − 1 by Φ_d for every proper divisor d of n.
/// Results are cached process-wide.
pub fn cyclotomic_poly(n: u64) -> Result<Arc<CycPoly>, CycloError> {
    if n == 0 {
        return Err(CycloError::ZeroModulus);
    }
    if let Some(p) = poly_cache().read().expect("poly cache poisoned").get(&n) {
        return Ok(Arc::clone(p));
    }
    let poly = if n == 1 {
        CycPoly::from_coeffs(1, vec![-1, 1])
    } else {
        let mut acc = vec![0i64; n as usize + 1];
        acc[0] = -1;
        acc[n as usize] = 1;
        for d in arith::divisors(n).expect("n > 0") {
            if d == n {
                continue;
            }
            let phi_d = cyclotomic_poly(d)?;
            acc = div_exact_monic(&acc, phi_d.coeffs());
        }
        CycPoly::from_coeffs(n, acc)
    };
    let poly = Arc::new(poly);
    poly_cache()
        .write()
        .expect("poly cache poisoned")
        .entry(n)
        .or_insert_with(|| Arc::clone(&poly));
    Ok(poly)
}

/// Reduces `v` (coefficients of powers of x) modulo `phi` in place.
/// Returns `false` on i128 overflow, leaving `v` unspecified.
fn reduce_i128(v: &mut Vec<i128>, phi: &CycPoly) -> bool {
    let deg = phi.degree();
    for j in (deg..v.len()).rev() {
        let c = v[j];
        if c == 0 {
            continue;
        }
        v[j] = 0;
        for &(i, a) in &phi.lower {
            let t = match c.checked_mul(a as i128) {
                Some(t) => t,
                None => return false,
            };
            let slot = &mut v[j - deg + i];
            *slot = match slot.checked_sub(t) {
                Some(x) => x,
                None => return false,
            };
        }
    }
    v.truncate(deg);
    v.resize(deg, 0);
    true
}

fn reduce_big(v: &mut Vec<BigInt>, phi: &CycPoly) {
    let deg = phi.degree();
    for j in (deg..v.len()).rev() {
        if v[j].is_zero() {
            continue;
        }
        let c = std::mem::take(&mut v[j]);
        for &(i, a) in &phi.lower {
            v[j - deg + i] -= &c * a;
        }
    }
    v.truncate(deg);
    v.resize(deg, BigInt::zero());
}

/// An exact element of ℚ(ζ_n).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycElem {
    modulus: u64,
    // canonical: den > 0 and gcd(den, all num) = 1; zero has den = 1
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycElem {
    fn degree_for(n: u64) -> Result<usize, CycloError> {
        Ok(cyclotomic_poly(n)?.degree())
    }

    pub fn zero(n: u64) -> Result<Self, CycloError> {
        let deg = Self::degree_for(n)?;
        Ok(CycElem { modulus: n, num: vec![BigInt::zero(); deg], den: BigInt::one() })
    }

    pub fn one(n: u64) -> Result<Self, CycloError> {
        Self::from_rational(n, &BigRational::one())
    }

    pub fn from_rational(n: u64, q: &BigRational) -> Result<Self, CycloError> {
        let deg = Self::degree_for(n)?;
        let mut num = vec![BigInt::zero(); deg];
        num[0] = q.numer().clone();
        Ok(Self::normalized(n, num, q.denom().clone()))
    }

    /// ζ_n^a, with `a` reduced modulo `n`.
    pub fn root_of_unity(n: u64, a: i64) -> Result<Self, CycloError> {
        if n == 0 {
            return Err(CycloError::ZeroModulus);
        }
        let mut v = vec![0i128; n as usize];
        v[arith::residue(a, n) as usize] = 1;
        Self::from_integer_power_coeffs(n, v)
    }

    /// Canonical form of Σ_j coeffs[j]·ζ_n^j for `j ∈ [0, n)`.
    pub fn from_power_coeffs(n: u64, coeffs: &[BigRational]) -> Result<Self, CycloError> {
        if n == 0 {
            return Err(CycloError::ZeroModulus);
        }
        if coeffs.len() != n as usize {
            return Err(CycloError::LengthMismatch { expected: n as usize, got: coeffs.len() });
        }
        let small: Option<Vec<i128>> = coeffs
            .iter()
            .map(|c| if c.denom().is_one() { c.numer().to_i64().map(i128::from) } else { None })
            .collect();
        if let Some(v) = small {
            return Self::from_integer_power_coeffs(n, v);
        }
        let den = coeffs
            .iter()
            .filter(|c| !c.is_zero())
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Self::from_big_power_coeffs(n, num, den)
    }

    pub(crate) fn from_integer_power_coeffs(n: u64, mut v: Vec<i128>) -> Result<Self, CycloError> {
        let phi = cyclotomic_poly(n)?;
        let backup = v.clone();
        if reduce_i128(&mut v, &phi) {
            let num = v.into_iter().map(BigInt::from).collect();
            return Ok(Self::normalized(n, num, BigInt::one()));
        }
        let num = backup.into_iter().map(BigInt::from).collect();
        Self::from_big_power_coeffs(n, num, BigInt::one())
    }

    fn from_big_power_coeffs(n: u64, mut num: Vec<BigInt>, den: BigInt) -> Result<Self, CycloError> {
        let phi = cyclotomic_poly(n)?;
        reduce_big(&mut num, &phi);
        Ok(Self::normalized(n, num, den))
    }

    fn normalized(modulus: u64, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if num.iter().all(Zero::is_zero) {
            return CycElem { modulus, num, den: BigInt::one() };
        }
        if den.is_negative() {
            den = -den;
            for c in &mut num {
                *c = -std::mem::take(c);
            }
        }
        if !den.is_one() {
            let g = num.iter().fold(den.clone(), |g, c| g.gcd(c));
            if !g.is_one() {
                den /= &g;
                for c in &mut num {
                    *c /= &g;
                }
            }
        }
        CycElem { modulus, num, den }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Dimension of the power basis, φ(n).
    pub fn degree(&self) -> usize {
        self.num.len()
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    /// The element as a rational number, if it lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.num.iter().skip(1).all(Zero::is_zero) {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn check_modulus(&self, other: &Self) -> Result<(), CycloError> {
        if self.modulus != other.modulus {
            return Err(CycloError::ModulusMismatch { left: self.modulus, right: other.modulus });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, CycloError> {
        self.check_modulus(other)?;
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        Ok(Self::normalized(self.modulus, num, &self.den * &other.den))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, CycloError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        CycElem {
            modulus: self.modulus,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, CycloError> {
        self.check_modulus(other)?;
        let deg = self.num.len();
        let mut prod = vec![BigInt::zero(); 2 * deg - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        Self::from_big_power_coeffs(self.modulus, prod, &self.den * &other.den)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * q.numer()).collect();
        Self::normalized(self.modulus, num, &self.den * q.denom())
    }

    pub fn to_complex(&self) -> Complex64 {
        let n = self.modulus as f64;
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        self.num
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| {
                let w = BigRational::new(c.clone(), self.den.clone())
                    .to_f64()
                    .unwrap_or_else(|| c.to_f64().unwrap_or(f64::NAN) / den);
                Complex64::from_polar(w, TAU * j as f64 / n)
            })
            .sum()
    }
}

impl fmt::Display for CycElem {
    /// Rational values print as `p` or `p/q`; others as a sum over the
    /// power basis, e.g. `4*z12^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{q}");
        }
        let mut first = true;
        for (j, c) in self.coeffs().into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            first = false;
            let z = match j {
                0 => None,
                1 => Some(format!("z{}", self.modulus)),
                _ => Some(format!("z{}^{j}", self.modulus)),
            };
            match z {
                None => write!(f, "{mag}")?,
                Some(z) if mag.is_one() => write!(f, "{z}")?,
                Some(z) => write!(f, "{mag}*{z}")?,
            }
        }
        Ok(())
    }
}
