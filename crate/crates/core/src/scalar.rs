//! Scalar backends shared by the exact and floating evaluators.
//!
//! Every closed form is assembled as a [`PowerSum`], a formal sum
//! Σ w_j ζ_n^j over `j ∈ [0, n)`. The exact backend ([`Exact`]) finishes it
//! into a canonical [`CycElem`]; the float backend ([`Float`]) into a
//! complex double.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::arith::{self, rational_pow};
use crate::cyclo::CycElem;

pub type Exact = BigRational;
pub type Float = f64;

/// Relative scale of the float-mode agreement bound: |a − b| ≤ 1e−9·n.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScalarError {
    #[error("NON_EXACT_EXPONENT: exponent {0} needs float mode")]
    NonExactExponent(Exponent),
    #[error("BAD_EXPONENT: cannot parse {0:?}")]
    BadExponent(String),
}

/// Exponent parameter `m` of the gcd-power and divisor-power families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Int(i64),
    /// Reduced non-integer fraction `p/q` with `q > 1`.
    Frac(i64, i64),
    Real(f64),
}

impl Exponent {
    pub fn as_int(self) -> Option<i64> {
        match self {
            Exponent::Int(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Exponent::Int(m) => m as f64,
            Exponent::Frac(p, q) => p as f64 / q as f64,
            Exponent::Real(x) => x,
        }
    }

    pub fn is_one(self) -> bool {
        match self {
            Exponent::Int(m) => m == 1,
            Exponent::Frac(..) => false,
            Exponent::Real(x) => x == 1.0,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Exponent::Int(_))
    }

    /// `c − m` for an integer `c`.
    pub fn subtract_from(self, c: i64) -> Exponent {
        match self {
            Exponent::Int(m) => Exponent::Int(c - m),
            Exponent::Frac(p, q) => Exponent::Frac(c * q - p, q),
            Exponent::Real(x) => Exponent::Real(c as f64 - x),
        }
    }

    fn frac(p: i64, q: i64) -> Exponent {
        let g = p.gcd(&q);
        let (p, q) = if q < 0 { (-p / g, -q / g) } else { (p / g, q / g) };
        if q == 1 {
            Exponent::Int(p)
        } else {
            Exponent::Frac(p, q)
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Int(m) => write!(f, "{m}"),
            Exponent::Frac(p, q) => write!(f, "{p}/{q}"),
            Exponent::Real(x) => write!(f, "{x:?}"),
        }
    }
}

impl FromStr for Exponent {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ScalarError::BadExponent(s.to_string());
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            return Ok(Exponent::frac(p, q));
        }
        if let Ok(m) = t.parse::<i64>() {
            return Ok(Exponent::Int(m));
        }
        match t.parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Exponent::Real(x)),
            _ => Err(bad()),
        }
    }
}

/// Coefficient type of a formal sum of roots of unity.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + 'static
{
    /// What a finished sum evaluates to.
    type Value: Clone + fmt::Debug + Send + Sync;

    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    fn from_u64(v: u64) -> Self {
        Self::from_i64(i64::try_from(v).expect("value exceeds i64"))
    }

    fn from_rational(q: &BigRational) -> Self;

    /// `base^m`.
    fn power(base: u64, m: Exponent) -> Result<Self, ScalarError>;

    fn finish(sum: PowerSum<Self>) -> Self::Value;

    fn approx(value: &Self::Value) -> Complex64;

    fn approx_scalar(x: &Self) -> f64;

    /// Exact equality, or agreement within `FLOAT_TOLERANCE · n`.
    fn agree(a: &Self::Value, b: &Self::Value, n: u64) -> bool;

    /// Scalar counterpart of [`Scalar::agree`], relative in float mode.
    fn agree_scalar(a: &Self, b: &Self) -> bool;

    fn render(value: &Self::Value) -> String;

    fn render_scalar(x: &Self) -> String;

    fn constant(n: u64, x: Self) -> Self::Value {
        let mut s = PowerSum::new(n);
        s.add_term(0, x);
        Self::finish(s)
    }
}

impl Scalar for BigRational {
    type Value = CycElem;

    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(v.into())
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn power(base: u64, m: Exponent) -> Result<Self, ScalarError> {
        match m {
            Exponent::Int(m) => Ok(rational_pow(base, m)),
            other => Err(ScalarError::NonExactExponent(other)),
        }
    }

    fn finish(sum: PowerSum<Self>) -> CycElem {
        CycElem::from_power_coeffs(sum.modulus, &sum.weights).expect("power sum has positive modulus")
    }

    fn approx(value: &CycElem) -> Complex64 {
        value.to_complex()
    }

    fn approx_scalar(x: &Self) -> f64 {
        x.to_f64().unwrap_or(f64::NAN)
    }

    fn agree(a: &CycElem, b: &CycElem, _n: u64) -> bool {
        a == b
    }

    fn agree_scalar(a: &Self, b: &Self) -> bool {
        a == b
    }

    fn render(value: &CycElem) -> String {
        value.to_string()
    }

    fn render_scalar(x: &Self) -> String {
        x.to_string()
    }
}

impl Scalar for f64 {
    type Value = Complex64;

    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_u64(v: u64) -> Self {
        v as f64
    }

    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }

    fn power(base: u64, m: Exponent) -> Result<Self, ScalarError> {
        Ok(match m {
            Exponent::Int(m) => (base as f64).powi(m as i32),
            other => (base as f64).powf(other.as_f64()),
        })
    }

    fn finish(sum: PowerSum<Self>) -> Complex64 {
        let n = sum.modulus as f64;
        sum.weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != 0.0)
            .map(|(j, &w)| Complex64::from_polar(w, std::f64::consts::TAU * j as f64 / n))
            .sum()
    }

    fn approx(value: &Complex64) -> Complex64 {
        *value
    }

    fn approx_scalar(x: &Self) -> f64 {
        *x
    }

    fn agree(a: &Complex64, b: &Complex64, n: u64) -> bool {
        (a - b).norm() <= FLOAT_TOLERANCE * n as f64
    }

    fn agree_scalar(a: &Self, b: &Self) -> bool {
        (a - b).abs() <= FLOAT_TOLERANCE * a.abs().max(b.abs()).max(1.0)
    }

    fn render(value: &Complex64) -> String {
        let im = short_float(value.im);
        let sign = if im.starts_with('-') { "" } else { "+" };
        format!("{}{sign}{im}i", short_float(value.re))
    }

    fn render_scalar(x: &Self) -> String {
        short_float(*x)
    }
}

/// `x` with at most 12 decimals and trailing zeros removed; magnitudes
/// below 1e−12 print as 0.
pub fn short_float(x: f64) -> String {
    if x.abs() < 1e-12 {
        return "0".to_string();
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// Formal sum Σ_j w_j ζ_n^j with one weight per residue `j ∈ [0, n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSum<T> {
    modulus: u64,
    weights: Vec<T>,
}

impl<T: Scalar> PowerSum<T> {
    pub fn new(n: u64) -> Self {
        assert!(n > 0, "power sum modulus must be positive");
        PowerSum { modulus: n, weights: vec![T::zero(); n as usize] }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Adds `w·ζ_n^e`; `e` is reduced modulo `n`.
    pub fn add_term(&mut self, e: u64, w: T) {
        let idx = (e % self.modulus) as usize;
        self.weights[idx] += w;
    }

    pub fn add_scaled(&mut self, other: &PowerSum<T>, c: &T) {
        assert_eq!(self.modulus, other.modulus, "power sum modulus mismatch");
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            if !b.is_zero() {
                *a += c.clone() * b.clone();
            }
        }
    }

    pub fn scaled(mut self, c: &T) -> Self {
        for w in &mut self.weights {
            if !w.is_zero() {
                *w = c.clone() * w.clone();
            }
        }
        self
    }

    /// Product in the group ring of ℤ/n.
    pub fn mul(&self, other: &PowerSum<T>) -> PowerSum<T> {
        assert_eq!(self.modulus, other.modulus, "power sum modulus mismatch");
        let n = self.modulus as usize;
        let mut out = PowerSum::new(self.modulus);
        for (i, a) in self.weights.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.weights.iter().enumerate() {
                if !b.is_zero() {
                    out.weights[(i + j) % n] += a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn finish(self) -> T::Value {
        T::finish(self)
    }
}

/// J_m(n) in the backend `T`; `m = 0` gives `[n = 1]`.
pub fn jordan_in<T: Scalar>(m: Exponent, n: u64) -> Result<T, ScalarError> {
    let f = arith::factorize(n).expect("n > 0");
    let mut acc = T::one();
    for &(p, e) in f.parts() {
        let e = i64::from(e);
        let hi = T::power(p, scale_exponent(m, e))?;
        let lo = T::power(p, scale_exponent(m, e - 1))?;
        acc = acc * (hi - lo);
    }
    Ok(acc)
}

/// σ_m(n) in the backend `T`.
pub fn sigma_in<T: Scalar>(m: Exponent, n: u64) -> Result<T, ScalarError> {
    let mut acc = T::zero();
    for d in arith::divisors(n).expect("n > 0") {
        acc += T::power(d, m)?;
    }
    Ok(acc)
}

fn scale_exponent(m: Exponent, c: i64) -> Exponent {
    match m {
        Exponent::Int(m) => Exponent::Int(m * c),
        Exponent::Frac(p, q) => Exponent::frac(p * c, q),
        Exponent::Real(x) => Exponent::Real(x * c as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_grammar() {
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::Int(2));
        assert_eq!("-1".parse::<Exponent>().unwrap(), Exponent::Int(-1));
        assert_eq!("1/2".parse::<Exponent>().unwrap(), Exponent::Frac(1, 2));
        assert_eq!("4/2".parse::<Exponent>().unwrap(), Exponent::Int(2));
        assert_eq!("3/-6".parse::<Exponent>().unwrap(), Exponent::Frac(-1, 2));
        assert_eq!("0.5".parse::<Exponent>().unwrap(), Exponent::Real(0.5));
        assert!("1/0".parse::<Exponent>().is_err());
        assert!("x".parse::<Exponent>().is_err());
        for s in ["2", "-3", "1/2", "0.25"] {
            assert_eq!(s.parse::<Exponent>().unwrap().to_string(), s);
        }
        assert_eq!(Exponent::Int(2).subtract_from(1), Exponent::Int(-1));
        assert_eq!(Exponent::Frac(1, 2).subtract_from(1), Exponent::Frac(1, 2));
    }

    #[test]
    fn exact_backend_refuses_fractional_powers() {
        assert!(<Exact as Scalar>::power(4, Exponent::Frac(1, 2)).is_err());
        assert_eq!(<Float as Scalar>::power(4, Exponent::Frac(1, 2)).unwrap(), 2.0);
    }

    #[test]
    fn generic_jordan_matches_arith() {
        for n in 1..=120u64 {
            for m in -2..=3i64 {
                let exact: Exact = jordan_in(Exponent::Int(m), n).unwrap();
                assert_eq!(exact, arith::jordan(m, n).unwrap());
                let float: Float = jordan_in(Exponent::Int(m), n).unwrap();
                assert!((float - exact.to_f64().unwrap()).abs() <= 1e-9 * exact.to_f64().unwrap().abs().max(1.0));
            }
            let half: Float = jordan_in(Exponent::Frac(1, 2), n).unwrap();
            assert!((half - arith::jordan_real(0.5, n).unwrap()).abs() < 1e-9);
            let s: Exact = sigma_in(Exponent::Int(-1), n).unwrap();
            assert_eq!(s, arith::sigma(-1, n).unwrap());
        }
    }

    #[test]
    fn power_sum_product_is_cyclic_convolution() {
        let mut a = PowerSum::<Exact>::new(6);
        a.add_term(5, Exact::from_i64(2));
        let mut b = PowerSum::<Exact>::new(6);
        b.add_term(3, Exact::from_i64(3));
        let p = a.mul(&b);
        assert_eq!(p.weights()[2], Exact::from_i64(6));
        // 6·ζ6^2 in float
        let mut f = PowerSum::<Float>::new(6);
        f.add_term(2, 6.0);
        let exact = p.finish().to_complex();
        assert!((exact - f.finish()).norm() < 1e-12);
    }
}
