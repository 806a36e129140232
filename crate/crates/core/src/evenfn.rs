//! Even functions (mod n): functions with f((a, n)) = f(a), stored by their
//! values on the divisors of n.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::arith;
use crate::scalar::{jordan_in, sigma_in, Exponent, Scalar, ScalarError};
use crate::sums::ramanujan_formula;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvenFnError {
    #[error("ZERO_ARGUMENT: modulus must be positive")]
    ZeroModulus,
    #[error("COPRIMALITY_VIOLATION: gcd({n1}, {n2}) > 1")]
    CoprimalityViolation { n1: u64, n2: u64 },
    #[error("BAD_FSPEC: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A built-in family n ↦ f_n, written in the compact grammar
/// `gcdpow:m`, `sigmagcd:m`, `ramanujan`, `const:c`.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    /// f_n(a) = (a, n)^m
    GcdPow(Exponent),
    /// f_n(a) = σ_m((a, n))
    SigmaGcd(Exponent),
    /// f_n(a) = c_n(a)
    Ramanujan,
    /// f_n(a) = c for every n
    Const(BigRational),
}

impl FunctionSpec {
    /// The six families used by the default verification grids.
    pub fn builtins() -> Vec<FunctionSpec> {
        vec![
            FunctionSpec::GcdPow(Exponent::Int(0)),
            FunctionSpec::GcdPow(Exponent::Int(1)),
            FunctionSpec::GcdPow(Exponent::Int(2)),
            FunctionSpec::SigmaGcd(Exponent::Int(0)),
            FunctionSpec::SigmaGcd(Exponent::Int(1)),
            FunctionSpec::Ramanujan,
        ]
    }

    pub fn exponent(&self) -> Option<Exponent> {
        match self {
            FunctionSpec::GcdPow(m) | FunctionSpec::SigmaGcd(m) => Some(*m),
            _ => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exponent().map_or(true, Exponent::is_exact)
    }

    /// Whether n ↦ f_n(a) is multiplicative for every fixed a.
    pub fn is_multiplicative(&self) -> bool {
        match self {
            FunctionSpec::Const(c) => c.is_one(),
            _ => true,
        }
    }

    pub fn build<T: Scalar>(&self, n: u64) -> Result<EvenFunction<T>, EvenFnError> {
        match self {
            FunctionSpec::GcdPow(m) => make_gcd_power(n, *m),
            FunctionSpec::SigmaGcd(m) => make_sigma_gcd(n, *m),
            FunctionSpec::Ramanujan => make_ramanujan(n),
            FunctionSpec::Const(c) => make_const(n, c),
        }
    }

    /// (μ * f_n)(d) in closed form, for `d | n`.
    pub fn mobius_closed_form<T: Scalar>(&self, n: u64, d: u64) -> Result<T, EvenFnError> {
        debug_assert!(n % d == 0);
        Ok(match self {
            FunctionSpec::GcdPow(m) => jordan_in(*m, d)?,
            FunctionSpec::SigmaGcd(m) => T::power(d, *m)?,
            FunctionSpec::Ramanujan => {
                T::from_u64(d) * T::from_i64(arith::moebius(n / d).expect("d | n"))
            }
            FunctionSpec::Const(c) if d == 1 => T::from_rational(c),
            FunctionSpec::Const(_) => T::zero(),
        })
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::GcdPow(m) => write!(f, "gcdpow:{m}"),
            FunctionSpec::SigmaGcd(m) => write!(f, "sigmagcd:{m}"),
            FunctionSpec::Ramanujan => write!(f, "ramanujan"),
            FunctionSpec::Const(c) => write!(f, "const:{c}"),
        }
    }
}

impl FromStr for FunctionSpec {
    type Err = EvenFnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| EvenFnError::BadSpec(format!("{s:?}: {why}"));
        let (name, arg) = match s.trim().split_once(':') {
            Some((name, arg)) => (name.trim(), Some(arg.trim())),
            None => (s.trim(), None),
        };
        let exponent = |arg: Option<&str>| -> Result<Exponent, EvenFnError> {
            match arg {
                None => Ok(Exponent::Int(1)),
                Some(a) => a.parse().map_err(|_| bad("exponent must be an integer, p/q or a decimal")),
            }
        };
        match name.to_ascii_lowercase().as_str() {
            "gcdpow" | "gcd" => Ok(FunctionSpec::GcdPow(exponent(arg)?)),
            "sigmagcd" | "sigma" => Ok(FunctionSpec::SigmaGcd(exponent(arg)?)),
            "ramanujan" => match arg {
                None => Ok(FunctionSpec::Ramanujan),
                Some(_) => Err(bad("ramanujan takes no parameter")),
            },
            "const" => {
                let c = match arg {
                    None => BigRational::one(),
                    Some(a) => parse_rational(a).ok_or_else(|| bad("constant must be an integer or p/q"))?,
                };
                Ok(FunctionSpec::Const(c))
            }
            _ => Err(bad("unknown family (expected gcdpow, sigmagcd, ramanujan, const)")),
        }
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

impl Serialize for FunctionSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FunctionSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionLabel {
    Family(FunctionSpec),
    Custom(String),
}

impl fmt::Display for FunctionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionLabel::Family(spec) => spec.fmt(f),
            FunctionLabel::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

/// An even function (mod n), held as its values on the divisors of n.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenFunction<T> {
    modulus: u64,
    divisors: Vec<u64>,
    values: Vec<T>,
    label: FunctionLabel,
}

impl<T: Scalar> EvenFunction<T> {
    pub fn try_from_divisor_values<E>(
        n: u64,
        label: FunctionLabel,
        mut value: impl FnMut(u64) -> Result<T, E>,
    ) -> Result<Self, E>
    where
        E: From<EvenFnError>,
    {
        let divisors = arith::divisors(n).map_err(|_| EvenFnError::ZeroModulus)?;
        let values = divisors.iter().map(|&d| value(d)).collect::<Result<_, _>>()?;
        Ok(EvenFunction { modulus: n, divisors, values, label })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn label(&self) -> &FunctionLabel {
        &self.label
    }

    pub fn divisors(&self) -> &[u64] {
        &self.divisors
    }

    pub fn at_divisor(&self, d: u64) -> Option<&T> {
        self.divisors.binary_search(&d).ok().map(|i| &self.values[i])
    }

    /// f_n(a) = f_n((a, n)), with (0, n) = n.
    pub fn eval(&self, a: i64) -> &T {
        let g = arith::gcd_mod(self.modulus, a);
        self.at_divisor(g).expect("gcd divides the modulus")
    }

    /// g(d) = Σ_{e|d} μ(d/e) f_n(e) for every d | n.
    pub fn mobius_transform(&self) -> BTreeMap<u64, T> {
        self.divisors
            .iter()
            .map(|&d| {
                let mut acc = T::zero();
                for (&e, v) in self.divisors.iter().zip(&self.values) {
                    if e > d {
                        break;
                    }
                    if d % e == 0 {
                        match arith::moebius(d / e).expect("d / e > 0") {
                            1 => acc += v.clone(),
                            -1 => acc = acc - v.clone(),
                            _ => {}
                        }
                    }
                }
                (d, acc)
            })
            .collect()
    }
}

pub fn make_gcd_power<T: Scalar>(n: u64, m: Exponent) -> Result<EvenFunction<T>, EvenFnError> {
    EvenFunction::try_from_divisor_values(n, FunctionLabel::Family(FunctionSpec::GcdPow(m)), |d| {
        Ok(T::power(d, m)?)
    })
}

pub fn make_sigma_gcd<T: Scalar>(n: u64, m: Exponent) -> Result<EvenFunction<T>, EvenFnError> {
    EvenFunction::try_from_divisor_values(n, FunctionLabel::Family(FunctionSpec::SigmaGcd(m)), |d| {
        Ok(sigma_in(m, d)?)
    })
}

pub fn make_ramanujan<T: Scalar>(n: u64) -> Result<EvenFunction<T>, EvenFnError> {
    EvenFunction::try_from_divisor_values(n, FunctionLabel::Family(FunctionSpec::Ramanujan), |d| {
        Ok(T::from_i64(ramanujan_formula(n, d as i64)))
    })
}

pub fn make_const<T: Scalar>(n: u64, c: &BigRational) -> Result<EvenFunction<T>, EvenFnError> {
    EvenFunction::try_from_divisor_values(n, FunctionLabel::Family(FunctionSpec::Const(c.clone())), |_| {
        Ok(T::from_rational(c))
    })
}

/// f_n(a) = F((a, n)) for an arbitrary arithmetic function `F`.
pub fn make_from_fn<T: Scalar>(
    n: u64,
    name: &str,
    f: impl Fn(u64) -> T,
) -> Result<EvenFunction<T>, EvenFnError> {
    EvenFunction::try_from_divisor_values(n, FunctionLabel::Custom(name.to_string()), |d| Ok(f(d)))
}

/// Checks f_{n1 n2}(a) = f_{n1}(a) f_{n2}(a) on every sampled `a`.
pub fn check_multiplicative_family<T: Scalar>(
    spec: &FunctionSpec,
    n1: u64,
    n2: u64,
    sample: &[i64],
) -> Result<bool, EvenFnError> {
    if n1 == 0 || n2 == 0 {
        return Err(EvenFnError::ZeroModulus);
    }
    if arith::gcd(n1, n2) != 1 {
        return Err(EvenFnError::CoprimalityViolation { n1, n2 });
    }
    let f1 = spec.build::<T>(n1)?;
    let f2 = spec.build::<T>(n2)?;
    let f12 = spec.build::<T>(n1 * n2)?;
    Ok(sample.iter().all(|&a| {
        let lhs = T::constant(1, f12.eval(a).clone());
        let rhs = T::constant(1, f1.eval(a).clone() * f2.eval(a).clone());
        T::agree(&lhs, &rhs, 1)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Exact, Float};
    use crate::sums::ramanujan_bruteforce;

    fn int(v: i64) -> Exact {
        Exact::from_integer(v.into())
    }

    #[test]
    fn constructor_examples() {
        let g1 = make_gcd_power::<Exact>(6, Exponent::Int(1)).unwrap();
        assert_eq!(*g1.eval(4), int(2));
        let g0 = make_gcd_power::<Exact>(6, Exponent::Int(0)).unwrap();
        assert!((-12..12).all(|a| *g0.eval(a) == int(1)));
        assert_eq!(*make_gcd_power::<Exact>(12, Exponent::Int(2)).unwrap().eval(8), int(16));

        assert_eq!(*make_sigma_gcd::<Exact>(6, Exponent::Int(1)).unwrap().eval(4), int(3));
        assert_eq!(*make_sigma_gcd::<Exact>(35, Exponent::Int(3)).unwrap().eval(4), int(1));
        assert_eq!(*make_sigma_gcd::<Exact>(12, Exponent::Int(0)).unwrap().eval(8), int(3));

        let c6 = make_ramanujan::<Exact>(6).unwrap();
        assert_eq!(*c6.eval(0), int(2));
        assert_eq!(*c6.eval(2), int(-1));
        assert_eq!(*make_ramanujan::<Exact>(4).unwrap().eval(2), int(-2));
        // values agree with the brute-force Ramanujan sum
        for n in 1..=30u64 {
            let f = make_ramanujan::<Exact>(n).unwrap();
            for a in 0..n as i64 {
                assert_eq!(Some(f.eval(a).clone()), ramanujan_bruteforce(n, a).as_rational());
            }
        }
    }

    #[test]
    fn from_fn_examples() {
        let mu = make_from_fn::<Exact>(6, "mu", |d| int(arith::moebius(d).unwrap())).unwrap();
        assert_eq!(*mu.eval(3), int(-1));
        let id = make_from_fn::<Exact>(18, "id", |d| int(d as i64)).unwrap();
        let g1 = make_gcd_power::<Exact>(18, Exponent::Int(1)).unwrap();
        assert!((0..36).all(|a| id.eval(a) == g1.eval(a)));
        let phi = make_from_fn::<Exact>(12, "phi", |d| int(arith::euler_phi(d).unwrap() as i64)).unwrap();
        assert_eq!(*phi.eval(8), int(2));
        assert_eq!(phi.label().to_string(), "custom:phi");
    }

    #[test]
    fn negative_arguments_use_absolute_gcd() {
        let g = make_gcd_power::<Exact>(12, Exponent::Int(1)).unwrap();
        assert_eq!(*g.eval(-8), int(4));
        assert_eq!(*g.eval(0), int(12));
        assert_eq!(*g.eval(12), int(12));
    }

    #[test]
    fn even_property_exhaustive() {
        for n in 1..=100u64 {
            for spec in FunctionSpec::builtins() {
                let f = spec.build::<Exact>(n).unwrap();
                for a in 0..n as i64 {
                    let g = arith::gcd_mod(n, a) as i64;
                    assert_eq!(f.eval(a), f.eval(g));
                    assert_eq!(f.eval(a), f.eval(a + n as i64));
                }
            }
        }
    }

    #[test]
    fn corollary_one_closed_forms_and_round_trip() {
        for n in 1..=200u64 {
            for spec in FunctionSpec::builtins() {
                let f = spec.build::<Exact>(n).unwrap();
                let g = f.mobius_transform();
                for &d in f.divisors() {
                    assert_eq!(g[&d], spec.mobius_closed_form::<Exact>(n, d).unwrap(), "{spec} n={n} d={d}");
                    let back = g
                        .iter()
                        .filter(|(&e, _)| d % e == 0)
                        .fold(Exact::zero(), |acc, (_, v)| acc + v);
                    assert_eq!(&back, f.at_divisor(d).unwrap());
                }
            }
        }
    }

    #[test]
    fn family_multiplicativity() {
        assert!(check_multiplicative_family::<Exact>(&"gcdpow:1".parse().unwrap(), 4, 9, &[6]).unwrap());
        let all12: Vec<i64> = (0..12).collect();
        assert!(check_multiplicative_family::<Exact>(&FunctionSpec::Ramanujan, 4, 3, &all12).unwrap());
        let two = FunctionSpec::Const(int(2));
        assert!(!check_multiplicative_family::<Exact>(&two, 2, 3, &[0]).unwrap());
        assert!(!two.is_multiplicative());
        assert_eq!(
            check_multiplicative_family::<Exact>(&FunctionSpec::Ramanujan, 4, 6, &[0]),
            Err(EvenFnError::CoprimalityViolation { n1: 4, n2: 6 })
        );
        for spec in FunctionSpec::builtins() {
            for n1 in 1..=200u64 {
                for n2 in 1..=(200 / n1) {
                    if arith::gcd(n1, n2) != 1 {
                        continue;
                    }
                    let sample: Vec<i64> = (0..(n1 * n2) as i64).collect();
                    assert!(check_multiplicative_family::<Exact>(&spec, n1, n2, &sample).unwrap());
                }
            }
        }
        let half: FunctionSpec = "gcdpow:1/2".parse().unwrap();
        assert!(check_multiplicative_family::<Float>(&half, 8, 9, &[0, 6, 12, 18]).unwrap());
    }

    #[test]
    fn fspec_grammar() {
        for s in ["gcdpow:2", "sigmagcd:1", "ramanujan", "const:2", "gcdpow:1/2", "sigmagcd:-1", "const:3/4"] {
            let spec: FunctionSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
            let json = serde_json::to_string(&spec).unwrap();
            assert_eq!(serde_json::from_str::<FunctionSpec>(&json).unwrap(), spec);
        }
        assert_eq!("gcdpow".parse::<FunctionSpec>().unwrap(), FunctionSpec::GcdPow(Exponent::Int(1)));
        assert!("gcdpow:x".parse::<FunctionSpec>().is_err());
        assert!("ramanujan:2".parse::<FunctionSpec>().is_err());
        assert!("nope".parse::<FunctionSpec>().is_err());
        assert!(!"gcdpow:1/2".parse::<FunctionSpec>().unwrap().is_exact());
        assert!(matches!(
            "gcdpow:1/2".parse::<FunctionSpec>().unwrap().build::<Exact>(4),
            Err(EvenFnError::Scalar(ScalarError::NonExactExponent(_)))
        ));
    }
}
