//! Specialized closed forms for (a, n)^m, σ_m((a, n)) and c_n(a), and the
//! further simplifications when (s, n) = 1.

use crate::arith;
use crate::evenfn::FunctionSpec;
use crate::scalar::{jordan_in, sigma_in, Exponent, PowerSum, Scalar};

use super::split::{split_by_valuation, Splitting};
use super::SumError;

fn phi<T: Scalar>(x: u64) -> T {
    T::from_u64(arith::euler_phi(x).expect("x > 0"))
}

fn times_character<T: Scalar>(n: u64, k: u64, s: u64, c: T) -> T::Value {
    let mut sum = PowerSum::<T>::new(n);
    sum.add_term(arith::mul_mod(k, s, n), c);
    sum.finish()
}

struct Setup {
    sp: Splitting,
    k: u64,
    s: u64,
}

fn setup(n: u64, k: i64, s: i64) -> Result<Setup, SumError> {
    let sp = split_by_valuation(n, k)?;
    Ok(Setup { sp, k: arith::residue(k, n), s: arith::residue(s, n) })
}

fn require_s_coprime(n: u64, s: i64) -> Result<(), SumError> {
    if n == 0 {
        return Err(SumError::ZeroModulus);
    }
    if arith::gcd_mod(n, s) != 1 {
        return Err(SumError::SNotCoprime { n, s });
    }
    Ok(())
}

/// Σ_{d|(n1,k), (n1/d,s)=1} term(d)
fn n1_sum<T: Scalar>(
    st: &Setup,
    mut term: impl FnMut(u64) -> Result<T, SumError>,
) -> Result<T, SumError> {
    let mut acc = T::zero();
    for d in arith::divisors(arith::gcd(st.sp.n1, st.k)).expect("gcd > 0") {
        if arith::gcd(st.sp.n1 / d, st.s) == 1 {
            acc += term(d)?;
        }
    }
    Ok(acc)
}

/// Σ_{d|n2, (d,s)=1} term(d)
fn n2_sum<T: Scalar>(
    st: &Setup,
    mut term: impl FnMut(u64) -> Result<T, SumError>,
) -> Result<T, SumError> {
    let mut acc = T::zero();
    for d in arith::divisors(st.sp.n2).expect("n2 > 0") {
        if arith::gcd(d, st.s) == 1 {
            acc += term(d)?;
        }
    }
    Ok(acc)
}

/// Σ_{(a,n)=1} (a − s, n)^m ζ_n^{ak}
///   = ζ_n^{ks} J_m(n1) φ(n2) Σ_{d|(n1,k), (n1/d,s)=1} d^{1−m} Σ_{d|n2, (d,s)=1} J_m(d)/φ(d).
pub fn cor_gcd_power<T: Scalar>(n: u64, k: i64, s: i64, m: Exponent) -> Result<T::Value, SumError> {
    let st = setup(n, k, s)?;
    let first = n1_sum::<T>(&st, |d| Ok(T::power(d, m.subtract_from(1))?))?;
    let second = n2_sum::<T>(&st, |d| Ok(jordan_in::<T>(m, d)? / phi::<T>(d)))?;
    let c = jordan_in::<T>(m, st.sp.n1)? * phi::<T>(st.sp.n2) * first * second;
    Ok(times_character(n, st.k, st.s, c))
}

/// Σ_{(a,n)=1} σ_m((a − s, n)) ζ_n^{ak}
///   = ζ_n^{ks} n1^m φ(n2) Σ_{d|(n1,k), (n1/d,s)=1} d^{1−m} Σ_{d|n2, (d,s)=1} d^m/φ(d).
pub fn cor_sigma<T: Scalar>(n: u64, k: i64, s: i64, m: Exponent) -> Result<T::Value, SumError> {
    let st = setup(n, k, s)?;
    let first = n1_sum::<T>(&st, |d| Ok(T::power(d, m.subtract_from(1))?))?;
    let second = n2_sum::<T>(&st, |d| Ok(T::power(d, m)? / phi::<T>(d)))?;
    let c = T::power(st.sp.n1, m)? * phi::<T>(st.sp.n2) * first * second;
    Ok(times_character(n, st.k, st.s, c))
}

/// Σ_{(a,n)=1} c_n(a − s) ζ_n^{ak}
///   = ζ_n^{ks} n1 φ(n2) Σ_{d|(n1,k), (n1/d,s)=1} μ(d) Σ_{d|n2, (d,s)=1} d μ(n2/d)/φ(d).
pub fn cor_ramanujan<T: Scalar>(n: u64, k: i64, s: i64) -> Result<T::Value, SumError> {
    let st = setup(n, k, s)?;
    let mu = |x| T::from_i64(arith::moebius(x).expect("x > 0"));
    let first = n1_sum::<T>(&st, |d| Ok(mu(d)))?;
    let n2 = st.sp.n2;
    let second = n2_sum::<T>(&st, |d| Ok(T::from_u64(d) * mu(n2 / d) / phi::<T>(d)))?;
    let c = T::from_u64(st.sp.n1) * phi::<T>(n2) * first * second;
    Ok(times_character(n, st.k, st.s, c))
}

/// Dispatches to the specialized closed form for a built-in family.
pub fn corollary2<T: Scalar>(spec: &FunctionSpec, n: u64, k: i64, s: i64) -> Result<T::Value, SumError> {
    match spec {
        FunctionSpec::GcdPow(m) => cor_gcd_power::<T>(n, k, s, *m),
        FunctionSpec::SigmaGcd(m) => cor_sigma::<T>(n, k, s, *m),
        FunctionSpec::Ramanujan => cor_ramanujan::<T>(n, k, s),
        other => Err(SumError::NotApplicable(format!("no specialized closed form for {other}"))),
    }
}

/// Σ_{j=0}^{ν−1} p^{j(m−1)}, via the quotient (p^{(m−1)ν} − 1)/(p^{m−1} − 1)
/// when m ≠ 1.
fn geometric<T: Scalar>(p: u64, m: Exponent, nu: u32) -> Result<T, SumError> {
    if m.is_one() {
        return Ok(T::from_u64(u64::from(nu)));
    }
    let r = T::power(p, m)? / T::from_u64(p);
    let mut rn = T::one();
    for _ in 0..nu {
        rn = rn * r.clone();
    }
    Ok((rn - T::one()) / (r - T::one()))
}

pub fn f_m_divisor_sum<T: Scalar>(m: Exponent, n2: u64) -> Result<T, SumError> {
    let mut acc = T::zero();
    for d in arith::divisors(n2).map_err(|_| SumError::ZeroModulus)? {
        acc += jordan_in::<T>(m, d)? / phi::<T>(d);
    }
    Ok(acc)
}

pub fn f_m_euler_product<T: Scalar>(m: Exponent, n2: u64) -> Result<T, SumError> {
    let f = arith::factorize(n2).map_err(|_| SumError::ZeroModulus)?;
    let mut acc = T::one();
    for &(p, nu) in f.parts() {
        let lead = (T::power(p, m)? - T::one()) / T::from_u64(p - 1);
        acc = acc * (T::one() + lead * geometric::<T>(p, m, nu)?);
    }
    Ok(acc)
}

pub fn g_m_divisor_sum<T: Scalar>(m: Exponent, n2: u64) -> Result<T, SumError> {
    let mut acc = T::zero();
    for d in arith::divisors(n2).map_err(|_| SumError::ZeroModulus)? {
        acc += T::power(d, m)? / phi::<T>(d);
    }
    Ok(acc)
}

pub fn g_m_euler_product<T: Scalar>(m: Exponent, n2: u64) -> Result<T, SumError> {
    let f = arith::factorize(n2).map_err(|_| SumError::ZeroModulus)?;
    let mut acc = T::one();
    for &(p, nu) in f.parts() {
        let lead = T::power(p, m)? / T::from_u64(p - 1);
        acc = acc * (T::one() + lead * geometric::<T>(p, m, nu)?);
    }
    Ok(acc)
}

fn cross_checked<T: Scalar>(what: &'static str, sum: T, product: T) -> Result<T, SumError> {
    if T::agree_scalar(&sum, &product) {
        Ok(sum)
    } else {
        Err(SumError::FormMismatch {
            what,
            left: T::render_scalar(&sum),
            right: T::render_scalar(&product),
        })
    }
}

/// F_m(n2) = Σ_{d|n2} J_m(d)/φ(d), checked against its Euler product.
pub fn f_m<T: Scalar>(m: Exponent, n2: u64) -> Result<T, SumError> {
    cross_checked("F_m divisor sum vs Euler product", f_m_divisor_sum(m, n2)?, f_m_euler_product(m, n2)?)
}

/// G_m(n2) = Σ_{d|n2} d^m/φ(d), checked against its Euler product.
pub fn g_m<T: Scalar>(m: Exponent, n2: u64) -> Result<T, SumError> {
    cross_checked("G_m divisor sum vs Euler product", g_m_divisor_sum(m, n2)?, g_m_euler_product(m, n2)?)
}

/// Σ_{(a,n)=1} (a − s, n)^m ζ_n^{ak} for (s, n) = 1:
/// ζ_n^{ks} J_m(n1) σ_{1−m}((n1,k)) φ(n2) F_m(n2), or ζ_n^{ks} φ(n) τ((n,k)) at m = 1.
pub fn cor_m1_gcd<T: Scalar>(n: u64, k: i64, s: i64, m: Exponent) -> Result<T::Value, SumError> {
    require_s_coprime(n, s)?;
    let st = setup(n, k, s)?;
    let c = if m.is_one() {
        let tau = arith::tau(arith::gcd(n, st.k)).expect("gcd > 0");
        phi::<T>(n) * T::from_u64(tau)
    } else {
        let g = arith::gcd(st.sp.n1, st.k);
        jordan_in::<T>(m, st.sp.n1)?
            * sigma_in::<T>(m.subtract_from(1), g)?
            * phi::<T>(st.sp.n2)
            * f_m::<T>(m, st.sp.n2)?
    };
    Ok(times_character(n, st.k, st.s, c))
}

/// Σ_{(a,n)=1} σ_m((a − s, n)) ζ_n^{ak} for (s, n) = 1:
/// ζ_n^{ks} n1^m σ_{1−m}((n1,k)) φ(n2) G_m(n2), with τ in place of σ_0 at m = 1.
pub fn cor_m1_sigma<T: Scalar>(n: u64, k: i64, s: i64, m: Exponent) -> Result<T::Value, SumError> {
    require_s_coprime(n, s)?;
    let st = setup(n, k, s)?;
    let g = arith::gcd(st.sp.n1, st.k);
    let middle = if m.is_one() {
        T::from_u64(st.sp.n1) * T::from_u64(arith::tau(g).expect("g > 0"))
    } else {
        T::power(st.sp.n1, m)? * sigma_in::<T>(m.subtract_from(1), g)?
    };
    let c = middle * phi::<T>(st.sp.n2) * g_m::<T>(m, st.sp.n2)?;
    Ok(times_character(n, st.k, st.s, c))
}

/// Σ_{(a,n)=1} c_n(a − s) ζ_n^{ak} for (s, n) = 1: ζ_n^{ks} n1 when
/// (n1, k) = 1 and n2 is squarefree, zero otherwise.
pub fn cor_m1_ramanujan<T: Scalar>(n: u64, k: i64, s: i64) -> Result<T::Value, SumError> {
    require_s_coprime(n, s)?;
    let st = setup(n, k, s)?;
    let squarefree = arith::factorize(st.sp.n2).expect("n2 > 0").is_squarefree();
    let c = if arith::gcd(st.sp.n1, st.k) == 1 && squarefree {
        T::from_u64(st.sp.n1)
    } else {
        T::zero()
    };
    Ok(times_character(n, st.k, st.s, c))
}

/// Dispatches to the (s, n) = 1 closed form for a built-in family.
pub fn corollary3<T: Scalar>(spec: &FunctionSpec, n: u64, k: i64, s: i64) -> Result<T::Value, SumError> {
    match spec {
        FunctionSpec::GcdPow(m) => cor_m1_gcd::<T>(n, k, s, *m),
        FunctionSpec::SigmaGcd(m) => cor_m1_sigma::<T>(n, k, s, *m),
        FunctionSpec::Ramanujan => cor_m1_ramanujan::<T>(n, k, s),
        other => Err(SumError::NotApplicable(format!("no specialized closed form for {other}"))),
    }
}
