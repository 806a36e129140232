//! Brute-force evaluations straight from the defining sums. These are the
//! reference values every closed form is compared against.

use crate::arith;
use crate::cyclo::CycElem;
use crate::evenfn::EvenFunction;
use num_traits::One;

use crate::scalar::{Exact, PowerSum, Scalar};

use super::{check_modulus, SumError};

/// c_n(k) = Σ_{1≤a≤n, (a,n)=1} ζ_n^{ak}.
///
/// Panics if `n == 0`.
pub fn ramanujan_bruteforce(n: u64, k: i64) -> CycElem {
    assert!(n > 0, "modulus must be positive");
    let k = arith::residue(k, n);
    let mut sum = PowerSum::<Exact>::new(n);
    for a in (1..=n).filter(|&a| arith::gcd(a, n) == 1) {
        sum.add_term(arith::mul_mod(a, k, n), Exact::one());
    }
    sum.finish()
}

/// S(n, k) = Σ_{a=1}^{n} (a − 1, n) ζ_n^{ak}.
pub fn gcd_dft_bruteforce<T: Scalar>(n: u64, k: i64) -> Result<T::Value, SumError> {
    check_modulus(n)?;
    let k = arith::residue(k, n);
    let mut sum = PowerSum::<T>::new(n);
    for a in 1..=n {
        sum.add_term(arith::mul_mod(a, k, n), T::from_u64(arith::gcd(a - 1, n)));
    }
    Ok(sum.finish())
}

pub(crate) fn t_bruteforce_sum<T: Scalar>(n: u64, k: u64, s: u64, d: u64) -> PowerSum<T> {
    let mut sum = PowerSum::<T>::new(n);
    let s_mod_d = s % d;
    for a in (1..=n).filter(|&a| a % d == s_mod_d && arith::gcd(a, n) == 1) {
        sum.add_term(arith::mul_mod(a, k, n), T::one());
    }
    sum
}

/// T_n(k, s, d) = Σ ζ_n^{ak} over 1 ≤ a ≤ n with (a, n) = 1 and a ≡ s (mod d).
pub fn t_bruteforce<T: Scalar>(n: u64, k: i64, s: i64, d: u64) -> Result<T::Value, SumError> {
    check_modulus(n)?;
    if d == 0 || n % d != 0 {
        return Err(SumError::DNotDividing { n, d });
    }
    Ok(t_bruteforce_sum::<T>(n, arith::residue(k, n), arith::residue(s, n), d).finish())
}

/// Σ_{a ∈ (ℤ/n1)^×} f_{n1}(a − s) ζ_{n1}^{a·k}, written at modulus
/// `ambient = n1·lift` through ζ_{n1} = ζ_ambient^{lift}.
pub(crate) fn s_bruteforce_sum<T: Scalar>(f: &EvenFunction<T>, k: u64, s: u64, ambient: u64) -> PowerSum<T> {
    let n = f.modulus();
    debug_assert_eq!(ambient % n, 0);
    let lift = ambient / n;
    let mut sum = PowerSum::<T>::new(ambient);
    for a in (1..=n).filter(|&a| arith::gcd(a, n) == 1) {
        let w = f.eval(a as i64 - s as i64);
        if !w.is_zero() {
            sum.add_term(lift * arith::mul_mod(a, k, n), w.clone());
        }
    }
    sum
}

/// S_f(n, k, s) = Σ_{1≤a≤n, (a,n)=1} f_n(a − s) ζ_n^{ak}.
pub fn s_bruteforce<T: Scalar>(f: &EvenFunction<T>, k: i64, s: i64) -> T::Value {
    let n = f.modulus();
    s_bruteforce_sum(f, arith::residue(k, n), arith::residue(s, n), n).finish()
}

/// Σ_{d|n} (μ*f_n)(d) T_n(k, s, d), with each T evaluated by brute force.
pub fn s_decomposition<T: Scalar>(f: &EvenFunction<T>, k: i64, s: i64) -> T::Value {
    let n = f.modulus();
    let (k, s) = (arith::residue(k, n), arith::residue(s, n));
    let mut total = PowerSum::<T>::new(n);
    for (d, g) in f.mobius_transform() {
        if !g.is_zero() {
            total.add_scaled(&t_bruteforce_sum::<T>(n, k, s, d), &g);
        }
    }
    total.finish()
}
