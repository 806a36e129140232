//! Exact evaluation of Menon-type sums
//!
//! S_f(n, k, s) = Σ_{1≤a≤n, (a,n)=1} f_n(a − s) ζ_n^{ak}
//!
//! for even functions f_n (mod n), together with their closed forms and a
//! harness that checks every closed form against the defining sum.
//!
//! ```
//! use menon::evenfn::make_gcd_power;
//! use menon::scalar::{Exact, Exponent};
//! use menon::sums::{s_bruteforce, s_theorem2};
//!
//! let f = make_gcd_power::<Exact>(8, Exponent::Int(1)).unwrap();
//! let brute = s_bruteforce(&f, 2, 1);
//! assert_eq!(s_theorem2(&f, 2, 1).unwrap(), brute);
//! assert_eq!(brute.to_string(), "8*z8^2");
//! ```

pub mod arith;
pub mod cyclo;
pub mod evenfn;
pub mod scalar;
pub mod sums;
pub mod cli;
pub mod verify;

pub use cyclo::{cyclotomic_poly, CycElem, CycPoly};
pub use evenfn::{EvenFunction, FunctionSpec};
pub use scalar::{Exact, Exponent, Float, Scalar};
pub use sums::{SumError, SumInstance};
