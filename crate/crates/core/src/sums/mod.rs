//! Menon-type sums and their closed forms.
//!
//! Brute-force oracles live in [`oracle`]; the generalized Ramanujan sums
//! T_n(k, s, d) in [`lemma`]; the closed forms for S_f(n, k, s) in
//! [`theorem`], [`split`] and [`corollary`]. All evaluators are generic over
//! the [`Scalar`](crate::scalar::Scalar) backend, so `::<Exact>` yields a
//! canonical cyclotomic element and `::<Float>` a complex double.
//!
//! The residues `k` and `s` may be any integers; every evaluator works with
//! their representatives in `[0, n)`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{self, Valuation};
use crate::evenfn::{EvenFnError, FunctionSpec};
use crate::scalar::ScalarError;

pub mod corollary;
pub mod lemma;
pub mod oracle;
pub mod split;
pub mod theorem;

pub use corollary::{
    cor_gcd_power, cor_m1_gcd, cor_m1_ramanujan, cor_m1_sigma, cor_ramanujan, cor_sigma, corollary2,
    corollary3, f_m, f_m_divisor_sum, f_m_euler_product, g_m, g_m_divisor_sum, g_m_euler_product,
};
pub use lemma::{gcd_dft, ramanujan_formula, t_lemma1, t_lemma1_shifted, t_lemma2, t_lemma3};
pub use oracle::{
    gcd_dft_bruteforce, ramanujan_bruteforce, s_bruteforce, s_decomposition, t_bruteforce,
};
pub use split::{s_split, s_theorem5, split_by_valuation, Splitting};
pub use theorem::{s_theorem1, s_theorem1_forms, s_theorem1_shifted, s_theorem2, s_theorem3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SumError {
    #[error("ZERO_ARGUMENT: modulus must be positive")]
    ZeroModulus,
    #[error("D_NOT_DIVIDING: {d} does not divide {n}")]
    DNotDividing { n: u64, d: u64 },
    #[error("HYPOTHESIS_VIOLATION: {0}")]
    HypothesisViolation(String),
    #[error("SPLIT_UNDEFINED: nu_p(n) - nu_p(k) = 1 for n = {n}, k = {k} at p in {primes:?}")]
    SplitUndefined { n: u64, k: i64, primes: Vec<u64> },
    #[error("COPRIMALITY_VIOLATION: gcd({n1}, {n2}) > 1")]
    CoprimalityViolation { n1: u64, n2: u64 },
    #[error("S_NOT_COPRIME: gcd(s = {s}, n = {n}) > 1")]
    SNotCoprime { n: u64, s: i64 },
    #[error("NOT_MULTIPLICATIVE: family {0} is not multiplicative in n")]
    NotMultiplicative(FunctionSpec),
    #[error("NOT_APPLICABLE: {0}")]
    NotApplicable(String),
    #[error("FORM_MISMATCH: {what}: {left} != {right}")]
    FormMismatch { what: &'static str, left: String, right: String },
    #[error(transparent)]
    EvenFn(#[from] EvenFnError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

impl SumError {
    /// Whether the error reports an unmet precondition of an identity, as
    /// opposed to a disagreement between two evaluations.
    pub fn is_out_of_hypothesis(&self) -> bool {
        !matches!(self, SumError::FormMismatch { .. })
    }
}

/// Seeded single-token defects in the closed-form evaluators. Used only to
/// check that the verification sweep notices them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// |μ(δ)| in place of μ(δ) in the T_n(k, s, d) sum.
    MobiusSign,
    /// (μ*f)(d) in place of (μ*f)(n/d) in the deep-valuation closed form.
    SwappedQuotient,
    /// the (d, s) = 1 filter dropped from the n | k closed form.
    DroppedCoprimality,
    /// δ′ = δ^{-1} mod d instead of δ^{-1}·s mod d.
    WrongDeltaPrime,
    /// the outer divisor loop of the general evaluation stops before d = n.
    ShortDivisorRange,
}

impl Mutation {
    pub const ALL: [Mutation; 5] = [
        Mutation::MobiusSign,
        Mutation::SwappedQuotient,
        Mutation::DroppedCoprimality,
        Mutation::WrongDeltaPrime,
        Mutation::ShortDivisorRange,
    ];
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mutation::MobiusSign => "mobius-sign",
            Mutation::SwappedQuotient => "swapped-quotient",
            Mutation::DroppedCoprimality => "dropped-coprimality",
            Mutation::WrongDeltaPrime => "wrong-delta-prime",
            Mutation::ShortDivisorRange => "short-divisor-range",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub(crate) struct EvalOptions {
    pub mutation: Option<Mutation>,
    /// δ′ is replaced by δ′ + delta_shift·d.
    pub delta_shift: u64,
}

impl EvalOptions {
    pub fn mutated(mutation: Option<Mutation>) -> Self {
        EvalOptions { mutation, delta_shift: 0 }
    }

    pub fn is(&self, m: Mutation) -> bool {
        self.mutation == Some(m)
    }
}

/// One evaluation point (n, k, s, f) of a sum, with the extra divisor `d`
/// for T_n(k, s, d) and the factor `n1` for a coprime splitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumInstance {
    pub n: u64,
    pub k: i64,
    pub s: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<u64>,
}

impl SumInstance {
    /// Stores `k` and `s` reduced modulo `n`.
    pub fn new(n: u64, k: i64, s: i64) -> Self {
        assert!(n > 0, "modulus must be positive");
        SumInstance {
            n,
            k: arith::residue(k, n) as i64,
            s: arith::residue(s, n) as i64,
            f: None,
            d: None,
            n1: None,
        }
    }

    pub fn with_f(mut self, f: FunctionSpec) -> Self {
        self.f = Some(f);
        self
    }

    pub fn with_d(mut self, d: u64) -> Self {
        self.d = Some(d);
        self
    }

    pub fn with_n1(mut self, n1: u64) -> Self {
        self.n1 = Some(n1);
        self
    }
}

impl fmt::Display for SumInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} k={} s={}", self.n, self.k, self.s)?;
        if let Some(spec) = &self.f {
            write!(f, " f={spec}")?;
        }
        if let Some(d) = self.d {
            write!(f, " d={d}")?;
        }
        if let Some(n1) = self.n1 {
            write!(f, " n1={n1}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_modulus(n: u64) -> Result<(), SumError> {
    if n == 0 {
        Err(SumError::ZeroModulus)
    } else {
        Ok(())
    }
}

/// (ν_p(n), ν_p(k)) for every prime p | n; k = 0 gives an infinite valuation.
pub fn valuation_profile(n: u64, k: i64) -> Vec<(u64, u32, Valuation)> {
    let f = arith::factorize(n).expect("n > 0");
    f.parts()
        .iter()
        .map(|&(p, e)| (p, e, arith::valuation_i64(k, p)))
        .collect()
}

/// ν_p(n) ≥ ν_p(k) + 2 for every prime p | n.
pub fn deep_valuation_hypothesis(n: u64, k: i64) -> bool {
    valuation_profile(n, k)
        .into_iter()
        .all(|(_, vn, vk)| matches!(vk, Valuation::Finite(vk) if vn >= vk + 2))
}

/// ν_p(n) ≤ ν_p(k) for every prime p | n, i.e. n | k.
pub fn divides_hypothesis(n: u64, k: i64) -> bool {
    arith::residue(k, n) == 0
}

pub(crate) fn require_deep_valuation(n: u64, k: i64) -> Result<(), SumError> {
    if deep_valuation_hypothesis(n, k) {
        Ok(())
    } else {
        Err(SumError::HypothesisViolation(format!(
            "need nu_p({n}) >= nu_p({k}) + 2 for every prime p | {n}"
        )))
    }
}

pub(crate) fn require_divides(n: u64, k: i64) -> Result<(), SumError> {
    if divides_hypothesis(n, k) {
        Ok(())
    } else {
        Err(SumError::HypothesisViolation(format!("need {n} | {k}")))
    }
}

/// δ′ with δ·δ′ ≡ s (mod d), taken as (δ^{-1} mod d)·s mod d, or s when d = 1.
pub(crate) fn delta_prime(delta: u64, d: u64, s: u64, opts: EvalOptions) -> u64 {
    let base = if d == 1 {
        if opts.is(Mutation::WrongDeltaPrime) {
            1
        } else {
            s
        }
    } else {
        let inv = arith::mod_inverse((delta % d) as i64, d).expect("(delta, d) = 1");
        if opts.is(Mutation::WrongDeltaPrime) {
            inv
        } else {
            arith::mul_mod(inv, s, d)
        }
    };
    base + opts.delta_shift * d
}

/// Exponent δ·δ′·k reduced modulo n.
pub(crate) fn character_exponent(delta: u64, delta_prime: u64, k: u64, n: u64) -> u64 {
    arith::mul_mod(arith::mul_mod(delta % n, delta_prime % n, n), k, n)
}
