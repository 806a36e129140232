//! Differential verification: every closed form against the defining sum,
//! over exhaustive instance grids.
//!
//! A sweep splits its grid into units of work (one modulus, one function,
//! one `k`), evaluates them on a rayon pool of the configured width and
//! merges the per-unit tallies in grid order, so the report does not depend
//! on the number of threads.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith;
use crate::evenfn::{EvenFunction, FunctionSpec};
use crate::scalar::{Exact, Float, Scalar};
use crate::sums::{
    self, corollary, deep_valuation_hypothesis, divides_hypothesis, lemma, oracle, split_by_valuation,
    theorem, EvalOptions, Mutation, SumError, SumInstance,
};

/// An identity the sweep knows how to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Identity {
    Lemma1,
    Lemma2,
    Lemma3,
    Thm1,
    Thm2,
    Thm3,
    Thm4,
    Thm5,
    Cor2,
    Cor3,
    GcdDft,
}

impl Identity {
    pub const ALL: [Identity; 11] = [
        Identity::Lemma1,
        Identity::Lemma2,
        Identity::Lemma3,
        Identity::Thm1,
        Identity::Thm2,
        Identity::Thm3,
        Identity::Thm4,
        Identity::Thm5,
        Identity::Cor2,
        Identity::Cor3,
        Identity::GcdDft,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Lemma1 => "lemma1",
            Identity::Lemma2 => "lemma2",
            Identity::Lemma3 => "lemma3",
            Identity::Thm1 => "thm1",
            Identity::Thm2 => "thm2",
            Identity::Thm3 => "thm3",
            Identity::Thm4 => "thm4",
            Identity::Thm5 => "thm5",
            Identity::Cor2 => "cor2",
            Identity::Cor3 => "cor3",
            Identity::GcdDft => "gcd-dft",
        }
    }

    /// Identities about T_n(k, s, d), indexed by a divisor d of n.
    pub fn is_divisor_sum(self) -> bool {
        matches!(self, Identity::Lemma1 | Identity::Lemma2 | Identity::Lemma3)
    }

    /// Identities about S_f(n, k, s) for an even function f.
    pub fn needs_function(self) -> bool {
        !self.is_divisor_sum() && self != Identity::GcdDft
    }

    /// Whether `inst` satisfies the stated hypothesis of the identity.
    /// Computed from valuations and gcds alone, independently of the
    /// evaluators.
    pub fn hypothesis_holds(self, inst: &SumInstance) -> bool {
        let (n, k, s) = (inst.n, inst.k, inst.s);
        let multiplicative = inst.f.as_ref().is_some_and(FunctionSpec::is_multiplicative);
        let family = matches!(
            inst.f,
            Some(FunctionSpec::GcdPow(_) | FunctionSpec::SigmaGcd(_) | FunctionSpec::Ramanujan)
        );
        match self {
            Identity::Lemma1 | Identity::Thm1 | Identity::GcdDft => true,
            Identity::Lemma2 | Identity::Thm2 => deep_valuation_hypothesis(n, k),
            Identity::Lemma3 | Identity::Thm3 => divides_hypothesis(n, k),
            Identity::Thm4 => multiplicative,
            Identity::Thm5 => multiplicative && split_by_valuation(n, k).is_ok(),
            Identity::Cor2 => family && split_by_valuation(n, k).is_ok(),
            Identity::Cor3 => family && split_by_valuation(n, k).is_ok() && arith::gcd_mod(n, s) == 1,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Identity::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| format!("unknown identity {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Mode::Exact),
            "float" => Ok(Mode::Float),
            other => Err(format!("unknown mode {other:?}, expected exact or float")),
        }
    }
}

/// Residues swept for `k` or `s`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidueSet {
    /// Every residue in [0, n).
    Full,
    /// The listed integers, reduced modulo n and deduplicated.
    List(Vec<i64>),
}

impl ResidueSet {
    pub fn values(&self, n: u64) -> Vec<u64> {
        match self {
            ResidueSet::Full => (0..n).collect(),
            ResidueSet::List(xs) => {
                let mut v: Vec<u64> = xs.iter().map(|&x| arith::residue(x, n)).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("CONFIG_INVALID: {}", .problems.join("; "))]
pub struct ConfigError {
    /// One `field: message` entry per problem.
    pub problems: Vec<String>,
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// What to sweep. `threads` only affects speed and is left out of the
/// serialized form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_min: u64,
    pub n_max: u64,
    pub k: ResidueSet,
    pub s: ResidueSet,
    pub functions: Vec<FunctionSpec>,
    pub identities: Vec<Identity>,
    pub mode: Mode,
    #[serde(skip, default = "default_threads")]
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mutation: Option<Mutation>,
}

impl Default for SweepConfig {
    /// n ≤ 24, every residue, the six built-in functions, every identity.
    fn default() -> Self {
        SweepConfig {
            n_min: 1,
            n_max: 24,
            k: ResidueSet::Full,
            s: ResidueSet::Full,
            functions: FunctionSpec::builtins(),
            identities: Identity::ALL.to_vec(),
            mode: Mode::Exact,
            threads: default_threads(),
            mutation: None,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut problems = Vec::new();
        if self.n_min == 0 {
            problems.push("n_min: moduli start at 1".to_string());
        }
        if self.n_max < self.n_min {
            problems.push(format!("n range: [{}, {}] is empty", self.n_min, self.n_max));
        }
        if self.identities.is_empty() {
            problems.push("identities: select at least one".to_string());
        }
        if self.threads == 0 {
            problems.push("threads: need at least one".to_string());
        }
        for (name, set) in [("k", &self.k), ("s", &self.s)] {
            if matches!(set, ResidueSet::List(xs) if xs.is_empty()) {
                problems.push(format!("{name}: sample list is empty"));
            }
        }
        if self.identities.iter().any(|id| id.needs_function()) && self.functions.is_empty() {
            problems.push("functions: the selected identities need at least one function".to_string());
        }
        if self.mode == Mode::Exact {
            for spec in self.functions.iter().filter(|f| !f.is_exact()) {
                problems.push(format!("functions: {spec} has a non-integer exponent, use float mode"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { problems })
        }
    }

    fn selected(&self, pred: impl Fn(Identity) -> bool) -> Vec<Identity> {
        let mut ids: Vec<Identity> = self.identities.iter().copied().filter(|&id| pred(id)).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    /// Instances inside the hypothesis, `passed + failed`.
    pub checked: u64,
    pub passed: u64,
    /// Instances outside the hypothesis of the identity.
    pub skipped: u64,
    pub failed: u64,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        self.checked += other.checked;
        self.passed += other.passed;
        self.skipped += other.skipped;
        self.failed += other.failed;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityTally {
    pub identity: Identity,
    #[serde(flatten)]
    pub tally: Tally,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub identity: Identity,
    pub instance: SumInstance,
    /// The defining sum.
    pub expected: String,
    /// The closed form.
    pub got: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Failure {
    fn sort_key(&self) -> (Identity, u64, i64, i64, String, Option<u64>, Option<u64>) {
        let i = &self.instance;
        let f = i.f.as_ref().map(ToString::to_string).unwrap_or_default();
        (self.identity, i.n, i.k, i.s, f, i.d, i.n1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub config: SweepConfig,
    pub identities: Vec<IdentityTally>,
    pub failures: Vec<Failure>,
    /// Wall-clock time; not serialized, so reports compare byte for byte.
    #[serde(skip)]
    pub duration: Duration,
}

impl VerificationReport {
    pub fn tally(&self, id: Identity) -> Option<&Tally> {
        self.identities.iter().find(|t| t.identity == id).map(|t| &t.tally)
    }

    pub fn total(&self) -> Tally {
        let mut total = Tally::default();
        for t in &self.identities {
            total.merge(&t.tally);
        }
        total
    }

    pub fn is_success(&self) -> bool {
        self.total().failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        let _ = write!(out, "mode {}, n in [{}, {}]", c.mode, c.n_min, c.n_max);
        if let Some(m) = c.mutation {
            let _ = write!(out, ", mutation {m}");
        }
        let _ = writeln!(out, "\n");
        let _ = writeln!(out, "{:<9} {:>10} {:>10} {:>10} {:>8}", "identity", "checked", "passed", "skipped", "failed");
        let mut row = |name: &str, t: &Tally| {
            let _ = writeln!(out, "{:<9} {:>10} {:>10} {:>10} {:>8}", name, t.checked, t.passed, t.skipped, t.failed);
        };
        for t in &self.identities {
            row(t.identity.name(), &t.tally);
        }
        row("total", &self.total());
        if !self.failures.is_empty() {
            let _ = writeln!(out, "\nfailures:");
            for f in &self.failures {
                let _ = writeln!(out, "  {} {}: expected {}, got {}", f.identity, f.instance, f.expected, f.got);
                if let Some(note) = &f.note {
                    let _ = writeln!(out, "    {note}");
                }
            }
        }
        out
    }
}

/// Result of checking one instance of one identity.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass,
    Skip(String),
    Fail { expected: String, got: String, note: Option<String> },
}

impl Outcome {
    pub fn is_fail(&self) -> bool {
        matches!(self, Outcome::Fail { .. })
    }
}

fn compare<T: Scalar>(closed: Result<T::Value, SumError>, brute: &T::Value, n: u64) -> Outcome {
    match closed {
        Ok(v) if T::agree(&v, brute, n) => Outcome::Pass,
        Ok(v) => Outcome::Fail { expected: T::render(brute), got: T::render(&v), note: None },
        Err(e @ SumError::FormMismatch { .. }) => Outcome::Fail {
            expected: T::render(brute),
            got: match &e {
                SumError::FormMismatch { left, .. } => left.clone(),
                _ => unreachable!(),
            },
            note: Some(e.to_string()),
        },
        Err(e) => Outcome::Skip(e.to_string()),
    }
}

fn check_divisor_sum<T: Scalar>(
    id: Identity,
    n: u64,
    k: i64,
    s: i64,
    d: u64,
    brute: &T::Value,
    opts: EvalOptions,
) -> Outcome {
    let closed = match id {
        Identity::Lemma1 => lemma::t_lemma1_with::<T>(n, k, s, d, opts),
        Identity::Lemma2 => lemma::t_lemma2::<T>(n, k, s, d),
        Identity::Lemma3 => lemma::t_lemma3::<T>(n, k, s, d).map(|x| T::constant(n, x)),
        other => unreachable!("{other} is not a divisor-sum identity"),
    };
    compare::<T>(closed, brute, n)
}

fn check_function<T: Scalar>(
    id: Identity,
    spec: &FunctionSpec,
    f: &EvenFunction<T>,
    k: i64,
    s: i64,
    n1: Option<u64>,
    brute: &T::Value,
    opts: EvalOptions,
) -> Outcome {
    let n = f.modulus();
    let closed = match id {
        Identity::Thm1 => {
            let outcome = compare::<T>(theorem::s_theorem1_with(f, k, s, opts), brute, n);
            if outcome != Outcome::Pass {
                return outcome;
            }
            let decomposed = oracle::s_decomposition(f, k, s);
            if !T::agree(&decomposed, brute, n) {
                return Outcome::Fail {
                    expected: T::render(brute),
                    got: T::render(&decomposed),
                    note: Some("divisor decomposition through T_n(k, s, d) disagrees".to_string()),
                };
            }
            return Outcome::Pass;
        }
        Identity::Thm2 => theorem::s_theorem2_with(f, k, s, opts),
        Identity::Thm3 => theorem::s_theorem3_with(f, k, s, opts).map(|x| T::constant(n, x)),
        Identity::Thm4 => {
            let n1 = n1.expect("split instances carry n1");
            sums::s_split::<T>(spec, n1, n / n1, k, s)
        }
        Identity::Thm5 => sums::s_theorem5::<T>(spec, n, k, s),
        Identity::Cor2 => corollary::corollary2::<T>(spec, n, k, s),
        Identity::Cor3 => corollary::corollary3::<T>(spec, n, k, s),
        other => unreachable!("{other} is not a function identity"),
    };
    compare::<T>(closed, brute, n)
}

fn check_gcd_dft<T: Scalar>(n: u64, k: i64) -> Outcome {
    let brute = oracle::gcd_dft_bruteforce::<T>(n, k).expect("n > 0");
    compare::<T>(sums::gcd_dft::<T>(n, k), &brute, n)
}

/// Divisors n1 of n with (n1, n/n1) = 1.
fn unitary_divisors(n: u64) -> Vec<u64> {
    arith::divisors(n)
        .expect("n > 0")
        .into_iter()
        .filter(|&d| arith::gcd(d, n / d) == 1)
        .collect()
}

fn check_instance_in<T: Scalar>(id: Identity, inst: &SumInstance, opts: EvalOptions) -> Outcome {
    let (n, k, s) = (inst.n, inst.k, inst.s);
    if n == 0 {
        return Outcome::Skip("modulus must be positive".to_string());
    }
    if id == Identity::GcdDft {
        return check_gcd_dft::<T>(n, k);
    }
    if id.is_divisor_sum() {
        let Some(d) = inst.d else {
            return Outcome::Skip(format!("{id} needs a divisor d"));
        };
        return match oracle::t_bruteforce::<T>(n, k, s, d) {
            Ok(brute) => check_divisor_sum::<T>(id, n, k, s, d, &brute, opts),
            Err(e) => Outcome::Skip(e.to_string()),
        };
    }
    let Some(spec) = &inst.f else {
        return Outcome::Skip(format!("{id} needs a function"));
    };
    if id == Identity::Thm4 {
        match inst.n1 {
            Some(n1) if n1 > 0 && n % n1 == 0 => {}
            _ => return Outcome::Skip("thm4 needs a factor n1 of n".to_string()),
        }
    }
    let f = match spec.build::<T>(n) {
        Ok(f) => f,
        Err(e) => return Outcome::Skip(e.to_string()),
    };
    let brute = oracle::s_bruteforce(&f, k, s);
    check_function::<T>(id, spec, &f, k, s, inst.n1, &brute, opts)
}

/// Checks one instance of `id` against the brute-force oracle.
pub fn check_instance(id: Identity, inst: &SumInstance, mode: Mode, mutation: Option<Mutation>) -> Outcome {
    let opts = EvalOptions::mutated(mutation);
    match mode {
        Mode::Exact => check_instance_in::<Exact>(id, inst, opts),
        Mode::Float => check_instance_in::<Float>(id, inst, opts),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimized {
    pub instance: SumInstance,
    /// Set when the input instance does not fail; it is then returned as is.
    pub no_failure: bool,
}

/// Shrinks a failing instance: the smallest divisor of n that still admits
/// a failure, then the smallest k, then s (then d or n1).
pub fn minimize_failure(
    inst: &SumInstance,
    id: Identity,
    mode: Mode,
    mutation: Option<Mutation>,
) -> Minimized {
    if !check_instance(id, inst, mode, mutation).is_fail() {
        return Minimized { instance: inst.clone(), no_failure: true };
    }
    for m in arith::divisors(inst.n).expect("n > 0") {
        for k in 0..m as i64 {
            let s_range = if id == Identity::GcdDft { 0..1 } else { 0..m as i64 };
            for s in s_range {
                let base = SumInstance { f: inst.f.clone(), ..SumInstance::new(m, k, s) };
                let extras: Vec<SumInstance> = if id.is_divisor_sum() {
                    arith::divisors(m).unwrap().into_iter().map(|d| base.clone().with_d(d)).collect()
                } else if id == Identity::Thm4 {
                    unitary_divisors(m).into_iter().map(|n1| base.clone().with_n1(n1)).collect()
                } else {
                    vec![base]
                };
                for cand in extras {
                    if check_instance(id, &cand, mode, mutation).is_fail() {
                        return Minimized { instance: cand, no_failure: false };
                    }
                }
            }
        }
    }
    Minimized { instance: inst.clone(), no_failure: false }
}

#[derive(Debug, Clone, Copy)]
enum UnitKind {
    DivisorSums,
    Function(usize),
    GcdDft,
}

#[derive(Debug, Clone, Copy)]
struct Unit {
    n: u64,
    k: u64,
    kind: UnitKind,
}

#[derive(Default)]
struct UnitResult {
    tallies: BTreeMap<Identity, Tally>,
    failures: Vec<Failure>,
}

impl UnitResult {
    fn record(&mut self, id: Identity, inst: impl FnOnce() -> SumInstance, outcome: Outcome) {
        let t = self.tallies.entry(id).or_default();
        match outcome {
            Outcome::Pass => {
                t.checked += 1;
                t.passed += 1;
            }
            Outcome::Skip(_) => t.skipped += 1,
            Outcome::Fail { expected, got, note } => {
                t.checked += 1;
                t.failed += 1;
                self.failures.push(Failure { identity: id, instance: inst(), expected, got, note });
            }
        }
    }
}

struct Plan {
    divisor_ids: Vec<Identity>,
    function_ids: Vec<Identity>,
    gcd_dft: bool,
    opts: EvalOptions,
}

fn run_unit<T: Scalar>(config: &SweepConfig, plan: &Plan, unit: Unit) -> UnitResult {
    let mut out = UnitResult::default();
    let (n, k) = (unit.n, unit.k as i64);
    match unit.kind {
        UnitKind::GcdDft => {
            out.record(Identity::GcdDft, || SumInstance::new(n, k, 0), check_gcd_dft::<T>(n, k));
        }
        UnitKind::DivisorSums => {
            for s in config.s.values(n) {
                for d in arith::divisors(n).expect("n > 0") {
                    let brute = oracle::t_bruteforce_sum::<T>(n, unit.k, s, d).finish();
                    let s = s as i64;
                    for &id in &plan.divisor_ids {
                        let outcome = check_divisor_sum::<T>(id, n, k, s, d, &brute, plan.opts);
                        out.record(id, || SumInstance::new(n, k, s).with_d(d), outcome);
                    }
                }
            }
        }
        UnitKind::Function(i) => {
            let spec = &config.functions[i];
            let f = spec.build::<T>(n).expect("validated function spec");
            let unitary = unitary_divisors(n);
            for s in config.s.values(n) {
                let s = s as i64;
                let brute = oracle::s_bruteforce(&f, k, s);
                let inst = || SumInstance::new(n, k, s).with_f(spec.clone());
                for &id in &plan.function_ids {
                    if id == Identity::Thm4 {
                        for &n1 in &unitary {
                            let outcome = check_function::<T>(id, spec, &f, k, s, Some(n1), &brute, plan.opts);
                            out.record(id, || inst().with_n1(n1), outcome);
                        }
                    } else {
                        let outcome = check_function::<T>(id, spec, &f, k, s, None, &brute, plan.opts);
                        out.record(id, inst, outcome);
                    }
                }
            }
        }
    }
    out
}

fn run_units<T: Scalar>(config: &SweepConfig, plan: &Plan, units: &[Unit]) -> Vec<UnitResult> {
    units.par_iter().map(|&u| run_unit::<T>(config, plan, u)).collect()
}

/// Runs every selected identity over the configured grid.
pub fn run_sweep(config: &SweepConfig) -> Result<VerificationReport, ConfigError> {
    config.validate()?;
    let start = Instant::now();
    let plan = Plan {
        divisor_ids: config.selected(Identity::is_divisor_sum),
        function_ids: config.selected(Identity::needs_function),
        gcd_dft: config.identities.contains(&Identity::GcdDft),
        opts: EvalOptions::mutated(config.mutation),
    };

    let mut units = Vec::new();
    for n in config.n_min..=config.n_max {
        for k in config.k.values(n) {
            if !plan.divisor_ids.is_empty() {
                units.push(Unit { n, k, kind: UnitKind::DivisorSums });
            }
            if !plan.function_ids.is_empty() {
                for i in 0..config.functions.len() {
                    units.push(Unit { n, k, kind: UnitKind::Function(i) });
                }
            }
            if plan.gcd_dft {
                units.push(Unit { n, k, kind: UnitKind::GcdDft });
            }
        }
    }
    // Largest moduli first for better load balance; results keep this order.
    units.reverse();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| ConfigError { problems: vec![format!("threads: {e}")] })?;
    let results = pool.install(|| match config.mode {
        Mode::Exact => run_units::<Exact>(config, &plan, &units),
        Mode::Float => run_units::<Float>(config, &plan, &units),
    });

    let mut tallies: BTreeMap<Identity, Tally> =
        config.selected(|_| true).into_iter().map(|id| (id, Tally::default())).collect();
    let mut failures = Vec::new();
    for r in results {
        for (id, t) in &r.tallies {
            tallies.entry(*id).or_default().merge(t);
        }
        failures.extend(r.failures);
    }
    failures.sort_by_cached_key(Failure::sort_key);

    Ok(VerificationReport {
        config: config.clone(),
        identities: tallies.into_iter().map(|(identity, tally)| IdentityTally { identity, tally }).collect(),
        failures,
        duration: start.elapsed(),
    })
}
