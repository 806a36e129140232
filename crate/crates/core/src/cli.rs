//! Command-line front end: `eval`, `verify`, `table` and `split`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cyclo::CycElem;
use crate::evenfn::FunctionSpec;
use crate::scalar::{Exact, Float, Scalar};
use crate::sums::{self, Mutation, SumError};
use crate::verify::{self, minimize_failure, Identity, Mode, ResidueSet, SweepConfig};

#[derive(Debug, Parser)]
#[command(name = "menon", version, about = "Evaluate and verify Menon-type sums over even functions (mod n)")]
pub struct Cli {
    /// Arithmetic backend.
    #[arg(long, global = true, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Also write the machine-readable result (JSON) to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Format of standard output.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one sum or closed form.
    Eval(EvalArgs),
    /// Check closed forms against the defining sums over a grid.
    Verify(VerifyArgs),
    /// Tabulate one sum or closed form over a range of n and k.
    Table(TableArgs),
    /// Show the valuation splitting n = n1·n2 for a given k.
    Split(SplitArgs),
}

/// What `eval` and `table` compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// The defining sum S_f(n, k, s).
    Bruteforce,
    /// T_n(k, s, d) by its definition.
    T,
    Ramanujan,
    GcdDft,
    Closed(Identity),
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Bruteforce => "bruteforce",
            Target::T => "T",
            Target::Ramanujan => "ramanujan",
            Target::GcdDft => "gcd-dft",
            Target::Closed(id) => id.name(),
        }
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bruteforce" => Ok(Target::Bruteforce),
            "T" | "t" => Ok(Target::T),
            "ramanujan" => Ok(Target::Ramanujan),
            "gcd-dft" => Ok(Target::GcdDft),
            other => other
                .parse::<Identity>()
                .map(Target::Closed)
                .map_err(|_| format!("unknown identity {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InstanceArgs {
    /// One of bruteforce, T, ramanujan, gcd-dft, lemma1..3, thm1..5, cor2, cor3.
    #[arg(long = "id")]
    pub target: Target,
    /// Function spec such as gcdpow:2, sigmagcd:1, ramanujan or const:3.
    #[arg(long)]
    pub f: Option<FunctionSpec>,
    /// Divisor d of n, for T and the lemmas.
    #[arg(long)]
    pub d: Option<u64>,
    /// Coprime factor n1 of n, for thm4.
    #[arg(long)]
    pub n1: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub what: InstanceArgs,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub k: i64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub s: i64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 1)]
    pub nmin: u64,
    #[arg(long, default_value_t = 24)]
    pub nmax: u64,
    /// Check every identity (the default when --ids is absent).
    #[arg(long, conflicts_with = "ids")]
    pub all: bool,
    /// Comma-separated identities.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub ids: Option<Vec<Identity>>,
    /// Comma-separated function specs; defaults to the built-in families.
    #[arg(long = "f", value_delimiter = ',')]
    pub functions: Option<Vec<FunctionSpec>>,
    /// Sample list of k values instead of every residue.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub k: Option<Vec<i64>>,
    /// Sample list of s values instead of every residue.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub s: Option<Vec<i64>>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Seed a defect into the closed forms (for testing the harness).
    #[arg(long, value_parser = parse_mutation)]
    pub mutation: Option<Mutation>,
    /// Shrink each failing instance to a small counterexample.
    #[arg(long)]
    pub minimize: bool,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub what: InstanceArgs,
    #[arg(long, default_value_t = 1)]
    pub nmin: u64,
    #[arg(long)]
    pub nmax: u64,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub kmin: i64,
    /// Last k; defaults to n − 1 for each row.
    #[arg(long, allow_negative_numbers = true)]
    pub kmax: Option<i64>,
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub s: i64,
}

#[derive(Debug, Clone, Args)]
pub struct SplitArgs {
    #[arg(long)]
    pub n: u64,
    #[arg(long, allow_negative_numbers = true)]
    pub k: i64,
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    Mutation::ALL
        .into_iter()
        .find(|m| m.to_string() == s)
        .ok_or_else(|| format!("unknown mutation {s:?}"))
}

/// One evaluated instance, as printed by `eval` and `table`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub n: u64,
    pub k: i64,
    pub s: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<FunctionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<u64>,
    pub identity: String,
    /// A plain integer or fraction for rational values, otherwise the
    /// element written in the ζ_n power basis.
    pub value: String,
    /// Coefficients over 1, ζ_n, …, ζ_n^{φ(n)−1}; only for irrational values.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<String>>,
    pub approx_re: f64,
    pub approx_im: f64,
}

pub const CSV_HEADER: &str = "n,k,s,f,identity,value,approx_re,approx_im";

/// Result of one evaluation in either backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Evaluated {
    Exact(CycElem),
    Float(Complex64),
}

impl OutputRecord {
    fn new(target: Target, n: u64, k: i64, s: i64, args: &InstanceArgs, value: &Evaluated) -> Self {
        let (rendered, basis, approx) = match value {
            Evaluated::Exact(v) => match v.as_rational() {
                Some(q) => (q.to_string(), None, v.to_complex()),
                None => (
                    v.to_string(),
                    Some(v.coeffs().iter().map(ToString::to_string).collect()),
                    v.to_complex(),
                ),
            },
            Evaluated::Float(z) => (Float::render(z), None, *z),
        };
        OutputRecord {
            n,
            k,
            s,
            f: args.f.clone(),
            d: args.d,
            n1: args.n1,
            identity: target.name().to_string(),
            value: rendered,
            basis,
            approx_re: approx.re,
            approx_im: approx.im,
        }
    }

    pub fn to_csv_row(&self) -> String {
        let f = self.f.as_ref().map(ToString::to_string).unwrap_or_default();
        let fields = [
            self.n.to_string(),
            self.k.to_string(),
            self.s.to_string(),
            f,
            self.identity.clone(),
            self.value.clone(),
            self.approx_re.to_string(),
            self.approx_im.to_string(),
        ];
        fields.iter().map(|x| csv_field(x)).collect::<Vec<_>>().join(",")
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} n={} k={} s={}", self.identity, self.n, self.k, self.s);
        if let Some(f) = &self.f {
            let _ = write!(out, " f={f}");
        }
        if let Some(d) = self.d {
            let _ = write!(out, " d={d}");
        }
        if let Some(n1) = self.n1 {
            let _ = write!(out, " n1={n1}");
        }
        let _ = write!(out, " = {}", self.value);
        if self.basis.is_some() {
            let _ = write!(out, "  (~ {})", Float::render(&Complex64::new(self.approx_re, self.approx_im)));
        }
        out
    }
}

fn csv_field(x: &str) -> String {
    if x.contains([',', '"', '\n']) {
        format!("\"{}\"", x.replace('"', "\"\""))
    } else {
        x.to_string()
    }
}

fn require<T: Clone>(v: &Option<T>, what: &str, target: Target) -> Result<T, SumError> {
    v.clone()
        .ok_or_else(|| SumError::NotApplicable(format!("{} needs --{what}", target.name())))
}

fn evaluate_in<T: Scalar>(
    target: Target,
    args: &InstanceArgs,
    n: u64,
    k: i64,
    s: i64,
) -> Result<T::Value, SumError> {
    if n == 0 {
        return Err(SumError::ZeroModulus);
    }
    let function = || -> Result<_, SumError> { Ok(require(&args.f, "f", target)?.build::<T>(n)?) };
    let spec = || require(&args.f, "f", target);
    let d = || require(&args.d, "d", target);
    match target {
        Target::Bruteforce => Ok(sums::s_bruteforce(&function()?, k, s)),
        Target::T => sums::t_bruteforce::<T>(n, k, s, d()?),
        Target::Ramanujan => Ok(T::constant(n, T::from_i64(sums::ramanujan_formula(n, k)))),
        Target::GcdDft => sums::gcd_dft::<T>(n, k),
        Target::Closed(id) => match id {
            Identity::Lemma1 => sums::t_lemma1::<T>(n, k, s, d()?),
            Identity::Lemma2 => sums::t_lemma2::<T>(n, k, s, d()?),
            Identity::Lemma3 => Ok(T::constant(n, sums::t_lemma3::<T>(n, k, s, d()?)?)),
            Identity::Thm1 => sums::s_theorem1(&function()?, k, s),
            Identity::Thm2 => sums::s_theorem2(&function()?, k, s),
            Identity::Thm3 => Ok(T::constant(n, sums::s_theorem3(&function()?, k, s)?)),
            Identity::Thm4 => {
                let n1 = require(&args.n1, "n1", target)?;
                if n1 == 0 || n % n1 != 0 {
                    return Err(SumError::DNotDividing { n, d: n1 });
                }
                sums::s_split::<T>(&spec()?, n1, n / n1, k, s)
            }
            Identity::Thm5 => sums::s_theorem5::<T>(&spec()?, n, k, s),
            Identity::Cor2 => sums::corollary2::<T>(&spec()?, n, k, s),
            Identity::Cor3 => sums::corollary3::<T>(&spec()?, n, k, s),
            Identity::GcdDft => sums::gcd_dft::<T>(n, k),
        },
    }
}

pub fn evaluate(mode: Mode, target: Target, args: &InstanceArgs, n: u64, k: i64, s: i64) -> Result<Evaluated, SumError> {
    match mode {
        Mode::Exact => evaluate_in::<Exact>(target, args, n, k, s).map(Evaluated::Exact),
        Mode::Float => evaluate_in::<Float>(target, args, n, k, s).map(Evaluated::Float),
    }
}

fn write_out(path: &Option<PathBuf>, contents: &str) -> Result<(), String> {
    if let Some(path) = path {
        std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn records_output(records: &[OutputRecord], format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(records).expect("records serialize") + "\n",
        Format::Csv => {
            let mut out = String::from(CSV_HEADER);
            out.push('\n');
            for r in records {
                out.push_str(&r.to_csv_row());
                out.push('\n');
            }
            out
        }
        Format::Text => records.iter().map(|r| r.to_text() + "\n").collect(),
    }
}

/// Status of a finished command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The verification sweep found failures.
    Failed,
    /// A typed error, such as a violated hypothesis.
    Error,
}

impl From<Status> for ExitCode {
    fn from(s: Status) -> Self {
        match s {
            Status::Ok => ExitCode::SUCCESS,
            Status::Failed => ExitCode::from(1),
            Status::Error => ExitCode::from(2),
        }
    }
}

fn cmd_eval(cli: &Cli, args: &EvalArgs, stdout: &mut dyn std::io::Write) -> Result<Status, String> {
    let value = evaluate(cli.mode, args.what.target, &args.what, args.n, args.k, args.s)
        .map_err(|e| e.to_string())?;
    let record = OutputRecord::new(args.what.target, args.n, args.k, args.s, &args.what, &value);
    let records = [record];
    write_out(&cli.out, &records_output(&records, Format::Json))?;
    let _ = stdout.write_all(records_output(&records, cli.format).as_bytes());
    Ok(Status::Ok)
}

fn cmd_table(cli: &Cli, args: &TableArgs, stdout: &mut dyn std::io::Write) -> Result<Status, String> {
    if args.nmin == 0 {
        return Err("axis bounds: n starts at 1".to_string());
    }
    let mut records = Vec::new();
    let mut omitted = 0usize;
    for n in args.nmin..=args.nmax {
        let kmax = args.kmax.unwrap_or(n as i64 - 1);
        for k in args.kmin..=kmax {
            match evaluate(cli.mode, args.what.target, &args.what, n, k, args.s) {
                Ok(v) => records.push(OutputRecord::new(args.what.target, n, k, args.s, &args.what, &v)),
                Err(e) if e.is_out_of_hypothesis() && !matches!(e, SumError::NotApplicable(_)) => omitted += 1,
                Err(e) => return Err(e.to_string()),
            }
        }
    }
    if omitted > 0 {
        eprintln!("{omitted} cells outside the hypothesis of {} omitted", args.what.target.name());
    }
    write_out(&cli.out, &records_output(&records, Format::Json))?;
    let _ = stdout.write_all(records_output(&records, cli.format).as_bytes());
    Ok(Status::Ok)
}

fn cmd_split(cli: &Cli, args: &SplitArgs, stdout: &mut dyn std::io::Write) -> Result<Status, String> {
    let sp = sums::split_by_valuation(args.n, args.k).map_err(|e| e.to_string())?;
    let json = serde_json::to_string_pretty(&sp).expect("splitting serializes") + "\n";
    write_out(&cli.out, &json)?;
    let text = match cli.format {
        Format::Json => json,
        Format::Csv => format!("n,k,n1,n2,n1_inv,n2_inv\n{},{},{},{},{},{}\n", sp.n, sp.k, sp.n1, sp.n2, sp.n1_inv, sp.n2_inv),
        Format::Text => format!(
            "n = {} = {} * {} for k = {}; n1^-1 = {} (mod {}), n2^-1 = {} (mod {})\n",
            sp.n, sp.n1, sp.n2, sp.k, sp.n1_inv, sp.n2, sp.n2_inv, sp.n1
        ),
    };
    let _ = stdout.write_all(text.as_bytes());
    Ok(Status::Ok)
}

pub fn sweep_config(mode: Mode, args: &VerifyArgs) -> SweepConfig {
    let mut config = SweepConfig { n_min: args.nmin, n_max: args.nmax, mode, ..SweepConfig::default() };
    if let Some(ids) = &args.ids {
        config.identities = ids.clone();
    }
    match &args.functions {
        Some(fs) => config.functions = fs.clone(),
        None if mode == Mode::Float => {
            config.functions.extend(["gcdpow:1/2", "sigmagcd:1/2"].map(|s| s.parse().expect("valid spec")));
        }
        None => {}
    }
    if let Some(k) = &args.k {
        config.k = ResidueSet::List(k.clone());
    }
    if let Some(s) = &args.s {
        config.s = ResidueSet::List(s.clone());
    }
    if let Some(t) = args.threads {
        config.threads = t;
    }
    config.mutation = args.mutation;
    config
}

fn cmd_verify(cli: &Cli, args: &VerifyArgs, stdout: &mut dyn std::io::Write) -> Result<Status, String> {
    let config = sweep_config(cli.mode, args);
    let report = verify::run_sweep(&config).map_err(|e| e.to_string())?;
    let json = report.to_json() + "\n";
    write_out(&cli.out, &json)?;
    let mut text = match cli.format {
        Format::Json => json,
        Format::Csv => {
            let mut out = String::from("identity,checked,passed,skipped,failed\n");
            for t in &report.identities {
                let x = &t.tally;
                let _ = writeln!(out, "{},{},{},{},{}", t.identity, x.checked, x.passed, x.skipped, x.failed);
            }
            out
        }
        Format::Text => {
            let mut out = report.to_text();
            let _ = writeln!(out, "\nfinished in {:.2?}", report.duration);
            out
        }
    };
    if args.minimize {
        let mut seen = Vec::new();
        for f in &report.failures {
            if seen.contains(&f.identity) {
                continue;
            }
            seen.push(f.identity);
            let m = minimize_failure(&f.instance, f.identity, config.mode, config.mutation);
            let _ = writeln!(text, "smallest {} counterexample: {}", f.identity, m.instance);
        }
    }
    let _ = stdout.write_all(text.as_bytes());
    Ok(if report.is_success() { Status::Ok } else { Status::Failed })
}

/// Runs a parsed command, writing results to `stdout` and diagnostics to
/// standard error.
pub fn run(cli: &Cli, stdout: &mut dyn std::io::Write) -> Status {
    let result = match &cli.command {
        Command::Eval(a) => cmd_eval(cli, a, stdout),
        Command::Verify(a) => cmd_verify(cli, a, stdout),
        Command::Table(a) => cmd_table(cli, a, stdout),
        Command::Split(a) => cmd_split(cli, a, stdout),
    };
    match result {
        Ok(status) => status,
        Err(msg) => {
            eprintln!("error: {msg}");
            Status::Error
        }
    }
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let status = run(&cli, &mut stdout);
    let _ = stdout.flush();
    status.into()
}
