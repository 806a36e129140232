//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use menon::arith;
use menon::cyclo::{cyclotomic_poly, CycElem};
use menon::evenfn::{make_gcd_power, make_ramanujan, FunctionSpec};
use menon::scalar::{Exact, Exponent};
use menon::sums::{self, Mutation};
use menon::verify::{run_sweep, Identity, Mode, SweepConfig, VerificationReport};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

fn zeta_times(n: u64, a: i64, c: i64) -> CycElem {
    CycElem::root_of_unity(n, a).unwrap().scale(&int(c))
}

fn sweep(n_min: u64, n_max: u64, ids: &[Identity]) -> SweepConfig {
    SweepConfig { n_min, n_max, identities: ids.to_vec(), ..SweepConfig::default() }
}

fn run(config: &SweepConfig) -> VerificationReport {
    run_sweep(config).expect("valid sweep config")
}

/// Every listed identity has zero failures and at least one checked instance.
fn clean(report: &VerificationReport, ids: &[Identity]) -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for &id in ids {
        let t = report.tally(id).copied().unwrap_or_default();
        ok &= t.failed == 0 && t.checked > 0 && t.checked == t.passed;
        parts.push(format!("{id} {}/{} ok, {} skipped", t.passed, t.checked, t.skipped));
    }
    if let Some(f) = report.failures.first() {
        parts.push(format!("first failure {} {}: {} vs {}", f.identity, f.instance, f.expected, f.got));
    }
    let msg = parts.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn lemma_grid() -> VerificationReport {
    run(&sweep(1, 64, &[Identity::Lemma1, Identity::Lemma2, Identity::Lemma3]))
}

fn criterion1(r: &VerificationReport) -> Outcome {
    let expected: u64 = (1..=64u64).map(|n| arith::tau(n).unwrap() * n * n).sum();
    let t = r.tally(Identity::Lemma1).unwrap();
    check(t.checked == expected, format!("checked {} of {expected} instances", t.checked))?;
    Ok(format!("{}, shared sweep took {:.1?}", clean(r, &[Identity::Lemma1])?, r.duration))
}

fn criterion2(r: &VerificationReport) -> Outcome {
    for id in [Identity::Lemma2, Identity::Lemma3] {
        let t = r.tally(id).unwrap();
        check(t.skipped > 0, format!("{id} skipped nothing"))?;
        check(t.checked + t.skipped == r.tally(Identity::Lemma1).unwrap().checked, format!("{id} lost instances"))?;
    }
    clean(r, &[Identity::Lemma2, Identity::Lemma3])
}

fn criterion3() -> Outcome {
    let r = run(&sweep(1, 48, &[Identity::Thm1]));
    let expected: u64 = 6 * (1..=48u64).map(|n| n * n).sum::<u64>();
    let t = r.tally(Identity::Thm1).unwrap();
    check(t.checked == expected, format!("checked {} of {expected} instances", t.checked))?;
    clean(&r, &[Identity::Thm1])
}

fn criterion4() -> Outcome {
    let ids = [Identity::Thm2, Identity::Thm3, Identity::Thm5, Identity::Cor2, Identity::Cor3];
    let main = clean(&run(&sweep(1, 64, &ids)), &ids)?;
    let split = clean(&run(&sweep(1, 60, &[Identity::Thm4])), &[Identity::Thm4])?;
    Ok(format!("{main}; {split}"))
}

fn criterion5() -> Outcome {
    let g = |n, m| make_gcd_power::<Exact>(n, Exponent::Int(m)).unwrap();
    let brute = |n, m, k, s| sums::s_bruteforce(&g(n, m), k, s);
    let c12 = make_ramanujan::<Exact>(12).unwrap();
    let checks: Vec<(&str, bool)> = vec![
        ("S_gcd1(6,0,1) = 8", brute(6, 1, 0, 1).as_rational() == Some(int(8))),
        ("S_gcd1(4,1,1) = 2i", brute(4, 1, 1, 1) == zeta_times(4, 1, 2)),
        ("S_gcd1(8,2,1) = 8i", brute(8, 1, 2, 1) == zeta_times(8, 2, 8)),
        ("S_gcd2(4,1,1) = 12i", brute(4, 2, 1, 1) == zeta_times(4, 1, 12)),
        ("S_ramanujan(12,3,1) = 4i", sums::s_bruteforce(&c12, 3, 1) == zeta_times(12, 3, 4)),
        ("c_6(2) = -1", sums::ramanujan_bruteforce(6, 2).as_rational() == Some(int(-1))),
        ("c_4(2) = -2", sums::ramanujan_bruteforce(4, 2).as_rational() == Some(int(-2))),
        ("F_2(9) = 17", sums::f_m::<Exact>(Exponent::Int(2), 9) == Ok(int(17))),
        ("G_1(4) = 5", sums::g_m::<Exact>(Exponent::Int(1), 4) == Ok(int(5))),
        ("Phi_12 = x^4 - x^2 + 1", cyclotomic_poly(12).unwrap().coeffs() == [1, 0, -1, 0, 1]),
        // closed forms at the same points
        ("thm3 gcd1 (6,0,1)", sums::s_theorem3(&g(6, 1), 0, 1) == Ok(int(8))),
        ("thm2 gcd1 (4,1,1)", sums::s_theorem2(&g(4, 1), 1, 1) == Ok(zeta_times(4, 1, 2))),
        ("thm5 gcd1 (8,2,1)", sums::s_theorem5::<Exact>(&"gcdpow:1".parse().unwrap(), 8, 2, 1) == Ok(zeta_times(8, 2, 8))),
        ("cor2 gcd2 (4,1,1)", sums::cor_gcd_power::<Exact>(4, 1, 1, Exponent::Int(2)) == Ok(zeta_times(4, 1, 12))),
        ("thm1 ramanujan (12,3,1)", sums::s_theorem1(&c12, 3, 1) == Ok(zeta_times(12, 3, 4))),
        ("formula c_6(2)", sums::ramanujan_formula(6, 2) == -1),
        ("formula c_4(2)", sums::ramanujan_formula(4, 2) == -2),
    ];
    let bad: Vec<&str> = checks.iter().filter(|(_, ok)| !ok).map(|(name, _)| *name).collect();
    check(bad.is_empty(), format!("wrong: {}", bad.join(", ")))?;
    Ok(format!("{} spot values", checks.len()))
}

fn criterion6() -> Outcome {
    for n in 1..=500u64 {
        let f = make_gcd_power::<Exact>(n, Exponent::Int(1)).unwrap();
        let menon = arith::euler_phi(n).unwrap() * arith::tau(n).unwrap();
        check(
            sums::s_theorem3(&f, 0, 1) == Ok(int(menon as i64)),
            format!("thm3 at n = {n} differs from phi(n) tau(n) = {menon}"),
        )?;
    }
    let mut checked = 0u64;
    for n in 1..=128u64 {
        let phi = arith::euler_phi(n).unwrap() as i64;
        for k in 0..n as i64 {
            if sums::split_by_valuation(n, k).is_err() {
                continue;
            }
            let tau = arith::tau(arith::gcd_mod(n, k)).unwrap() as i64;
            for s in (0..n as i64).filter(|&s| arith::gcd_mod(n, s) == 1) {
                let expected = zeta_times(n, k * s, phi * tau);
                let got = sums::cor_m1_gcd::<Exact>(n, k, s, Exponent::Int(1));
                check(got.as_ref() == Ok(&expected), format!("cor3 m = 1 at n={n} k={k} s={s}: {got:?}"))?;
                checked += 1;
            }
        }
    }
    Ok(format!("thm3 for n <= 500; cor3 m = 1 on {checked} instances"))
}

fn criterion7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d656e6f6e);
    let specs = FunctionSpec::builtins();
    for _ in 0..500 {
        let n = rng.gen_range(1..=64u64);
        let divisors = arith::divisors(n).unwrap();
        let d = divisors[rng.gen_range(0..divisors.len())];
        let k = rng.gen_range(-(n as i64)..2 * n as i64);
        let s = rng.gen_range(-(n as i64)..2 * n as i64);
        let t = rng.gen_range(1..=3u64);
        let spec = &specs[rng.gen_range(0..specs.len())];
        let base = sums::t_lemma1::<Exact>(n, k, s, d).unwrap();
        let shifted = sums::t_lemma1_shifted::<Exact>(n, k, s, d, t).unwrap();
        check(base == shifted, format!("T at n={n} k={k} s={s} d={d} t={t}"))?;
        let f = spec.build::<Exact>(n).unwrap();
        let base = sums::s_theorem1(&f, k, s).unwrap();
        let shifted = sums::s_theorem1_shifted(&f, k, s, t).unwrap();
        check(base == shifted, format!("S_{spec} at n={n} k={k} s={s} t={t}"))?;
    }
    Ok("500 random instances, shifts t in 1..=3".to_string())
}

fn criterion8() -> Outcome {
    let base = run(&SweepConfig::default());
    check(base.is_success(), "default sweep fails without a mutation")?;
    let mut parts = Vec::new();
    for m in Mutation::ALL {
        let r = run(&SweepConfig { mutation: Some(m), ..SweepConfig::default() });
        let failed = r.total().failed;
        check(failed > 0, format!("{m} went unnoticed"))?;
        parts.push(format!("{m}: {failed}"));
    }
    Ok(format!("failures per mutation: {}", parts.join(", ")))
}

fn criterion9() -> Outcome {
    let config = SweepConfig {
        mode: Mode::Float,
        functions: ["gcdpow:1/2", "sigmagcd:1/2"].map(|s| s.parse().unwrap()).to_vec(),
        ..sweep(1, 48, &[Identity::Cor2, Identity::Cor3])
    };
    clean(&run(&config), &[Identity::Cor2, Identity::Cor3])
}

fn criterion10() -> Outcome {
    let dir = std::env::temp_dir().join(format!("menon-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut reports = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.join(format!("report-{threads}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_menon"))
            .args(["verify", "--nmax", "24", "--all", "--threads", threads, "--out"])
            .arg(&path)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        check(status.success(), format!("verify exited with {status}"))?;
        reports.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let _ = std::fs::remove_dir_all(&dir);
    check(reports[0] == reports[1], "reports differ between 1 and 4 threads")?;
    Ok(format!("{} identical bytes", reports[0].len()))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let lemmas = lemma_grid();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 T_n(k,s,d) closed form, n <= 64", Box::new(|| criterion1(&lemmas))),
        ("2 T_n(k,s,d) under valuation / divisibility hypotheses", Box::new(|| criterion2(&lemmas))),
        ("3 general evaluation, both forms and decomposition, n <= 48", Box::new(criterion3)),
        ("4 hypothesis-gated closed forms and coprime splittings", Box::new(criterion4)),
        ("5 spot values", Box::new(criterion5)),
        ("6 Menon's identity and its k-twisted form", Box::new(criterion6)),
        ("7 choice of delta' is invisible", Box::new(criterion7)),
        ("8 seeded mutations are detected", Box::new(criterion8)),
        ("9 float mode, m = 1/2", Box::new(criterion9)),
        ("10 reports are identical across widths", Box::new(criterion10)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let t = Instant::now();
        let outcome = run();
        let elapsed = t.elapsed();
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} ({elapsed:.1?})"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} ({elapsed:.1?})");
            }
        }
    }
    println!("{} of {} criteria passed in {:.1?}", criteria.len() - failed, criteria.len(), start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
