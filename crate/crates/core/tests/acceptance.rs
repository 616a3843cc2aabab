//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.
//!
//! `cargo test -p cheney-sharma --test acceptance`

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cheney_sharma::properties::{
    test_corpus, trial_rng, verify_abel_jensen, verify_bernstein_degeneration, verify_difference,
    verify_lipschitz_preservation, verify_marginal, verify_modulus_axioms, verify_partition,
    verify_univariate_reproduction, VerificationReport,
};
use cheney_sharma::{bivariate_weights, eval_g, FunctionDescriptor, LipschitzSpec, OperatorParams, SimplexPoint};
use rand::Rng;

const SEED: u64 = 20_240_601;

struct Verdict {
    passed: bool,
    detail: String,
}

impl Verdict {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

/// Folds a batch of reports into one verdict, tracking the worst residual.
struct Tally {
    scans: usize,
    failed: Vec<String>,
    worst: f64,
}

impl Default for Tally {
    fn default() -> Self {
        Self { scans: 0, failed: Vec::new(), worst: f64::NEG_INFINITY }
    }
}

impl Tally {
    fn add(&mut self, label: impl Into<String>, report: &VerificationReport) {
        self.scans += 1;
        if report.max_residual.is_nan() || report.max_residual > self.worst {
            self.worst = report.max_residual;
        }
        if !report.passed {
            let first = report.violations.first().map(|v| v.input.clone()).unwrap_or_default();
            self.failed.push(format!("{} [{} violations, e.g. {first}]", label.into(), report.violations.len()));
        }
    }

    fn verdict(self, tol: f64, budget: Option<(Duration, Duration)>) -> Verdict {
        let mut detail = format!("{} scans, worst residual {:.3e} (tol {tol:e})", self.scans, self.worst);
        let mut passed = self.failed.is_empty();
        if let Some((elapsed, limit)) = budget {
            detail.push_str(&format!(", {:.2?} (limit {:.0?})", elapsed, limit));
            passed &= elapsed < limit;
        }
        if !self.failed.is_empty() {
            detail.push_str(&format!("; failing: {}", self.failed.join("; ")));
        }
        Verdict::new(passed, detail)
    }
}

fn params(n: usize, beta: f64) -> OperatorParams {
    OperatorParams::new(n, beta).expect("valid parameters")
}

fn descriptor(s: &str) -> FunctionDescriptor {
    s.parse().expect("valid descriptor")
}

const BETA_GRID: [f64; 5] = [0.0, 0.01, 0.1, 1.0, 10.0];
const THEOREM_DEGREES: [usize; 4] = [2, 5, 10, 20];
const THEOREM_BETAS: [f64; 3] = [0.0, 0.1, 1.0];

fn abel_jensen() -> Verdict {
    let tol = 1e-11;
    let start = Instant::now();
    let mut tally = Tally::default();
    for beta in [0.0, 0.05, 0.3, 1.0] {
        let report = verify_abel_jensen(30, beta, 1000, SEED, tol).expect("scan runs");
        tally.add(format!("beta={beta}"), &report);
    }
    tally.verdict(tol, Some((start.elapsed(), Duration::from_secs(1))))
}

fn partition_of_unity() -> Verdict {
    let tol = 1e-12;
    let start = Instant::now();
    let mut tally = Tally::default();
    for n in 1..=100 {
        for beta in BETA_GRID {
            let report = verify_partition(params(n, beta), 100, SEED + n as u64, tol).expect("scan runs");
            tally.add(format!("n={n} beta={beta}"), &report);
        }
    }
    tally.verdict(tol, Some((start.elapsed(), Duration::from_secs(30))))
}

fn bernstein_degeneration() -> Verdict {
    let tol = 1e-12;
    let corpus = test_corpus();
    let start = Instant::now();
    let mut tally = Tally::default();
    for n in 1..=50 {
        let report = verify_bernstein_degeneration(&corpus, n, 100, SEED + n as u64, tol).expect("scan runs");
        tally.add(format!("n={n}"), &report);
    }
    tally.verdict(tol, Some((start.elapsed(), Duration::from_secs(10))))
}

fn univariate_reproduction() -> Verdict {
    let tol = 1e-12;
    let mut tally = Tally::default();
    for n in 1..=100 {
        for beta in BETA_GRID {
            let report = verify_univariate_reproduction(params(n, beta), 100, SEED + n as u64, tol).expect("scan runs");
            tally.add(format!("n={n} beta={beta}"), &report);
        }
    }
    tally.verdict(tol, None)
}

fn marginal_collapse() -> Verdict {
    let tol = 1e-11;
    let mut tally = Tally::default();
    for n in 1..=50 {
        for beta in BETA_GRID {
            let report = verify_marginal(params(n, beta), 100, SEED + n as u64, tol).expect("scan runs");
            tally.add(format!("n={n} beta={beta}"), &report);
        }
    }
    tally.verdict(tol, None)
}

fn difference_expansion() -> Verdict {
    let tol = 1e-10;
    let corpus = test_corpus();
    let start = Instant::now();
    let mut tally = Tally::default();
    for n in 1..=20 {
        for beta in THEOREM_BETAS {
            let report = verify_difference(&corpus, params(n, beta), 200, SEED + n as u64, tol).expect("scan runs");
            tally.add(format!("n={n} beta={beta}"), &report);
        }
    }
    tally.verdict(tol, Some((start.elapsed(), Duration::from_secs(60))))
}

fn lipschitz_preservation() -> Verdict {
    let tol = 1e-9;
    let mut tally = Tally::default();
    // 5 t1 lies in Lip_5(1, S) and G reproduces it, so declaring M = 1 must fail everywhere
    let scaled = descriptor("poly:1,0,5");
    let understated = LipschitzSpec::new(1.0, 1.0).expect("valid class");
    let mut controls = 0;
    let mut controls_failed = 0;
    for mu in [0.5, 1.0] {
        let f = descriptor(&format!("absdist:0.5,0.5,{mu}"));
        let honest = LipschitzSpec::new(mu, 1.0).expect("valid class");
        for n in THEOREM_DEGREES {
            for beta in THEOREM_BETAS {
                let p = params(n, beta);
                let report = verify_lipschitz_preservation(&f, honest, p, 10_000, SEED, tol).expect("scan runs");
                tally.add(format!("mu={mu} n={n} beta={beta}"), &report);
                if mu == 1.0 {
                    let control = verify_lipschitz_preservation(&scaled, understated, p, 10_000, SEED, tol)
                        .expect("scan runs");
                    controls += 1;
                    controls_failed += usize::from(!control.passed);
                }
            }
        }
    }
    // absdist with M = 1/5 of its true constant, at the reference cell
    let absdist = descriptor("absdist:0.5,0.5,1");
    let fifth = LipschitzSpec::new(1.0, 0.2).expect("valid class");
    let control = verify_lipschitz_preservation(&absdist, fifth, params(10, 0.3), 10_000, 7, tol).expect("scan runs");
    controls += 1;
    controls_failed += usize::from(!control.passed);

    let mut verdict = tally.verdict(tol, None);
    verdict.passed &= controls_failed == controls;
    verdict.detail.push_str(&format!("; negative controls failed as required in {controls_failed}/{controls} scans"));
    verdict
}

fn modulus_preservation() -> Verdict {
    let tol = 1e-10;
    let mut tally = Tally::default();
    for omega in ["sqrtsum", "minsum:1"] {
        let omega = descriptor(omega);
        for n in THEOREM_DEGREES {
            for beta in THEOREM_BETAS {
                match verify_modulus_axioms(&omega, params(n, beta), 10_000, SEED, tol) {
                    Ok(report) => tally.add(format!("{omega} n={n} beta={beta}"), &report),
                    Err(e) => tally.failed.push(format!("{omega} n={n} beta={beta}: {e}")),
                }
            }
        }
    }
    tally.verdict(tol, None)
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_cheney-sharma"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn determinism() -> Verdict {
    let commands: [&[&str]; 8] = [
        &["verify", "abel-jensen", "--n", "30", "--beta", "0.3", "--trials", "200", "--seed", "5"],
        &["verify", "partition", "--n", "100", "--beta", "10", "--trials", "100", "--seed", "42", "--tol", "1e-12"],
        &["verify", "bernstein0", "--n", "30", "--trials", "100", "--seed", "3"],
        &["verify", "difference", "--n", "12", "--beta", "0.5", "--trials", "50", "--seed", "9"],
        &["verify", "marginal", "--n", "40", "--beta", "1", "--trials", "100", "--seed", "1"],
        &["verify", "lipschitz", "--f", "absdist:0.5,0.5,1", "--mu", "1", "--M", "1", "--n", "10", "--beta", "0.3", "--trials", "10000", "--seed", "7", "--tol", "1e-9"],
        &["verify", "lipschitz", "--f", "absdist:0.5,0.5,1", "--mu", "1", "--M", "0.2", "--n", "10", "--beta", "0.3", "--trials", "2000", "--seed", "7", "--tol", "1e-9"],
        &["verify", "modulus", "--f", "sqrtsum", "--n", "8", "--beta", "0.2", "--trials", "5000", "--seed", "11"],
    ];
    let mut mismatched = Vec::new();
    for args in commands {
        let first = run_cli(args);
        let second = run_cli(args);
        if first != second || first.1.is_empty() {
            mismatched.push(args[1]);
        }
    }
    Verdict::new(
        mismatched.is_empty(),
        format!("{} verify commands rerun; mismatches: {mismatched:?}", commands.len()),
    )
}

fn performance() -> Verdict {
    let f = descriptor("expsum");
    let x = SimplexPoint::new(0.3, 0.25).expect("point");
    let start = Instant::now();
    let value = eval_g(&f, params(1000, 0.5), x).expect("evaluates");
    let big = start.elapsed();

    // warm the log-factorial cache, then take the best of several runs
    let mut rng = trial_rng(SEED, 0);
    let _ = bivariate_weights(params(100, 1.0), x);
    let small = (0..20)
        .map(|_| {
            let p = SimplexPoint::new(rng.gen_range(0.0..0.5), rng.gen_range(0.0..0.5)).expect("point");
            let start = Instant::now();
            let w = bivariate_weights(params(100, 1.0), p).expect("weights");
            std::hint::black_box(w);
            start.elapsed()
        })
        .min()
        .expect("runs");
    let passed = value.is_finite() && big < Duration::from_secs(2) && small < Duration::from_millis(10);
    Verdict::new(
        passed,
        format!("G at n=1000: {big:.2?} (limit 2s, value {value:.6}); weights at n=100: {small:.2?} (limit 10ms)"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("Abel-Jensen identity residual", abel_jensen),
        ("partition of unity and nonnegativity", partition_of_unity),
        ("beta = 0 Bernstein degeneration", bernstein_degeneration),
        ("univariate constant and linear reproduction", univariate_reproduction),
        ("marginal collapse onto the univariate operator", marginal_collapse),
        ("difference expansion", difference_expansion),
        ("Lipschitz preservation with negative control", lipschitz_preservation),
        ("modulus-of-continuity preservation", modulus_preservation),
        ("determinism of verify output", determinism),
        ("performance", performance),
    ];
    let mut failures = 0;
    for (idx, (name, criterion)) in criteria.iter().enumerate() {
        let verdict = criterion();
        let tag = if verdict.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {}: {name}: {}", idx + 1, verdict.detail);
        if !verdict.passed {
            failures += 1;
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
