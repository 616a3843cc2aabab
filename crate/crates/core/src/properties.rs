//! Randomized scanners for the identities and preservation properties of the
//! operators, reporting through [`VerificationReport`].
//!
//! Trial `i` of a scan with seed `s` draws from a ChaCha8 stream seeded with
//! `splitmix64(s ^ i)`, so trials are independent of each other and of the
//! number of worker threads. Reports are merged in trial order, which makes
//! parallel and serial runs produce identical output.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::abel::{bivariate_weights, univariate_weights};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::model::{
    componentwise_leq, holder_distance, Axis, FunctionDescriptor, LipschitzSpec, OperatorParams,
    SimplexPoint,
};
use crate::operators::{eval_q, DifferenceKernel, LatticeSamples};
use crate::oracles::{abel_jensen_residual, bernstein_simplex};

/// One failed trial: a description of its inputs and the residual by which
/// the checked inequality or identity was missed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub input: String,
    pub residual: f64,
}

/// Outcome of a scan. `passed` holds exactly when `violations` is empty,
/// i.e. when every residual is at most `tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub trials: u64,
    pub seed: u64,
    pub tolerance: f64,
    pub max_residual: f64,
    pub passed: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    fn from_outcomes(
        check: &str,
        trials: u64,
        seed: u64,
        tolerance: f64,
        outcomes: impl IntoIterator<Item = Violation>,
    ) -> Self {
        let mut max_residual = f64::NEG_INFINITY;
        let mut violations = Vec::new();
        for outcome in outcomes {
            if outcome.residual.is_nan() || max_residual.is_nan() {
                max_residual = f64::NAN;
            } else {
                max_residual = max_residual.max(outcome.residual);
            }
            if !(outcome.residual <= tolerance) {
                violations.push(outcome);
            }
        }
        Self {
            check: check.to_owned(),
            trials,
            seed,
            tolerance,
            max_residual,
            passed: violations.is_empty(),
            violations,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random stream of trial `trial` in a scan seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ trial))
}

/// Uniform point of the simplex: a uniform point of the unit square,
/// reflected through `(1/2, 1/2)` when it lands above the diagonal.
pub fn sample_point<R: Rng>(rng: &mut R) -> SimplexPoint {
    let a: f64 = rng.gen();
    let b: f64 = rng.gen();
    let (a, b) = if a + b > 1.0 { (1.0 - a, 1.0 - b) } else { (a, b) };
    SimplexPoint::new(a, b).expect("reflected sample lies in the simplex")
}

/// Pair `lo <= hi`: componentwise min and max of two uniform points,
/// redrawn whenever the max leaves the simplex.
pub fn sample_ordered_pair<R: Rng>(rng: &mut R) -> (SimplexPoint, SimplexPoint) {
    loop {
        let a = sample_point(rng);
        let b = sample_point(rng);
        if let Ok(hi) = SimplexPoint::new(a.x1().max(b.x1()), a.x2().max(b.x2())) {
            let lo = SimplexPoint::new(a.x1().min(b.x1()), a.x2().min(b.x2()))
                .expect("componentwise min stays in the simplex");
            return (lo, hi);
        }
    }
}

/// Pair `(u, v)` with `u + v` in the simplex: a uniform `w` split
/// coordinatewise at uniform fractions.
pub fn sample_additive_pair<R: Rng>(rng: &mut R) -> (SimplexPoint, SimplexPoint) {
    let w = sample_point(rng);
    let t1: f64 = rng.gen();
    let t2: f64 = rng.gen();
    let u1 = w.x1() * t1;
    let u2 = w.x2() * t2;
    let u = SimplexPoint::new(u1, u2).expect("sub-point of a simplex point");
    let v = SimplexPoint::new(w.x1() - u1, w.x2() - u2).expect("sub-point of a simplex point");
    (u, v)
}

fn run_trials<F>(check: &str, trials: u64, seed: u64, tol: f64, trial: F) -> Result<VerificationReport>
where
    F: Fn(&mut ChaCha8Rng) -> Result<Vec<Violation>> + Sync,
{
    check_trials(trials)?;
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|i| trial(&mut trial_rng(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::from_outcomes(check, trials, seed, tol, per_trial.into_iter().flatten()))
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    Ok(())
}

fn outcome(input: String, residual: f64) -> Vec<Violation> {
    vec![Violation { input, residual }]
}

/// Function corpus used by the identity scans.
pub fn test_corpus() -> Vec<FunctionDescriptor> {
    [
        "const:1.5",
        "proj:1",
        "proj:2",
        "poly:2,0,1;1,1,-0.5;0,3,2",
        "absdist:0.5,0.5,1",
        "absdist:0.2,0.3,0.5",
        "sqrtsum",
        "minsum:0.6",
        "expsum",
    ]
    .iter()
    .map(|s| s.parse().expect("corpus descriptor"))
    .collect()
}

/// Abel–Jensen relative residual at random `(u, v)` in `[0, 1]^2`, maximized
/// over `m = 1..=max_m`.
pub fn verify_abel_jensen(
    max_m: usize,
    beta: f64,
    trials: u64,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    if max_m == 0 {
        return Err(Error::InvalidDegree(0));
    }
    OperatorParams::new(max_m, beta)?;
    run_trials("abel-jensen", trials, seed, tol, |rng| {
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        let mut worst = (0.0, 1);
        for m in 1..=max_m {
            let r = abel_jensen_residual(u, v, beta, m)?;
            if !(r <= worst.0) {
                worst = (r, m);
            }
        }
        Ok(outcome(format!("u={u:?} v={v:?} beta={beta:?} m={}", worst.1), worst.0))
    })
}

/// Partition of unity and nonnegativity of the bivariate weights at random
/// points. Residual `max(|sum w - 1|, -min w)`.
pub fn verify_partition(params: OperatorParams, points: u64, seed: u64, tol: f64) -> Result<VerificationReport> {
    run_trials("partition", points, seed, tol, |rng| {
        let x = sample_point(rng);
        let w = bivariate_weights(params, x)?;
        let residual = (w.sum() - 1.0).abs().max(-w.min());
        Ok(outcome(format!("x={x}"), residual))
    })
}

/// `|G(f; x) - B(f; x)|` at `beta = 0`, maximized over `functions`, where
/// `B` is the independent Bernstein oracle.
pub fn verify_bernstein_degeneration(
    functions: &[FunctionDescriptor],
    n: usize,
    points: u64,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let params = OperatorParams::new(n, 0.0)?;
    let samples: Vec<LatticeSamples> = functions.iter().map(|f| LatticeSamples::new(f, n)).collect();
    run_trials("bernstein0", points, seed, tol, |rng| {
        let x = sample_point(rng);
        let weights = bivariate_weights(params, x)?;
        let mut worst = (0.0, 0);
        for (idx, (f, s)) in functions.iter().zip(&samples).enumerate() {
            let r = (weights.apply(s.values()) - bernstein_simplex(f, n, x)?).abs();
            if !(r <= worst.0) {
                worst = (r, idx);
            }
        }
        let name = functions.get(worst.1).map(ToString::to_string).unwrap_or_default();
        Ok(outcome(format!("f={name} x={x}"), worst.0))
    })
}

/// `|D(f; x, y) - (G(f; y) - G(f; x))|` for random ordered pairs, where `D`
/// is the difference expansion, maximized over `functions`.
pub fn verify_difference(
    functions: &[FunctionDescriptor],
    params: OperatorParams,
    pairs: u64,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let samples: Vec<LatticeSamples> =
        functions.iter().map(|f| LatticeSamples::new(f, params.n())).collect();
    run_trials("difference", pairs, seed, tol, |rng| {
        let (x, y) = sample_ordered_pair(rng);
        let kernel = DifferenceKernel::new(params, x, y)?;
        let wx = bivariate_weights(params, x)?;
        let wy = bivariate_weights(params, y)?;
        let mut worst = (0.0, 0);
        for (idx, s) in samples.iter().enumerate() {
            let direct = wy.apply(s.values()) - wx.apply(s.values());
            let r = (kernel.apply(s) - direct).abs();
            if !(r <= worst.0) {
                worst = (r, idx);
            }
        }
        let name = functions.get(worst.1).map(ToString::to_string).unwrap_or_default();
        Ok(outcome(format!("f={name} x={x} y={y}"), worst.0))
    })
}

/// `|G(g(t_axis); x) - Q(g; x_axis)|` for `g` in `{t, t^0.5, t^2}` and both
/// axes at random points.
pub fn verify_marginal(params: OperatorParams, points: u64, seed: u64, tol: f64) -> Result<VerificationReport> {
    let marginals: Vec<FunctionDescriptor> =
        ["proj:1", "sqrtsum", "poly:2,0,1"].iter().map(|s| s.parse().expect("marginal")).collect();
    let samples: Vec<(usize, Axis, LatticeSamples)> = marginals
        .iter()
        .enumerate()
        .flat_map(|(idx, g)| {
            Axis::BOTH.map(|axis| (idx, axis, LatticeSamples::marginal(g, axis, params.n())))
        })
        .collect();
    run_trials("marginal", points, seed, tol, |rng| {
        let x = sample_point(rng);
        let weights = bivariate_weights(params, x)?;
        let mut worst = (0.0, String::new());
        for (idx, axis, s) in &samples {
            let q = eval_q(&marginals[*idx], params, x.coord(*axis))?;
            let r = (weights.apply(s.values()) - q).abs();
            if !(r <= worst.0) || worst.1.is_empty() {
                worst = (r, format!("g={} axis={:?}", marginals[*idx], axis));
            }
        }
        Ok(outcome(format!("{} x={x}", worst.1), worst.0))
    })
}

/// `max(|Q(1; x) - 1|, |Q(t; x) - x|)` at uniform random `x` in `[0, 1]`.
pub fn verify_univariate_reproduction(
    params: OperatorParams,
    points: u64,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let n = params.n() as f64;
    let nodes: Vec<f64> = (0..=params.n()).map(|k| k as f64 / n).collect();
    let ones = vec![1.0; nodes.len()];
    run_trials("univariate-reproduction", points, seed, tol, |rng| {
        let x: f64 = rng.gen();
        let w = univariate_weights(params, x)?;
        let residual = (w.apply(&ones) - 1.0).abs().max((w.apply(&nodes) - x).abs());
        Ok(outcome(format!("x={x:?}"), residual))
    })
}

/// Largest observed `|f(x) - f(y)| / (|x1 - y1|^mu + |x2 - y2|^mu)` over
/// `samples` random pairs; a lower bound for the best Lipschitz constant.
pub fn estimate_lipschitz_constant(f: &FunctionDescriptor, mu: f64, samples: u64, seed: u64) -> Result<f64> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidArgument(format!("order mu must lie in (0, 1], got {mu}")));
    }
    check_trials(samples)?;
    let ratios: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let x = sample_point(&mut rng);
            let y = sample_point(&mut rng);
            let dist = holder_distance(x, y, mu);
            if dist > 0.0 {
                (f.eval(x) - f.eval(y)).abs() / dist
            } else {
                0.0
            }
        })
        .collect();
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

/// Checks `|G(f; y) - G(f; x)| <= M (|y1 - x1|^mu + |y2 - x2|^mu) + tol` on
/// random pairs of the simplex, in any relative order. Residual is the
/// left side minus the bound.
///
/// `f` is assumed to lie in the class described by `spec`; otherwise the
/// violations reflect an understated constant rather than a failure of the
/// operator.
pub fn verify_lipschitz_preservation(
    f: &FunctionDescriptor,
    spec: LipschitzSpec,
    params: OperatorParams,
    pairs: u64,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let samples = LatticeSamples::new(f, params.n());
    run_trials("lipschitz", pairs, seed, tol, |rng| {
        let x = sample_point(rng);
        let y = sample_point(rng);
        let gx = samples.eval_g(params, x)?;
        let gy = samples.eval_g(params, y)?;
        Ok(outcome(format!("x={x} y={y}"), (gy - gx).abs() - spec.bound(x, y)))
    })
}

/// Modulus-of-continuity axioms for `g`, one monotone pair and one additive
/// pair per trial, plus `g(0) = 0` and `g >= 0` at the sampled points.
fn modulus_scan(
    check: &str,
    g: &(dyn Fn(SimplexPoint) -> Result<f64> + Sync),
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    check_trials(samples)?;
    let origin = Violation { input: "origin".into(), residual: g(SimplexPoint::ORIGIN)?.abs() };
    let per_trial = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let (lo, hi) = sample_ordered_pair(&mut rng);
            let (u, v) = sample_additive_pair(&mut rng);
            let w = u.sum(v)?;
            debug_assert!(componentwise_leq(lo, hi));
            let (g_lo, g_hi) = (g(lo)?, g(hi)?);
            let (g_u, g_v, g_w) = (g(u)?, g(v)?, g(w)?);
            let lowest = g_lo.min(g_u).min(g_v);
            Ok(vec![
                Violation { input: format!("nonnegative x={lo}"), residual: -lowest },
                Violation { input: format!("monotone lo={lo} hi={hi}"), residual: g_lo - g_hi },
                Violation { input: format!("semi-additive u={u} v={v}"), residual: g_w - g_u - g_v },
            ])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::from_outcomes(
        check,
        samples,
        seed,
        tol,
        std::iter::once(origin).chain(per_trial.into_iter().flatten()),
    ))
}

/// Checks that `G(omega)` is again a modulus of continuity: it vanishes at
/// the origin, is monotone in the componentwise order and is semi-additive.
///
/// `omega` itself is first run through the same scan. If it fails, the
/// result is [`Error::Precondition`] carrying that report.
pub fn verify_modulus_axioms(
    omega: &FunctionDescriptor,
    params: OperatorParams,
    samples: u64,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let raw = modulus_scan("modulus-precondition", &|x| Ok(omega.eval(x)), samples, seed, tol)?;
    if !raw.passed {
        return Err(Error::Precondition(Box::new(raw)));
    }
    let lattice = LatticeSamples::new(omega, params.n());
    modulus_scan("modulus", &|x| lattice.eval_g(params, x), samples, seed, tol)
}

/// Parameter schedule `n -> beta_n` for convergence tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BetaSchedule {
    /// `beta_n = b`
    Const(f64),
    /// `beta_n = c / n`
    Decay(f64),
    /// `beta_n = c / n^2`
    Decay2(f64),
}

impl BetaSchedule {
    pub fn beta(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            BetaSchedule::Const(b) => b,
            BetaSchedule::Decay(c) => c / n,
            BetaSchedule::Decay2(c) => c / (n * n),
        }
    }
}

impl FromStr for BetaSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("beta schedule must be const:<b>, decay:<c> or decay2:<c>, got `{s}`"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        let value: f64 = value.trim().parse().map_err(|_| bad())?;
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::InvalidBeta(value));
        }
        match kind.trim() {
            "const" => Ok(BetaSchedule::Const(value)),
            "decay" => Ok(BetaSchedule::Decay(value)),
            "decay2" => Ok(BetaSchedule::Decay2(value)),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for BetaSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BetaSchedule::Const(b) => write!(f, "const:{b}"),
            BetaSchedule::Decay(c) => write!(f, "decay:{c}"),
            BetaSchedule::Decay2(c) => write!(f, "decay2:{c}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub beta: f64,
    pub sup_error: f64,
}

/// `sup |G(f; x) - f(x)|` over the triangular grid `(i / r, j / r)`,
/// `i + j <= r`, for each `n` and its scheduled `beta`.
pub fn convergence_table(
    f: &FunctionDescriptor,
    n_list: &[usize],
    schedule: BetaSchedule,
    grid: usize,
) -> Result<Vec<ConvergenceRow>> {
    if grid == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    let r = grid as f64;
    let points: Vec<SimplexPoint> = (0..=grid)
        .flat_map(|i| (0..=grid - i).map(move |j| (i, j)))
        .map(|(i, j)| SimplexPoint::new(i as f64 / r, j as f64 / r))
        .collect::<Result<_>>()?;
    n_list
        .iter()
        .map(|&n| {
            let params = OperatorParams::new(n, schedule.beta(n))?;
            let samples = LatticeSamples::new(f, n);
            let errors = points
                .par_iter()
                .map(|&x| Ok((samples.eval_g(params, x)? - f.eval(x)).abs()))
                .collect::<Result<Vec<f64>>>()?;
            Ok(ConvergenceRow { n, beta: params.beta(), sup_error: errors.into_iter().fold(0.0, f64::max) })
        })
        .collect()
}

/// CSV with header `n,beta,sup_error`.
pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut out = String::from("n,beta,sup_error\n");
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row.n, sig17(row.beta), sig17(row.sup_error)));
    }
    out
}
