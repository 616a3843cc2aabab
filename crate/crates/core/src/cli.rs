//! Command line front end. [`run`] takes the argument list and returns what
//! to print and the exit code, so commands can be driven in-process.
//!
//! Exit codes: `0` success, `1` a verification check failed (its report is
//! still printed), `2` usage, parse or domain error.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::abel::{bivariate_weights, univariate_weights};
use crate::error::{Error, Result};
use crate::format::sig17;
use crate::model::{FunctionDescriptor, LipschitzSpec, OperatorParams, SimplexPoint};
use crate::operators::{eval_g, eval_q};
use crate::properties::{self, BetaSchedule, VerificationReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cheney-sharma", version, about = "Cheney-Sharma operators on [0,1] and on the simplex")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dump the basis weights at a point
    Weights(WeightsArgs),
    /// Evaluate Q or G applied to a function at a point
    Eval(EvalArgs),
    /// Run a randomized verification scan and print its JSON report
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Tabulate sup |G f - f| over a triangular grid
    Table(TableArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OperatorKind {
    #[value(name = "G")]
    G,
    #[value(name = "Q")]
    Q,
}

#[derive(Debug, Args)]
struct WeightsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
    /// `x1,x2`, or a single `x` together with --univariate
    #[arg(long, allow_negative_numbers = true)]
    x: String,
    #[arg(long)]
    univariate: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: OutputFormat,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, value_enum)]
    op: OperatorKind,
    #[arg(long = "f")]
    function: String,
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    x: String,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute tolerance; each check has its own default
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct DegreeArgs {
    #[arg(long, default_value_t = 10)]
    n: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.1)]
    beta: f64,
}

#[derive(Debug, Subcommand)]
enum Check {
    /// Abel-Jensen identity residual for m = 1..=n at random (u, v)
    AbelJensen {
        #[arg(long, default_value_t = 30)]
        n: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.3)]
        beta: f64,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Weights sum to one and are nonnegative
    Partition {
        #[command(flatten)]
        degree: DegreeArgs,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// G at beta = 0 against the Bernstein polynomial on the simplex
    Bernstein0 {
        #[arg(long, default_value_t = 10)]
        n: usize,
        /// Single function; the built-in corpus when omitted
        #[arg(long = "f")]
        function: Option<String>,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Difference expansion against G(f; y) - G(f; x) on ordered pairs
    Difference {
        #[command(flatten)]
        degree: DegreeArgs,
        /// Single function; the built-in corpus when omitted
        #[arg(long = "f")]
        function: Option<String>,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// G on a function of one coordinate against Q
    Marginal {
        #[command(flatten)]
        degree: DegreeArgs,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Lipschitz bound of f carried over to G f
    Lipschitz {
        #[arg(long = "f")]
        function: String,
        #[arg(long)]
        mu: f64,
        #[arg(long = "M")]
        constant: f64,
        #[command(flatten)]
        degree: DegreeArgs,
        #[command(flatten)]
        scan: ScanArgs,
    },
    /// Modulus-of-continuity axioms for G omega
    Modulus {
        #[arg(long = "f")]
        function: String,
        #[command(flatten)]
        degree: DegreeArgs,
        #[command(flatten)]
        scan: ScanArgs,
    },
}

#[derive(Debug, Args)]
struct TableArgs {
    #[arg(long = "f")]
    function: String,
    /// Comma separated degrees, e.g. 2,4,8
    #[arg(long = "n-list")]
    n_list: String,
    /// const:<b>, decay:<c> (beta = c/n) or decay2:<c> (beta = c/n^2)
    #[arg(long = "beta-schedule")]
    beta_schedule: String,
    #[arg(long, default_value_t = 100)]
    grid: usize,
}

/// Text destined for standard output and standard error, plus the exit code.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CliOutput {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn usage(message: impl std::fmt::Display) -> Self {
        Self { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: {message}\n") }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    if err.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        CliOutput { code: EXIT_USAGE, stdout: String::new(), stderr: err.to_string() }
                    } else {
                        CliOutput::ok(err.to_string())
                    }
                }
                _ => {
                    let rendered = err.to_string();
                    let first = rendered.lines().next().unwrap_or("invalid arguments");
                    CliOutput {
                        code: EXIT_USAGE,
                        stdout: String::new(),
                        stderr: format!("{}\n", first.trim()),
                    }
                }
            };
        }
    };
    let result = match cli.command {
        Command::Weights(args) => cmd_weights(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Verify { check } => cmd_verify(check),
        Command::Table(args) => cmd_table(args),
    };
    result.unwrap_or_else(|e| match e {
        Error::Precondition(report) => CliOutput {
            code: EXIT_CHECK_FAILED,
            stdout: format!("{}\n", report.to_json()),
            stderr: format!("error: {}\n", Error::Precondition(report.clone())),
        },
        other => CliOutput::usage(other),
    })
}

fn parse_point(s: &str) -> Result<SimplexPoint> {
    let parts: Vec<&str> = s.split(',').collect();
    let [x1, x2] = parts[..] else {
        return Err(Error::InvalidArgument(format!("expected a point x1,x2, got `{s}`")));
    };
    SimplexPoint::new(parse_real(x1)?, parse_real(x2)?)
}

fn parse_real(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("`{s}` is not a number")))
}

fn parse_descriptor(s: &str) -> Result<FunctionDescriptor> {
    s.parse()
}

fn parse_tolerance(tol: Option<f64>, default: f64) -> Result<f64> {
    match tol {
        None => Ok(default),
        Some(t) if t >= 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(Error::InvalidArgument(format!("tolerance must be nonnegative, got {t}"))),
    }
}

#[derive(Serialize)]
struct WeightEntry {
    k1: usize,
    k2: usize,
    weight: f64,
}

#[derive(Serialize)]
struct UnivariateEntry {
    k: usize,
    weight: f64,
}

#[derive(Serialize)]
struct WeightDump<E> {
    n: usize,
    beta: f64,
    x: Vec<f64>,
    weights: Vec<E>,
}

fn cmd_weights(args: WeightsArgs) -> Result<CliOutput> {
    let params = OperatorParams::new(args.n, args.beta)?;
    let out = if args.univariate {
        let x = parse_real(&args.x)?;
        let w = univariate_weights(params, x)?;
        match args.format {
            OutputFormat::Csv => w.to_csv(),
            OutputFormat::Json => json_line(&WeightDump {
                n: params.n(),
                beta: params.beta(),
                x: vec![x],
                weights: w
                    .weights()
                    .iter()
                    .enumerate()
                    .map(|(k, &weight)| UnivariateEntry { k, weight })
                    .collect(),
            }),
        }
    } else {
        let x = parse_point(&args.x)?;
        let w = bivariate_weights(params, x)?;
        match args.format {
            OutputFormat::Csv => w.to_csv(),
            OutputFormat::Json => json_line(&WeightDump {
                n: params.n(),
                beta: params.beta(),
                x: vec![x.x1(), x.x2()],
                weights: w.iter().map(|(k, weight)| WeightEntry { k1: k.k1, k2: k.k2, weight }).collect(),
            }),
        }
    };
    Ok(CliOutput::ok(out))
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn cmd_eval(args: EvalArgs) -> Result<CliOutput> {
    let f = parse_descriptor(&args.function)?;
    let params = OperatorParams::new(args.n, args.beta)?;
    let value = match args.op {
        OperatorKind::Q => eval_q(&f, params, parse_real(&args.x)?)?,
        OperatorKind::G => eval_g(&f, params, parse_point(&args.x)?)?,
    };
    Ok(CliOutput::ok(format!("{}\n", sig17(value))))
}

fn report_output(report: VerificationReport) -> CliOutput {
    CliOutput {
        code: if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED },
        stdout: format!("{}\n", report.to_json()),
        stderr: String::new(),
    }
}

fn functions_or_corpus(function: Option<String>) -> Result<Vec<FunctionDescriptor>> {
    match function {
        Some(f) => Ok(vec![parse_descriptor(&f)?]),
        None => Ok(properties::test_corpus()),
    }
}

fn cmd_verify(check: Check) -> Result<CliOutput> {
    let report = match check {
        Check::AbelJensen { n, beta, scan } => {
            let tol = parse_tolerance(scan.tol, 1e-11)?;
            properties::verify_abel_jensen(n, beta, scan.trials, scan.seed, tol)?
        }
        Check::Partition { degree, scan } => {
            let params = OperatorParams::new(degree.n, degree.beta)?;
            let tol = parse_tolerance(scan.tol, 1e-12)?;
            properties::verify_partition(params, scan.trials, scan.seed, tol)?
        }
        Check::Bernstein0 { n, function, scan } => {
            let functions = functions_or_corpus(function)?;
            let tol = parse_tolerance(scan.tol, 1e-12)?;
            properties::verify_bernstein_degeneration(&functions, n, scan.trials, scan.seed, tol)?
        }
        Check::Difference { degree, function, scan } => {
            let params = OperatorParams::new(degree.n, degree.beta)?;
            let functions = functions_or_corpus(function)?;
            let tol = parse_tolerance(scan.tol, 1e-10)?;
            properties::verify_difference(&functions, params, scan.trials, scan.seed, tol)?
        }
        Check::Marginal { degree, scan } => {
            let params = OperatorParams::new(degree.n, degree.beta)?;
            let tol = parse_tolerance(scan.tol, 1e-11)?;
            properties::verify_marginal(params, scan.trials, scan.seed, tol)?
        }
        Check::Lipschitz { function, mu, constant, degree, scan } => {
            let f = parse_descriptor(&function)?;
            let spec = LipschitzSpec::new(mu, constant)?;
            let params = OperatorParams::new(degree.n, degree.beta)?;
            let tol = parse_tolerance(scan.tol, 1e-9)?;
            properties::verify_lipschitz_preservation(&f, spec, params, scan.trials, scan.seed, tol)?
        }
        Check::Modulus { function, degree, scan } => {
            let omega = parse_descriptor(&function)?;
            let params = OperatorParams::new(degree.n, degree.beta)?;
            let tol = parse_tolerance(scan.tol, 1e-10)?;
            properties::verify_modulus_axioms(&omega, params, scan.trials, scan.seed, tol)?
        }
    };
    Ok(report_output(report))
}

fn cmd_table(args: TableArgs) -> Result<CliOutput> {
    let f = parse_descriptor(&args.function)?;
    let n_list = args
        .n_list
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("`{s}` is not a degree")))
        })
        .collect::<Result<Vec<_>>>()?;
    let schedule: BetaSchedule = args.beta_schedule.parse()?;
    let rows = properties::convergence_table(&f, &n_list, schedule, args.grid)?;
    Ok(CliOutput::ok(properties::convergence_csv(&rows)))
}
