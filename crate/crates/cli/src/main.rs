//! `cmzv`: evaluate, reduce and cross-check continuous multiple zeta values.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
//! 3 numeric non-convergence.

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use cmzv::compositions::{Composition, Word};
use cmzv::etaspace::sum_formula_rhs;
use cmzv::poles::{pole_hyperplanes, Hyperplane};
use cmzv::quad::{eval_numeric, NumericResult, QuadConfig, ShiftedCmzv};
use cmzv::rational::{parse_fraction, to_f64, to_fraction_string, Rational};
use cmzv::reduce::{reduce_shifted, ReduceConfig, Reduction, DEFAULT_STEP_BUDGET};
use cmzv::shuffle::{shuffle, FormalWordSum};
use cmzv::verify::{self, parse_suites, Report, VerifyConfig};
use cmzv::Error;

const VERIFY_TOL: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "cmzv", version, about = "Continuous multiple zeta values: quadrature, reduction and identity checks")]
struct Cli {
    /// Absolute quadrature tolerance; defaults depend on depth.
    #[arg(long, global = true, env = "CMZV_TOL", value_parser = positive_f64)]
    tol: Option<f64>,

    #[arg(long, global = true, env = "CMZV_DEPTH_CAP", default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    depth_cap: u64,

    /// Maximum number of terms generated by a reduction.
    #[arg(long, global = true, env = "CMZV_STEP_BUDGET", default_value_t = DEFAULT_STEP_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
    step_budget: u64,

    #[arg(long, global = true, env = "CMZV_FORMAT", value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Worker threads for `verify`.
    #[arg(long, global = true, env = "CMZV_JOBS", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    jobs: u64,

    /// Seed for randomized checks.
    #[arg(long, global = true, env = "CMZV_SEED", default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate ζ^C(k₁,…,k_r) by nested quadrature.
    Eval {
        /// Comma-separated parts, e.g. `1,2`.
        composition: Composition,
        /// Lower integration bounds `m1,m2,...` (positive rationals).
        #[arg(long)]
        bounds: Option<String>,
    },
    /// Reduce to logarithms and basis values, and report the numeric residual.
    Reduce {
        composition: Composition,
        #[arg(long)]
        bounds: Option<String>,
    },
    /// Expand the shuffle product of two words over {x, y}.
    Shuffle { w1: String, w2: String },
    /// Check the weighted sum formula of depth `r` and weight `k`.
    Sumformula { r: usize, k: u32 },
    /// List candidate pole hyperplanes.
    Poles { r: usize, k_max: u32 },
    /// Run verification suites (`all` or a comma-separated list).
    Verify {
        suite: String,
        #[arg(long, env = "CMZV_MAX_WEIGHT")]
        max_weight: Option<u32>,
        /// Corrupt the reference value of log 2 (harness self-test).
        #[arg(long)]
        inject_fault: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("{s:?} is not a positive number")),
    }
}

#[derive(Debug)]
enum Outcome {
    Ok,
    Failed,
    NotConverged,
}

impl Outcome {
    fn of(converged: bool, passed: bool) -> Self {
        match (converged, passed) {
            (false, _) => Outcome::NotConverged,
            (true, false) => Outcome::Failed,
            (true, true) => Outcome::Ok,
        }
    }

    fn code(&self) -> ExitCode {
        match self {
            Outcome::Ok => ExitCode::SUCCESS,
            Outcome::Failed => ExitCode::from(1),
            Outcome::NotConverged => ExitCode::from(3),
        }
    }
}

enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type CliResult = Result<Outcome, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run(&cli, &mut out).and_then(|o| {
        out.flush()?;
        Ok(o)
    });
    match result {
        Ok(outcome) => outcome.code(),
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli, out: &mut impl Write) -> CliResult {
    match &cli.command {
        Command::Eval { composition, bounds } => cmd_eval(cli, out, composition, bounds.as_deref()),
        Command::Reduce { composition, bounds } => cmd_reduce(cli, out, composition, bounds.as_deref()),
        Command::Shuffle { w1, w2 } => cmd_shuffle(cli, out, w1, w2),
        Command::Sumformula { r, k } => cmd_sumformula(cli, out, *r, *k),
        Command::Poles { r, k_max } => cmd_poles(cli, out, *r, *k_max),
        Command::Verify { suite, max_weight, inject_fault } => cmd_verify(cli, out, suite, *max_weight, *inject_fault),
    }
}

fn quad_config(cli: &Cli) -> QuadConfig {
    QuadConfig { tol: cli.tol, depth_cap: cli.depth_cap as usize, ..QuadConfig::default() }
}

fn reduce_config(cli: &Cli) -> ReduceConfig {
    ReduceConfig { step_budget: cli.step_budget as usize, depth_cap: cli.depth_cap as usize }
}

fn target(composition: &Composition, bounds: Option<&str>) -> Result<ShiftedCmzv, Error> {
    let Some(bounds) = bounds else {
        return Ok(ShiftedCmzv::unshifted(composition.clone()));
    };
    let bounds = bounds.split(',').map(|b| parse_fraction(b.trim())).collect::<Result<Vec<Rational>, Error>>()?;
    if bounds.len() != composition.depth() {
        return Err(Error::Parse(format!("{} bounds given for a composition of depth {}", bounds.len(), composition.depth())));
    }
    ShiftedCmzv::new(bounds, composition.clone())
}

fn json_line(out: &mut impl Write, value: &impl Serialize) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

#[derive(Serialize)]
struct EvalOutput<'a> {
    input: &'a ShiftedCmzv,
    result: NumericResult,
}

fn cmd_eval(cli: &Cli, out: &mut impl Write, composition: &Composition, bounds: Option<&str>) -> CliResult {
    let v = target(composition, bounds)?;
    let result = eval_numeric(&v, &quad_config(cli))?;
    match cli.format {
        Format::Table => {
            writeln!(out, "{v} = {:.15}", result.value)?;
            writeln!(out, "  error estimate  {:.3e}", result.error_estimate)?;
            writeln!(out, "  evaluations     {}", result.evaluations)?;
            writeln!(out, "  converged       {}", yes_no(result.converged))?;
        }
        Format::Json => json_line(out, &EvalOutput { input: &v, result })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["input", "value", "error_estimate", "evaluations", "converged"])?;
            w.write_record([
                v.to_string(),
                result.value.to_string(),
                result.error_estimate.to_string(),
                result.evaluations.to_string(),
                result.converged.to_string(),
            ])?;
            w.flush()?;
        }
    }
    Ok(Outcome::of(result.converged, true))
}

#[derive(Serialize)]
struct ReduceOutput<'a> {
    input: &'a ShiftedCmzv,
    symbolic: String,
    reduction: &'a Reduction,
    symbolic_value: NumericResult,
    numeric: NumericResult,
    residual: f64,
    tolerance: f64,
    passed: bool,
}

fn cmd_reduce(cli: &Cli, out: &mut impl Write, composition: &Composition, bounds: Option<&str>) -> CliResult {
    let v = target(composition, bounds)?;
    let cfg = quad_config(cli);
    let reduction = reduce_shifted(&v, &reduce_config(cli))?;
    let symbolic_value = reduction.value.eval(&cfg)?;
    let numeric = eval_numeric(&v, &cfg)?;
    let residual = (symbolic_value.value - numeric.value).abs();
    let tolerance = 10.0 * cfg.tolerance(v.depth()) + symbolic_value.error_estimate + numeric.error_estimate;
    let converged = symbolic_value.converged && numeric.converged;
    let passed = residual <= tolerance;
    match cli.format {
        Format::Table => {
            writeln!(out, "{v} = {}", reduction.value)?;
            for (label, value) in &reduction.resolved {
                let depth = label.split(',').count();
                let exps = vec!["1"; depth - 1].into_iter().chain(["2"]).collect::<Vec<_>>().join(",");
                writeln!(out, "  where ζ^C_{{{label}}}({exps}) = {value}")?;
            }
            writeln!(out, "  symbolic value  {:.15}", symbolic_value.value)?;
            writeln!(out, "  numeric value   {:.15}", numeric.value)?;
            writeln!(out, "  residual        {residual:.3e}")?;
            writeln!(out, "  steps           {}", reduction.steps)?;
            writeln!(out, "  converged       {}", yes_no(converged))?;
        }
        Format::Json => json_line(
            out,
            &ReduceOutput {
                input: &v,
                symbolic: reduction.value.to_string(),
                reduction: &reduction,
                symbolic_value,
                numeric,
                residual,
                tolerance,
                passed,
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["input", "symbolic", "symbolic_value", "numeric_value", "residual", "converged"])?;
            w.write_record([
                v.to_string(),
                reduction.value.to_string(),
                symbolic_value.value.to_string(),
                numeric.value.to_string(),
                residual.to_string(),
                converged.to_string(),
            ])?;
            w.flush()?;
        }
    }
    Ok(Outcome::of(converged, passed))
}

fn cmd_shuffle(cli: &Cli, out: &mut impl Write, w1: &str, w2: &str) -> CliResult {
    let w1: Word = w1.parse()?;
    let w2: Word = w2.parse()?;
    let product: FormalWordSum = shuffle(&w1, &w2);
    match cli.format {
        Format::Table => writeln!(out, "{product}")?,
        Format::Json => json_line(out, &product)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["word", "coefficient"])?;
            for (word, c) in product.iter() {
                w.write_record([word.as_str(), &to_fraction_string(c)])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct SumFormulaOutput {
    r: usize,
    k: u32,
    rhs: String,
    rhs_value: f64,
    lhs: NumericResult,
    discrepancy: f64,
    tolerance: f64,
    passed: bool,
}

fn cmd_sumformula(cli: &Cli, out: &mut impl Write, r: usize, k: u32) -> CliResult {
    let rhs = sum_formula_rhs(r, k)?;
    let (quad, tolerance) = if r <= 3 {
        (VERIFY_TOL, 1e-6)
    } else if r == 4 {
        (VERIFY_TOL, 1e-3)
    } else {
        (QuadConfig::default_tolerance(r), 1e-2)
    };
    let cfg = QuadConfig { tol: Some(cli.tol.unwrap_or(quad)), depth_cap: cli.depth_cap as usize, ..QuadConfig::default() };
    let lhs = verify::sum_formula_lhs(r, k, &cfg)?;
    let rhs_value = to_f64(&rhs);
    let discrepancy = (lhs.value - rhs_value).abs();
    let passed = discrepancy <= tolerance;
    match cli.format {
        Format::Table => {
            writeln!(out, "sum formula r={r} k={k}")?;
            writeln!(out, "  rhs (exact)  {}", to_fraction_string(&rhs))?;
            writeln!(out, "  rhs          {rhs_value:.15}")?;
            writeln!(out, "  lhs          {:.15}", lhs.value)?;
            writeln!(out, "  discrepancy  {discrepancy:.3e}")?;
            writeln!(out, "  tolerance    {tolerance:.0e}")?;
            writeln!(out, "  {}", if lhs.converged && passed { "PASS" } else { "FAIL" })?;
        }
        Format::Json => json_line(
            out,
            &SumFormulaOutput {
                r,
                k,
                rhs: to_fraction_string(&rhs),
                rhs_value,
                lhs,
                discrepancy,
                tolerance,
                passed,
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["r", "k", "rhs", "lhs", "discrepancy", "tolerance", "passed"])?;
            w.write_record([
                r.to_string(),
                k.to_string(),
                to_fraction_string(&rhs),
                lhs.value.to_string(),
                discrepancy.to_string(),
                tolerance.to_string(),
                passed.to_string(),
            ])?;
            w.flush()?;
        }
    }
    Ok(Outcome::of(lhs.converged, passed))
}

fn cmd_poles(cli: &Cli, out: &mut impl Write, r: usize, k_max: u32) -> CliResult {
    let hyperplanes: Vec<Hyperplane> = pole_hyperplanes(r, k_max)?.into_iter().collect();
    match cli.format {
        Format::Table => {
            for h in &hyperplanes {
                writeln!(out, "{h}")?;
            }
        }
        Format::Json => json_line(out, &hyperplanes)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["coeffs", "constant"])?;
            for h in &hyperplanes {
                let coeffs: Vec<String> = h.coeffs.iter().map(u64::to_string).collect();
                w.write_record([coeffs.join(" "), h.constant.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    #[serde(flatten)]
    report: &'a Report,
    passed: usize,
    failed: usize,
    non_converged: usize,
}

fn cmd_verify(cli: &Cli, out: &mut impl Write, suite: &str, max_weight: Option<u32>, inject_fault: bool) -> CliResult {
    let suites = parse_suites(suite)?;
    let cfg = VerifyConfig {
        quad: QuadConfig { tol: Some(cli.tol.unwrap_or(VERIFY_TOL)), depth_cap: cli.depth_cap as usize, ..QuadConfig::default() },
        reduce: reduce_config(cli),
        max_weight,
        jobs: cli.jobs as usize,
        seed: cli.seed,
        inject_fault,
    };
    let report = verify::run(&suites, &cfg)?;
    match cli.format {
        Format::Table => {
            for c in &report.checks {
                let status = match (c.passed, c.converged) {
                    (true, _) => "PASS",
                    (false, true) => "FAIL",
                    (false, false) => "NOCV",
                };
                writeln!(out, "{status}  {:<11} {}  (|Δ| = {:.2e}, tol {:.0e})", c.suite.name(), c.name, c.discrepancy, c.tolerance)?;
            }
            writeln!(
                out,
                "{} checks: {} passed, {} failed, {} not converged",
                report.checks.len(),
                report.passed(),
                report.genuine_failures(),
                report.non_converged()
            )?;
        }
        Format::Json => json_line(
            out,
            &VerifyOutput {
                report: &report,
                passed: report.passed(),
                failed: report.genuine_failures(),
                non_converged: report.non_converged(),
            },
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["suite", "name", "lhs", "rhs", "discrepancy", "tolerance", "converged", "passed"])?;
            for c in &report.checks {
                w.write_record([
                    c.suite.name().to_string(),
                    c.name.clone(),
                    c.lhs.to_string(),
                    c.rhs.to_string(),
                    c.discrepancy.to_string(),
                    c.tolerance.to_string(),
                    c.converged.to_string(),
                    c.passed.to_string(),
                ])?;
            }
            w.flush()?;
        }
    }
    let outcome = if report.genuine_failures() > 0 {
        Outcome::Failed
    } else if report.non_converged() > 0 {
        Outcome::NotConverged
    } else {
        Outcome::Ok
    };
    Ok(outcome)
}
