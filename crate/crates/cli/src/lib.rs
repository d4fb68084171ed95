//! Command-line front end for maximum-entropy Edgeworth counting.
//!
//! Subcommands: `count` (estimate, optionally with the exact oracle and Monte
//! Carlo cumulants), `repro` (recompute a published comparison table),
//! `oracle` (exact count only) and `diag` (solver and validity diagnostics).
//!
//! The exit code is the only pass/fail channel; see [`exit`].

pub mod format;
pub mod instance;
pub mod repro;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand};
use entropy_count::estimator::{validity_diagnostics_graph, validity_diagnostics_table};
use entropy_count::moments::{
    build_graph_covariance, build_table_covariance, closed_form_equal_margins,
    closed_form_regular_graph, summarize, two_class_log_det,
};
use entropy_count::oracle::{
    exact_count_graphs, exact_count_tables, mc_gaussian_moments, Budget, ExactCount,
};
use entropy_count::{
    estimate_graph, estimate_table, fit_graph, fit_table, CountReport, CumulantSummary,
    Diagnostic, EdgeCoefficients, Error, SolverOptions,
};
use serde_json::{json, Map, Value};

use crate::format::{count_from_ln, delta, sig6};
use crate::instance::{integers, resolve, FileOptions, Instance, InstanceArgs};

pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const SOLVER: i32 = 3;
    pub const REPRO_FAIL: i32 = 4;
    pub const BUDGET: i32 = 5;
}

/// Overrides the oracle state budget.
pub const BUDGET_ENV: &str = "ENTROPY_COUNT_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "entropy-count", version, about = "Maximum-entropy Edgeworth estimates for counting tables and graphs")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate the number of tables with given margins or graphs with given degrees.
    Count(CountArgs),
    /// Recompute published comparison table 1, 2 or 3.
    Repro {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        table: u8,
    },
    /// Exact count by dynamic programming.
    Oracle(OracleArgs),
    /// Solver details, closed-form cross-checks and validity warnings.
    Diag(DiagArgs),
}

#[derive(Args, Debug)]
struct SolverArgs {
    /// Absolute tolerance on margin residuals.
    #[arg(long)]
    tol: Option<f64>,
    /// Newton iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Args, Debug)]
struct CountArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Single-line JSON output.
    #[arg(long)]
    json: bool,
    /// Also run the exact oracle.
    #[arg(long)]
    exact: bool,
    /// Monte Carlo samples for κ³ and κ⁴.
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct DiagArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InfeasibleMargins(_)
        | Error::InvalidDegrees(_)
        | Error::NonIntegerInstance(_)
        | Error::InvalidArgument(_)
        | Error::DimensionTooLarge(_)
        | Error::OddDegreeSum(_) => exit::INFEASIBLE,
        Error::NoConvergence { .. }
        | Error::MaxEntBoundary(_)
        | Error::SingularCovariance(_)
        | Error::NotPositiveDefinite => exit::SOLVER,
        Error::BudgetExceeded { .. } => exit::BUDGET,
    }
}

/// Parse `args` (including the program name) and run. Reports go to `out`,
/// errors to `err`; the return value is the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Count(args) => cmd_count(&args, out),
        Command::Repro { table } => cmd_repro(table, out),
        Command::Oracle(args) => cmd_oracle(&args, out),
        Command::Diag(args) => cmd_diag(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            exit::USAGE
        }
        Err(CliError::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            exit::USAGE
        }
    }
}

fn budget() -> Result<Budget, CliError> {
    budget_or(Budget::default())
}

fn budget_or(default: Budget) -> Result<Budget, CliError> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(max_states) if max_states > 0 => Ok(Budget { max_states }),
            _ => Err(CliError::Usage(format!("{BUDGET_ENV} must be a positive integer"))),
        },
        Err(_) => Ok(default),
    }
}

fn solver_options(args: &SolverArgs, file: &FileOptions) -> Result<SolverOptions, CliError> {
    let mut opts = SolverOptions::default();
    if let Some(tol) = args.tol.or(file.tol) {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Usage("tol must be positive".into()));
        }
        opts.tol = tol;
    }
    if let Some(max_iter) = args.max_iter.or(file.max_iter) {
        opts.max_iter = max_iter;
    }
    Ok(opts)
}

fn emit_json(out: &mut dyn Write, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string(value).map_err(|e| CliError::Usage(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

fn line(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> Result<(), CliError> {
    writeln!(out, "{key:<17} {value}")?;
    Ok(())
}

fn write_diagnostics(out: &mut dyn Write, diagnostics: &[Diagnostic]) -> Result<(), CliError> {
    for d in diagnostics {
        let tag = if d.heuristic { "warning" } else { "note" };
        writeln!(out, "{tag}: {}", d.message)?;
    }
    Ok(())
}

fn run_exact(instance: &Instance, budget: &Budget) -> Result<ExactCount, Error> {
    let not_integral = || Error::NonIntegerInstance("the exact oracle needs integer margins".into());
    match instance {
        Instance::Table { rows, cols } => {
            let r = integers(rows).ok_or_else(not_integral)?;
            let c = integers(cols).ok_or_else(not_integral)?;
            exact_count_tables(&r, &c, budget)
        }
        Instance::Graph { degrees } => {
            let d = integers(degrees).ok_or_else(not_integral)?;
            exact_count_graphs(&d, budget)
        }
    }
}

fn exact_json(c: &ExactCount) -> Value {
    json!({
        "count": c.value.to_string(),
        "ln": c.ln_value,
        "states": c.states,
    })
}

fn estimate(instance: &Instance, opts: &SolverOptions) -> Result<CountReport, Error> {
    match instance {
        Instance::Table { rows, cols } => {
            estimate_table(&entropy_count::MarginSpec::new(rows.clone(), cols.clone())?, opts)
        }
        Instance::Graph { degrees } => {
            estimate_graph(&entropy_count::DegreeSpec::new(degrees.clone())?, opts)
        }
    }
}

/// Covariance model and cell coefficients for the Monte Carlo oracle, or
/// `None` when every edge is forced.
fn moment_inputs(
    instance: &Instance,
    opts: &SolverOptions,
) -> Result<Option<(entropy_count::CovarianceModel, EdgeCoefficients)>, Error> {
    match instance {
        Instance::Table { rows, cols } => {
            let fit = fit_table(&entropy_count::MarginSpec::new(rows.clone(), cols.clone())?, opts)?;
            Ok(Some((build_table_covariance(&fit), EdgeCoefficients::from_table_fit(&fit))))
        }
        Instance::Graph { degrees } => {
            let fit = fit_graph(&entropy_count::DegreeSpec::new(degrees.clone())?, opts)?;
            if fit.n() == 0 {
                return Ok(None);
            }
            Ok(Some((build_graph_covariance(&fit)?, EdgeCoefficients::from_graph_fit(&fit))))
        }
    }
}

fn cmd_count(args: &CountArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (instance, file_opts) = resolve(&args.instance).map_err(CliError::Usage)?;
    let opts = solver_options(&args.solver, &file_opts)?;
    let want_exact = args.exact || file_opts.oracle.unwrap_or(false);
    let mc_samples = args.mc_samples.or(file_opts.mc_samples);
    let seed = args.seed.or(file_opts.seed).unwrap_or(0);
    let budget = budget()?;

    let report = match estimate(&instance, &opts) {
        Ok(r) => r,
        Err(Error::OddDegreeSum(sum)) => {
            if args.json {
                emit_json(
                    out,
                    &json!({
                        "model": "graph",
                        "instance": instance,
                        "count": "0",
                        "reason": format!("degree sum {sum} is odd"),
                    }),
                )?;
            } else {
                line(out, "instance", instance.describe())?;
                line(out, "count", 0)?;
                line(out, "reason", format!("degree sum {sum} is odd"))?;
            }
            return Ok(exit::OK);
        }
        Err(e) => return Err(e.into()),
    };

    let mut code = exit::OK;
    let exact = if want_exact {
        match run_exact(&instance, &budget) {
            Ok(c) => Some(Ok(c)),
            Err(e @ Error::BudgetExceeded { .. }) => {
                code = exit::BUDGET;
                Some(Err(e))
            }
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let mc = match mc_samples {
        Some(samples) => match moment_inputs(&instance, &opts)? {
            Some((model, coeffs)) => Some(mc_gaussian_moments(&model, &coeffs, samples, seed)?),
            None => None,
        },
        None => None,
    };

    if args.json {
        let mut value = serde_json::to_value(&report).map_err(|e| CliError::Usage(e.to_string()))?;
        let map: &mut Map<String, Value> = value.as_object_mut().expect("report is an object");
        map.insert("instance".into(), json!(instance));
        map.insert("count_gauss".into(), json!(count_from_ln(report.ln_gauss)));
        map.insert("count_edgeworth".into(), json!(count_from_ln(report.ln_edgeworth)));
        match &exact {
            Some(Ok(c)) => {
                map.insert("exact".into(), exact_json(c));
                map.insert("gauss_error".into(), json!(report.ln_gauss - c.ln_value));
                map.insert("edgeworth_error".into(), json!(report.ln_edgeworth - c.ln_value));
            }
            Some(Err(e)) => {
                map.insert("exact".into(), json!({ "error": e.to_string() }));
            }
            None => {}
        }
        if let Some(mc) = &mc {
            map.insert("mc".into(), json!(mc));
        }
        emit_json(out, &value)?;
        return Ok(code);
    }

    line(out, "instance", instance.describe())?;
    line(out, "model", format!("{:?}", report.model).to_lowercase())?;
    line(out, "dimension", report.dim)?;
    line(out, "entropy", sig6(report.entropy))?;
    line(out, "ln det V", sig6(report.log_det_v))?;
    line(out, "kappa3", sig6(report.kappa3))?;
    line(out, "kappa4", sig6(report.kappa4))?;
    line(out, "ln gauss", format!("{} (log10 {}, count {})", sig6(report.ln_gauss), sig6(report.log10_gauss), count_from_ln(report.ln_gauss)))?;
    line(
        out,
        "ln edgeworth",
        format!(
            "{} (log10 {}, count {})",
            sig6(report.ln_edgeworth),
            sig6(report.log10_edgeworth),
            count_from_ln(report.ln_edgeworth)
        ),
    )?;
    match &exact {
        Some(Ok(c)) => {
            line(out, "exact", &c.value)?;
            line(out, "ln exact", sig6(c.ln_value))?;
            line(out, "gauss error", delta(report.ln_gauss - c.ln_value))?;
            line(out, "edgeworth error", delta(report.ln_edgeworth - c.ln_value))?;
        }
        Some(Err(e)) => line(out, "exact", format!("unavailable: {e}"))?,
        None => {}
    }
    if let Some(mc) = &mc {
        line(out, "mc kappa3", format!("{} ± {}", sig6(mc.kappa3_hat), sig6(mc.se3)))?;
        line(out, "mc kappa4", format!("{} ± {}", sig6(mc.kappa4_hat), sig6(mc.se4)))?;
        line(out, "mc samples", format!("{} (seed {})", mc.samples, mc.seed))?;
    }
    write_diagnostics(out, &report.diagnostics)?;
    Ok(code)
}

fn cmd_repro(table: u8, out: &mut dyn Write) -> Result<i32, CliError> {
    let budget = budget_or(repro::DEFAULT_BUDGET)?;
    let opts = SolverOptions::default();
    let outcome = match table {
        1 => repro::run_table1(&budget, &opts)?,
        2 => repro::run_table2(&budget, &opts)?,
        _ => repro::run_table3(&budget, &opts)?,
    };
    for l in &outcome.lines {
        writeln!(out, "{l}")?;
    }
    Ok(if outcome.passed() { exit::OK } else { exit::REPRO_FAIL })
}

fn cmd_oracle(args: &OracleArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (instance, _) = resolve(&args.instance).map_err(CliError::Usage)?;
    let count = run_exact(&instance, &budget()?)?;
    if args.json {
        let mut value = exact_json(&count);
        value["instance"] = json!(instance);
        emit_json(out, &value)?;
    } else {
        line(out, "instance", instance.describe())?;
        line(out, "count", &count.value)?;
        line(out, "ln count", sig6(count.ln_value))?;
        line(out, "states", count.states)?;
    }
    Ok(exit::OK)
}

fn summary_json(s: &CumulantSummary) -> Value {
    json!({ "dim": s.dim, "log_det_v": s.log_det_v, "kappa3": s.kappa3, "kappa4": s.kappa4 })
}

fn cmd_diag(args: &DiagArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (instance, file_opts) = resolve(&args.instance).map_err(CliError::Usage)?;
    let opts = solver_options(&args.solver, &file_opts)?;
    let mut value = json!({ "instance": instance });
    match &instance {
        Instance::Table { rows, cols } => {
            let spec = entropy_count::MarginSpec::new(rows.clone(), cols.clone())?;
            let fit = fit_table(&spec, &opts)?;
            let summary = summarize(&build_table_covariance(&fit), &EdgeCoefficients::from_table_fit(&fit))?;
            let (lo, hi) = min_max(fit.mu.iter().copied());
            value["fit"] = json!({
                "iterations": fit.iterations, "residual": fit.residual, "entropy": fit.entropy,
                "mu_min": lo, "mu_max": hi,
            });
            value["summary"] = summary_json(&summary);
            let equal = rows.iter().all(|&r| r == rows[0]) && cols.iter().all(|&c| c == cols[0]);
            if equal {
                let closed = closed_form_equal_margins(spec.m(), spec.n(), rows[0] / spec.n() as f64);
                value["closed_form"] = summary_json(&closed);
            }
            value["diagnostics"] = json!(validity_diagnostics_table(&spec, &fit));
        }
        Instance::Graph { degrees } => {
            let spec = entropy_count::DegreeSpec::new(degrees.clone())?;
            let fit = fit_graph(&spec, &opts)?;
            value["peeling"] = json!({
                "removed_isolated": fit.peeling.removed_isolated,
                "peeled_full": fit.peeling.peeled_full,
                "core_size": fit.n(),
            });
            if fit.n() > 0 {
                let summary = summarize(&build_graph_covariance(&fit)?, &EdgeCoefficients::from_graph_fit(&fit))?;
                let off_diagonal = (0..fit.n()).flat_map(|i| (i + 1..fit.n()).map(move |j| (i, j)));
                let (lo, hi) = min_max(off_diagonal.map(|(i, j)| fit.mu[(i, j)]));
                value["fit"] = json!({
                    "iterations": fit.iterations, "residual": fit.residual, "entropy": fit.entropy,
                    "mu_min": lo, "mu_max": hi,
                });
                value["summary"] = summary_json(&summary);
                let core = &fit.peeling.core_degrees;
                let mut distinct: Vec<f64> = core.clone();
                distinct.sort_by(|a, b| b.total_cmp(a));
                distinct.dedup();
                if distinct.len() == 1 {
                    let cf = closed_form_regular_graph(fit.n(), distinct[0])?;
                    let mut closed = summary_json(&cf.summary);
                    closed["printed_kappa3"] = json!(cf.printed_kappa3);
                    closed["printed_kappa4"] = json!(cf.printed_kappa4);
                    value["closed_form"] = closed;
                } else if distinct.len() == 2 {
                    // vertices are grouped by degree; pick one representative per class
                    let a = core.iter().position(|&d| d == distinct[0]).unwrap();
                    let b = core.iter().position(|&d| d == distinct[1]).unwrap();
                    let n1 = core.iter().filter(|&&d| d == distinct[0]).count();
                    let n2 = core.len() - n1;
                    let var = |p: f64| p * (1.0 - p);
                    let a2 = core.iter().enumerate().position(|(i, &d)| d == distinct[0] && i != a);
                    let b2 = core.iter().enumerate().position(|(i, &d)| d == distinct[1] && i != b);
                    if let (Some(a2), Some(b2)) = (a2, b2) {
                        let log_det = two_class_log_det(
                            n1,
                            n2,
                            var(fit.mu[(a, a2)]),
                            var(fit.mu[(a, b)]),
                            var(fit.mu[(b, b2)]),
                        );
                        value["closed_form"] = json!({ "log_det_v": log_det });
                    }
                }
            }
            value["diagnostics"] = json!(validity_diagnostics_graph(&spec, &fit));
        }
    }
    if args.json {
        emit_json(out, &value)?;
    } else {
        write_diag_text(out, &value)?;
    }
    Ok(exit::OK)
}

fn min_max(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

fn write_diag_text(out: &mut dyn Write, value: &Value) -> Result<(), CliError> {
    let num = |v: &Value| v.as_f64().map_or_else(|| v.to_string(), sig6);
    for section in ["peeling", "fit", "summary", "closed_form"] {
        if let Some(Value::Object(map)) = value.get(section) {
            writeln!(out, "[{section}]")?;
            for (k, v) in map {
                let shown = if v.is_u64() { v.to_string() } else { num(v) };
                line(out, &format!("  {k}"), shown)?;
            }
        }
    }
    if let Some(Value::Array(diags)) = value.get("diagnostics") {
        let diags: Vec<Diagnostic> = diags
            .iter()
            .filter_map(|d| serde_json::from_value(d.clone()).ok())
            .collect();
        if diags.is_empty() {
            writeln!(out, "no validity warnings")?;
        }
        write_diagnostics(out, &diags)?;
    }
    Ok(())
}
