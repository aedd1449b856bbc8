//! The four subcommands. Each returns its artifacts and an exit status.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use fraclyap_core::expr::{parse, Expr, Var};
use fraclyap_core::greens::{diag_argmax, greens_value, row_integral_max};
use fraclyap_core::lyapunov::{lyapunov_rhs, nonexistence_verdict, qplus_integral, Verdict};
use fraclyap_core::solver::{picard_solve, residual_check_with_boundary, NonlinearProblem, ResidualReport};
use fraclyap_core::spectral::{discretize_operator, sharpness_scan, spectral_radius, ScanFamily};
use fraclyap_core::{Error, GridFunction, ProblemSpec};
use log::{info, warn};
use serde_json::{json, Map, Value};

use crate::config::{CommonArgs, Format, RunConfig};
use crate::output::{num, Artifacts, Cell, Table};
use crate::CliError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONCLUSIVE: i32 = 10;
pub const EXIT_NOT_CONVERGED: i32 = 11;
pub const EXIT_SPECTRAL_NOT_CONVERGED: i32 = 12;

pub struct Outcome {
    pub artifacts: Artifacts,
    pub exit_code: i32,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Outcome {
    fn new(cfg: &RunConfig, report: Map<String, Value>, table: Table, exit_code: i32) -> Self {
        Outcome {
            artifacts: Artifacts { report: Value::Object(report), table },
            exit_code,
            format: cfg.format,
            output: cfg.output.clone(),
        }
    }
}

fn runtime(e: Error) -> CliError {
    CliError::Runtime(e.to_string())
}

fn problem_json(p: &ProblemSpec) -> Value {
    json!({ "alpha": num(p.alpha()), "beta": num(p.beta()), "a": num(p.a()), "b": num(p.b()) })
}

fn header(command: &str, p: &ProblemSpec) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(format!("fraclyap/v1/{command}")));
    m.insert("problem".into(), problem_json(p));
    m
}

/// Parses `q(t)` and samples it on the problem grid.
fn sample_potential(cfg: &RunConfig) -> Result<(String, GridFunction), CliError> {
    let source = cfg.q_expr.clone().ok_or_else(|| CliError::Config("this command needs a potential (--q)".into()))?;
    let expr = parse(&source).map_err(|e| CliError::Config(format!("q: {e}")))?;
    if expr.references(Var::U) {
        return Err(CliError::Config("q may depend on t only".into()));
    }
    let grid = cfg.problem.grid(cfg.grid_n).map_err(runtime)?;
    let q = GridFunction::try_from_fn(grid, |t| expr.eval(t, None))
        .map_err(|e| CliError::Config(format!("q = {source} on [{}, {}]: {e}", cfg.problem.a(), cfg.problem.b())))?;
    Ok((source, q))
}

pub fn bound(args: &CommonArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::resolve(args)?;
    let (source, q) = sample_potential(&cfg)?;
    let report = nonexistence_verdict(&cfg.problem, &q).map_err(runtime)?;
    info!("∫q₊ = {} against bound {}", report.q_plus_integral, report.rhs);

    let mut json = header("bound", &cfg.problem);
    json.insert("grid_n".into(), json!(cfg.grid_n));
    json.insert("q".into(), json!(source));
    json.insert("rhs".into(), num(report.rhs));
    json.insert("q_plus_integral".into(), num(report.q_plus_integral));
    json.insert("verdict".into(), json!(report.verdict.as_str()));
    json.insert("s_star".into(), num(report.s_star.location));
    json.insert("diag_max".into(), num(report.s_star.value));

    let mut table = Table::new(vec!["rhs", "q_plus_integral", "verdict", "s_star", "diag_max"]);
    table.push(vec![
        Cell::Float(report.rhs),
        Cell::Float(report.q_plus_integral),
        Cell::Text(report.verdict.as_str().into()),
        Cell::Float(report.s_star.location),
        Cell::Float(report.s_star.value),
    ]);
    let exit_code = match report.verdict {
        Verdict::NoNontrivialSolution => EXIT_OK,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    };
    Ok(Outcome::new(&cfg, json, table, exit_code))
}

fn residuals_json(r: &ResidualReport) -> Value {
    json!({
        "interior_residual_sup": num(r.interior_residual_sup),
        "bc_left": num(r.bc_left),
        "bc_right": num(r.bc_right),
        "grid_n": r.grid_n,
    })
}

pub fn solve(args: &CommonArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::resolve(args)?;
    let source = cfg.f_expr.clone().ok_or_else(|| CliError::Config("solve needs a nonlinearity (--f)".into()))?;
    let k_lip =
        cfg.lipschitz_k.ok_or_else(|| CliError::Config("solve needs the Lipschitz constant of f (--K)".into()))?;
    let f: Expr = parse(&source).map_err(|e| CliError::Config(format!("f: {e}")))?;
    let np = NonlinearProblem::new(cfg.problem, f.clone(), k_lip, cfg.boundary_k)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let result = picard_solve(&np, cfg.grid_n, cfg.tol, cfg.max_iter).map_err(runtime)?;
    if !result.contraction_guaranteed() {
        warn!(
            "b - a = {} is not below the contraction threshold {}; uniqueness is not guaranteed",
            cfg.problem.length(),
            result.contraction_threshold
        );
    }

    let u = &result.solution;
    let residuals = GridFunction::try_from_fn(*u.grid(), |t| {
        let i = ((t - u.grid().a()) / u.grid().step()).round() as usize;
        f.eval(t, Some(u.value(i)))
    })
    .and_then(|forcing| residual_check_with_boundary(u, &cfg.problem, &forcing, cfg.boundary_k));
    let residuals = match residuals {
        Ok(r) => residuals_json(&r),
        Err(e) => {
            warn!("residuals unavailable: {e}");
            Value::Null
        }
    };

    let mut json = header("solve", &cfg.problem);
    json.insert("grid_n".into(), json!(cfg.grid_n));
    json.insert("f".into(), json!(source));
    json.insert("lipschitz_k".into(), num(k_lip));
    json.insert("boundary_k".into(), num(cfg.boundary_k));
    json.insert("tol".into(), num(cfg.tol));
    json.insert("max_iter".into(), json!(cfg.max_iter));
    json.insert("converged".into(), json!(result.converged));
    json.insert("iterations".into(), json!(result.iterations));
    json.insert("contraction_threshold".into(), num(result.contraction_threshold));
    json.insert("predicted_contraction".into(), num(result.predicted_contraction));
    json.insert("contraction_guaranteed".into(), json!(result.contraction_guaranteed()));
    json.insert("sup_norm_deltas".into(), Value::Array(result.sup_norm_deltas.iter().map(|&d| num(d)).collect()));
    json.insert("solution_sup_norm".into(), num(u.sup_norm()));
    json.insert("residuals".into(), residuals);

    let mut table = Table::new(vec!["t", "u"]);
    for (t, &v) in u.grid().nodes().zip(u.values()) {
        table.push(vec![Cell::Float(t), Cell::Float(v)]);
    }
    let exit_code = if result.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    Ok(Outcome::new(&cfg, json, table, exit_code))
}

#[derive(Debug, Clone, Args)]
pub struct GreensArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of equally spaced t samples, endpoints included
    #[arg(long = "t-samples", default_value_t = 51)]
    pub t_samples: usize,
    /// Number of equally spaced s samples, endpoints included
    #[arg(long = "s-samples", default_value_t = 51)]
    pub s_samples: usize,
}

fn samples(p: &ProblemSpec, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| if i + 1 == count { p.b() } else { p.a() + p.length() * i as f64 / (count - 1) as f64 })
        .collect()
}

pub fn greens(args: &GreensArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::resolve(&args.common)?;
    if args.t_samples < 2 || args.s_samples < 2 {
        return Err(CliError::Config("sample counts must be at least 2".into()));
    }
    let p = &cfg.problem;
    let mut table = Table::new(vec!["t", "s", "G"]);
    for &t in &samples(p, args.t_samples) {
        for &s in &samples(p, args.s_samples) {
            table.push(vec![Cell::Float(t), Cell::Float(s), Cell::Float(greens_value(t, s, p).map_err(runtime)?)]);
        }
    }
    let s_star = diag_argmax(p);
    let t_star = row_integral_max(p);
    let mut json = header("greens", p);
    json.insert("t_samples".into(), json!(args.t_samples));
    json.insert("s_samples".into(), json!(args.s_samples));
    json.insert("s_star".into(), num(s_star.location));
    json.insert("diag_max".into(), num(s_star.value));
    json.insert("t_star".into(), num(t_star.location));
    json.insert("row_integral_max".into(), num(t_star.value));
    json.insert("lyapunov_rhs".into(), num(lyapunov_rhs(p)));
    Ok(Outcome::new(&cfg, json, table, EXIT_OK))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanKind {
    Constant,
    Bump,
}

#[derive(Debug, Clone, Args)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Also run a sharpness scan over a family of potentials scaled to the bound
    #[arg(long)]
    pub scan: bool,
    #[arg(long = "scan-family", value_enum, default_value_t = ScanKind::Bump)]
    pub scan_family: ScanKind,
    /// Bump center [default: the diagonal maximizer s*]
    #[arg(long = "bump-center", allow_negative_numbers = true)]
    pub bump_center: Option<f64>,
    /// Initial bump half-width, halved on each row [default: (b - a) / 2]
    #[arg(long = "bump-width")]
    pub bump_width: Option<f64>,
    /// Number of scan rows
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
}

pub fn spectral(args: &SpectralArgs) -> Result<Outcome, CliError> {
    let cfg = RunConfig::resolve(&args.common)?;
    let p = &cfg.problem;
    let (source, q) = sample_potential(&cfg)?;
    if q.values().iter().any(|&v| v < 0.0) {
        warn!("q takes negative values; the operator is no longer nonnegative and the estimate may not be the spectral radius");
    }
    let matrix = discretize_operator(p, &q).map_err(runtime)?;
    let report = spectral_radius(&matrix, cfg.tol, cfg.max_iter);
    let rhs = lyapunov_rhs(p);
    let q_plus = qplus_integral(&q);

    let mut json = header("spectral", p);
    json.insert("grid_n".into(), json!(cfg.grid_n));
    json.insert("q".into(), json!(source));
    json.insert("tol".into(), num(cfg.tol));
    json.insert("max_iter".into(), json!(cfg.max_iter));
    json.insert("radius".into(), num(report.radius));
    json.insert("iterations".into(), json!(report.iterations));
    json.insert("converged".into(), json!(report.converged));
    json.insert("residual".into(), num(report.residual));
    json.insert("q_plus_integral".into(), num(q_plus));
    json.insert("lyapunov_rhs".into(), num(rhs));

    let mut converged = report.converged;
    let table = if args.scan {
        let family = match args.scan_family {
            ScanKind::Constant => ScanFamily::Constant,
            ScanKind::Bump => ScanFamily::Bump {
                center: args.bump_center.unwrap_or_else(|| diag_argmax(p).location),
                width: args.bump_width.unwrap_or(p.length() / 2.0),
            },
        };
        let rows = sharpness_scan(p, family, args.samples, cfg.grid_n, cfg.tol, cfg.max_iter)
            .map_err(|e| CliError::Config(e.to_string()))?;
        converged &= rows.iter().all(|r| r.converged);
        let mut table = Table::new(vec!["parameter", "scaled_integral", "radius", "converged"]);
        let mut scan = Vec::new();
        for r in &rows {
            table.push(vec![
                Cell::Float(r.parameter),
                Cell::Float(r.scaled_integral),
                Cell::Float(r.radius),
                Cell::Bool(r.converged),
            ]);
            scan.push(json!({
                "parameter": num(r.parameter),
                "scaled_integral": num(r.scaled_integral),
                "radius": num(r.radius),
                "converged": r.converged,
            }));
        }
        let family_name = match args.scan_family {
            ScanKind::Constant => "constant",
            ScanKind::Bump => "bump",
        };
        json.insert("scan_family".into(), json!(family_name));
        json.insert("scan".into(), Value::Array(scan));
        table
    } else {
        let mut table = Table::new(vec!["radius", "iterations", "converged", "residual"]);
        table.push(vec![
            Cell::Float(report.radius),
            Cell::Int(report.iterations as u64),
            Cell::Bool(report.converged),
            Cell::Float(report.residual),
        ]);
        table
    };
    let exit_code = if converged { EXIT_OK } else { EXIT_SPECTRAL_NOT_CONVERGED };
    Ok(Outcome::new(&cfg, json, table, exit_code))
}
