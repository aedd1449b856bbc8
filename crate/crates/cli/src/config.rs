//! Run configuration: a TOML file overlaid with command-line flags.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use fraclyap_core::ProblemSpec;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_GRID_N: usize = 512;
pub const MIN_GRID_N: usize = 16;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }

    pub fn other(self) -> Format {
        match self {
            Format::Json => Format::Csv,
            Format::Csv => Format::Json,
        }
    }
}

/// Flags shared by every subcommand. Each one overrides the matching key
/// of the `--config` file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// TOML file with any of the keys below (snake_case)
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Order of the derivative in the equation, 1 < alpha <= 2
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Order of the derivative in the right boundary condition, 0 <= beta <= alpha - 1
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Left endpoint [default: 0]
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Right endpoint [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Number of grid subintervals [default: 512]
    #[arg(long = "n", value_name = "GRID_N")]
    pub grid_n: Option<usize>,
    /// Potential q(t), an expression in t
    #[arg(long)]
    pub q: Option<String>,
    /// Nonlinearity f(t, u), an expression in t and u
    #[arg(long)]
    pub f: Option<String>,
    /// Lipschitz constant of f in u
    #[arg(long = "K", value_name = "K")]
    pub lipschitz_k: Option<f64>,
    /// Right boundary value, D^beta u(b) = k [default: 0]
    #[arg(long = "k", value_name = "k", allow_negative_numbers = true)]
    pub boundary_k: Option<f64>,
    /// Convergence tolerance [default: 1e-10]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap [default: 200]
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    /// Output file; the companion table or report goes next to it with the other extension
    #[arg(long = "out", value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Format written to --out or stdout [default: json]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    alpha: Option<f64>,
    beta: Option<f64>,
    a: Option<f64>,
    b: Option<f64>,
    grid_n: Option<usize>,
    q: Option<String>,
    f: Option<String>,
    lipschitz_k: Option<f64>,
    boundary_k: Option<f64>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    output: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub grid_n: usize,
    pub q_expr: Option<String>,
    pub f_expr: Option<String>,
    pub lipschitz_k: Option<f64>,
    pub boundary_k: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn load_file(path: &Path) -> Result<FileConfig, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => load_file(path)?,
            None => FileConfig::default(),
        };
        let alpha = args
            .alpha
            .or(file.alpha)
            .ok_or_else(|| CliError::Config("alpha is required (--alpha or `alpha` in the config file)".into()))?;
        let beta = args.beta.or(file.beta).unwrap_or(0.0);
        let a = args.a.or(file.a).unwrap_or(0.0);
        let b = args.b.or(file.b).unwrap_or(1.0);
        let problem = ProblemSpec::new(alpha, beta, a, b).map_err(|e| CliError::Config(e.to_string()))?;

        let grid_n = args.grid_n.or(file.grid_n).unwrap_or(DEFAULT_GRID_N);
        if grid_n < MIN_GRID_N {
            return Err(CliError::Config(format!("grid_n must be at least {MIN_GRID_N}, got {grid_n}")));
        }
        let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {tol}")));
        }
        let max_iter = args.max_iter.or(file.max_iter).unwrap_or(DEFAULT_MAX_ITER);
        if max_iter == 0 {
            return Err(CliError::Config("max_iter must be at least 1".into()));
        }
        let boundary_k = args.boundary_k.or(file.boundary_k).unwrap_or(0.0);
        if !boundary_k.is_finite() {
            return Err(CliError::Config(format!("boundary_k must be finite, got {boundary_k}")));
        }
        Ok(RunConfig {
            problem,
            grid_n,
            q_expr: args.q.clone().or(file.q),
            f_expr: args.f.clone().or(file.f),
            lipschitz_k: args.lipschitz_k.or(file.lipschitz_k),
            boundary_k,
            tol,
            max_iter,
            output: args.output.clone().or(file.output),
            format: args.format.or(file.format).unwrap_or(Format::Json),
        })
    }
}
