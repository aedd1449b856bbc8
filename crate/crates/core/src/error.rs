use thiserror::Error;

use crate::expr::EvalError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma function has a pole at {0}")]
    GammaPole(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid function has {got} values but the grid has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value {value} at node {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid fractional order {order}: {reason}")]
    InvalidOrder { order: f64, reason: &'static str },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// `beta` lies in `(alpha - 1, 1]`: the diagonal of the Green's function
    /// is singular at `b` and has no maximum, so no finite bound exists.
    #[error(
        "beta = {beta} exceeds alpha - 1 = {limit}; for beta in (alpha - 1, 1] the Green's \
         function diagonal G(s,s) blows up at s = b and has no maximum, so no Lyapunov-type \
         constant exists"
    )]
    BetaAboveLimit { beta: f64, limit: f64 },

    #[error("grid spans [{grid_a}, {grid_b}] but the problem is posed on [{a}, {b}]")]
    IntervalMismatch { grid_a: f64, grid_b: f64, a: f64, b: f64 },

    #[error("grids differ (n = {left} vs n = {right}, or different endpoints)")]
    GridMismatch { left: usize, right: usize },

    #[error("evaluating the nonlinearity at t = {t}, u = {u}: {source}")]
    Nonlinearity {
        t: f64,
        u: f64,
        #[source]
        source: EvalError,
    },

    #[error("expression evaluation failed: {0}")]
    Eval(#[from] EvalError),
}
