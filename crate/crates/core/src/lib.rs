//! Numerics for the Riemann–Liouville boundary value problem
//!
//! ```text
//! D_{a+}^alpha u + q(t) u = 0,   u(a) = 0,   D_{a+}^beta u(b) = 0,
//! 1 < alpha <= 2,   0 <= beta <= alpha - 1.
//! ```
//!
//! * [`fractional`]: fractional integrals/derivatives on uniform grids and
//!   their closed forms on powers.
//! * [`greens`]: the Green's function, its extremal values and its Nyström
//!   matrix.
//! * [`lyapunov`]: the Lyapunov-type bound and nonexistence verdict.
//! * [`solver`]: linear solves, residual checks and Picard iteration for
//!   `D^alpha u + f(t, u) = 0`.
//! * [`spectral`]: spectral radius of `u ↦ ∫ G q u` as an empirical check
//!   on the bound.
//! * [`expr`]: the expression language for `q(t)` and `f(t, u)`.

// Validation is written `!(x > y)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod expr;
pub mod fractional;
pub mod gamma;
pub mod greens;
pub mod grid;
pub mod lyapunov;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Exec;
pub use gamma::gamma;
pub use greens::{ExtremalPoint, ProblemSpec};
pub use grid::{FractionalOrder, Grid, GridFunction};
