//! Linear solves through the Green's function, residual checks, and the
//! contraction-mapping (Picard) solver for `D^alpha u + f(t, u) = 0` with
//! `u(a) = 0`, `D^beta u(b) = k`.

use log::debug;

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::fractional::{frac_derivative_corrected, frac_integral_corrected, right_end_slope};
use crate::gamma::gamma_unchecked;
use crate::greens::{row_integral_max, GreenOperator, ProblemSpec};
use crate::grid::{FractionalOrder, Grid, GridFunction};

/// `u(t_i) = ∫ G(t_i, s) h(s) ds`, exact for piecewise-linear `h`.
pub fn solve_linear(p: &ProblemSpec, h: &GridFunction) -> Result<GridFunction> {
    GreenOperator::assemble(p, *h.grid())?.apply_to(h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// `max |D^alpha u + source|` over interior nodes.
    pub interior_residual_sup: f64,
    /// `|u(a)|`
    pub bc_left: f64,
    /// `|D^beta u(b) - k|`; `k = 0` unless checked against a lift.
    pub bc_right: f64,
    pub grid_n: usize,
}

/// Residuals of `D^alpha u + source = 0`, `u(a) = 0`, `D^beta u(b) = 0`.
///
/// Fractional operators on `u` are corrected for the powers `(t-a)^(α-1)`
/// and `(t-a)^α` that solutions carry at `a`.
pub fn residual_check(u: &GridFunction, p: &ProblemSpec, source: &GridFunction) -> Result<ResidualReport> {
    residual_check_with_boundary(u, p, source, 0.0)
}

/// As [`residual_check`], with right boundary condition `D^beta u(b) = k`.
pub fn residual_check_with_boundary(
    u: &GridFunction,
    p: &ProblemSpec,
    source: &GridFunction,
    k: f64,
) -> Result<ResidualReport> {
    p.check_grid(u.grid())?;
    u.ensure_same_grid(source)?;
    let grid = u.grid();
    let n = grid.n();
    let exponents = singular_exponents(p);
    let derivative = frac_derivative_corrected(u, FractionalOrder::new(p.alpha())?, &exponents)?;
    let interior_residual_sup =
        (1..n).map(|i| (derivative.values.value(i) + source.value(i)).abs()).fold(0.0, f64::max);
    Ok(ResidualReport {
        interior_residual_sup,
        bc_left: u.value(0).abs(),
        bc_right: (right_derivative(u, p.beta(), &exponents)? - k).abs(),
        grid_n: n,
    })
}

/// `D^beta u(b)` for `0 <= beta <= 1`: `u(b)` when `beta = 0`, otherwise the
/// one-sided slope of `I^(1-beta) u` at `b`.
pub fn right_fractional_derivative(u: &GridFunction, beta: f64) -> Result<f64> {
    right_derivative(u, beta, &[])
}

fn singular_exponents(p: &ProblemSpec) -> [f64; 2] {
    [p.alpha() - 1.0, p.alpha()]
}

fn right_derivative(u: &GridFunction, beta: f64, exponents: &[f64]) -> Result<f64> {
    if beta == 0.0 {
        return Ok(u.value(u.grid().n()));
    }
    let smoothed =
        if beta < 1.0 { frac_integral_corrected(u, FractionalOrder::new(1.0 - beta)?, exponents)? } else { u.clone() };
    Ok(right_end_slope(smoothed.values(), u.grid().step()))
}

/// Supremum of interval lengths `b - a` for which `K ∫ G(t,s) ds < 1`:
/// `[(α-β)^α Γ(α+1) / (K (α-1)^(α-1))]^(1/α)`.
pub fn contraction_threshold(p: &ProblemSpec, lipschitz_k: f64) -> Result<f64> {
    if !(lipschitz_k > 0.0 && lipschitz_k.is_finite()) {
        return Err(Error::Domain(format!("Lipschitz constant must be positive, got {lipschitz_k}")));
    }
    let alpha = p.alpha();
    let am1 = alpha - 1.0;
    let amb = p.gap() + 1.0;
    let ratio = amb.powf(alpha) * gamma_unchecked(alpha + 1.0) / (lipschitz_k * am1.powf(am1));
    Ok(ratio.powf(1.0 / alpha))
}

/// `w(t) = k Γ(α-β) / (Γ(α) (b-a)^(α-1-β)) (t-a)^(α-1)`: `D^alpha w = 0`,
/// `w(a) = 0`, `D^beta w(b) = k`.
pub fn homogeneous_lift(p: &ProblemSpec, k: f64, grid: Grid) -> Result<GridFunction> {
    p.check_grid(&grid)?;
    if k == 0.0 {
        return Ok(GridFunction::zeros(grid));
    }
    let gap = p.gap();
    let length_factor = if gap == 0.0 { 1.0 } else { p.length().powf(gap) };
    let coef = k * gamma_unchecked(gap + 1.0) / (gamma_unchecked(p.alpha()) * length_factor);
    GridFunction::from_fn(grid, |t| coef * (t - p.a()).powf(p.alpha() - 1.0))
}

/// `D^alpha u + f(t, u) = 0`, `u(a) = 0`, `D^beta u(b) = boundary_k`, with
/// `|f(t, x) - f(t, y)| <= lipschitz_k |x - y|`.
#[derive(Debug, Clone)]
pub struct NonlinearProblem {
    pub spec: ProblemSpec,
    pub f: Expr,
    pub lipschitz_k: f64,
    pub boundary_k: f64,
}

impl NonlinearProblem {
    pub fn new(spec: ProblemSpec, f: Expr, lipschitz_k: f64, boundary_k: f64) -> Result<Self> {
        if !(lipschitz_k > 0.0 && lipschitz_k.is_finite()) {
            return Err(Error::Domain(format!("Lipschitz constant must be positive, got {lipschitz_k}")));
        }
        if !boundary_k.is_finite() {
            return Err(Error::Domain(format!("boundary value must be finite, got {boundary_k}")));
        }
        Ok(Self { spec, f, lipschitz_k, boundary_k })
    }

    /// `K · max_t ∫ G(t, s) ds`, the Lipschitz constant of the integral map.
    pub fn predicted_contraction(&self) -> f64 {
        self.lipschitz_k * row_integral_max(&self.spec).value
    }

    pub fn contraction_threshold(&self) -> f64 {
        contraction_threshold(&self.spec, self.lipschitz_k).expect("K validated at construction")
    }
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    pub solution: GridFunction,
    pub iterations: usize,
    /// `‖u_{m+1} - u_m‖∞` for every step taken.
    pub sup_norm_deltas: Vec<f64>,
    pub predicted_contraction: f64,
    pub contraction_threshold: f64,
    pub converged: bool,
}

impl PicardResult {
    /// Whether the interval is short enough for the map to be a contraction.
    pub fn contraction_guaranteed(&self) -> bool {
        self.predicted_contraction < 1.0
    }

    /// Ratios `delta[m+1] / delta[m]` of successive nonzero deltas.
    pub fn step_ratios(&self) -> Vec<f64> {
        self.sup_norm_deltas.windows(2).filter(|w| w[0] > 0.0).map(|w| w[1] / w[0]).collect()
    }
}

/// Deltas beyond this are treated as divergence.
const DIVERGENCE_LIMIT: f64 = 1e100;

/// Iteration `u ↦ ∫ G(·, s) f(s, u(s)) ds + w` on a fixed grid.
#[derive(Debug, Clone)]
pub struct PicardSolver<'a> {
    problem: &'a NonlinearProblem,
    operator: GreenOperator,
    lift: Vec<f64>,
}

impl<'a> PicardSolver<'a> {
    pub fn new(problem: &'a NonlinearProblem, grid_n: usize) -> Result<Self> {
        let grid = problem.spec.grid(grid_n)?;
        let operator = GreenOperator::assemble(&problem.spec, grid)?;
        let lift = homogeneous_lift(&problem.spec, problem.boundary_k, grid)?.into_values();
        Ok(Self { problem, operator, lift })
    }

    pub fn grid(&self) -> &Grid {
        self.operator.grid()
    }

    /// One application of the integral map.
    pub fn step(&self, u: &[f64]) -> Result<Vec<f64>> {
        let forcing = self
            .grid()
            .nodes()
            .zip(u)
            .map(|(t, &x)| self.problem.f.eval(t, Some(x)).map_err(|source| Error::Nonlinearity { t, u: x, source }))
            .collect::<Result<Vec<f64>>>()?;
        let mut next = self.operator.apply(&forcing);
        for (v, w) in next.iter_mut().zip(&self.lift) {
            *v += w;
        }
        Ok(next)
    }

    /// Iterates from `initial` until `‖u_{m+1} - u_m‖∞ <= tol` or `max_iter`
    /// steps. Non-convergence and divergence are reported, not raised.
    pub fn run(&self, initial: &GridFunction, tol: f64, max_iter: usize) -> Result<PicardResult> {
        if initial.grid() != self.grid() {
            return Err(Error::GridMismatch { left: self.grid().n(), right: initial.grid().n() });
        }
        let predicted_contraction = self.problem.predicted_contraction();
        let contraction_threshold = self.problem.contraction_threshold();
        if predicted_contraction >= 1.0 {
            debug!(
                "b - a = {} is not below the contraction threshold {contraction_threshold}; \
                 convergence is not guaranteed",
                self.problem.spec.length()
            );
        }
        let mut u = initial.values().to_vec();
        let mut deltas = Vec::new();
        let mut converged = false;
        while deltas.len() < max_iter {
            let next = self.step(&u)?;
            let delta = next.iter().zip(&u).fold(0.0, |m: f64, (x, y)| m.max((x - y).abs()));
            deltas.push(delta);
            u = next;
            debug!("picard step {}: delta = {delta:e}", deltas.len());
            if delta <= tol {
                converged = true;
                break;
            }
            if !delta.is_finite() || delta > DIVERGENCE_LIMIT {
                break;
            }
        }
        Ok(PicardResult {
            solution: GridFunction::from_values(*self.grid(), u)?,
            iterations: deltas.len(),
            sup_norm_deltas: deltas,
            predicted_contraction,
            contraction_threshold,
            converged,
        })
    }
}

/// Picard iteration from `u_0 ≡ 0`.
pub fn picard_solve(np: &NonlinearProblem, grid_n: usize, tol: f64, max_iter: usize) -> Result<PicardResult> {
    let solver = PicardSolver::new(np, grid_n)?;
    solver.run(&GridFunction::zeros(*solver.grid()), tol, max_iter)
}
