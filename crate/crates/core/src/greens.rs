//! Green's function of `D^alpha u + h = 0`, `u(a) = 0`, `D^beta u(b) = 0`:
//!
//! ```text
//! Γ(α) G(t,s) = (t-a)^(α-1) ((b-s)/(b-a))^(α-1-β) - (t-s)^(α-1)   a <= s <= t <= b
//! Γ(α) G(t,s) = (t-a)^(α-1) ((b-s)/(b-a))^(α-1-β)                 a <= t <= s <= b
//! ```
//!
//! together with the closed forms for its diagonal maximum and for the
//! maximum of its row integral, and the Nyström discretization of
//! `u ↦ ∫ G(·,s) u(s) ds` used by the solver and the spectral checks.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fractional::ProductWeights;
use crate::gamma::gamma_unchecked;
use crate::grid::{Grid, GridFunction};

/// `alpha - 1 - beta` below this is treated as exactly zero.
const GAP_SNAP: f64 = 1e-12;

/// Geometry `(alpha, beta, a, b)` of the boundary value problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemSpec {
    alpha: f64,
    beta: f64,
    a: f64,
    b: f64,
    gap: f64,
}

impl ProblemSpec {
    /// Requires `1 < alpha <= 2`, `0 <= beta <= alpha - 1`, `a < b`.
    pub fn new(alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        if ![alpha, beta, a, b].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidProblem("alpha, beta, a, b must be finite".into()));
        }
        if !(alpha > 1.0 && alpha <= 2.0) {
            return Err(Error::InvalidProblem(format!("alpha must lie in (1, 2], got {alpha}")));
        }
        if beta < 0.0 {
            return Err(Error::InvalidProblem(format!("beta must be >= 0, got {beta}")));
        }
        if a >= b {
            return Err(Error::InvalidProblem(format!("need a < b, got [{a}, {b}]")));
        }
        let raw_gap = alpha - 1.0 - beta;
        if raw_gap < -GAP_SNAP {
            if beta <= 1.0 {
                return Err(Error::BetaAboveLimit { beta, limit: alpha - 1.0 });
            }
            return Err(Error::InvalidProblem(format!("beta must lie in [0, alpha - 1], got {beta}")));
        }
        let gap = if raw_gap.abs() <= GAP_SNAP { 0.0 } else { raw_gap };
        Ok(Self { alpha, beta, a, b, gap })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// `alpha - 1 - beta`, snapped to exactly zero at the boundary case.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Same orders on `[a, b]`.
    pub fn with_interval(&self, a: f64, b: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, a, b)
    }

    pub fn grid(&self, n: usize) -> Result<Grid> {
        Grid::new(self.a, self.b, n)
    }

    /// Accepts a grid whose endpoints agree with `[a, b]` up to round-off.
    pub fn check_grid(&self, grid: &Grid) -> Result<()> {
        let tol = 1e-12 * self.length().max(self.a.abs()).max(self.b.abs());
        if (grid.a() - self.a).abs() > tol || (grid.b() - self.b).abs() > tol {
            return Err(Error::IntervalMismatch { grid_a: grid.a(), grid_b: grid.b(), a: self.a, b: self.b });
        }
        Ok(())
    }

    fn clamp_arg(&self, name: &str, x: f64) -> Result<f64> {
        let tol = 1e-12 * self.length();
        if !(x >= self.a - tol && x <= self.b + tol) {
            return Err(Error::Domain(format!("{name} = {x} lies outside [{}, {}]", self.a, self.b)));
        }
        Ok(x.clamp(self.a, self.b))
    }
}

/// A maximizer and the maximum it attains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremalPoint {
    pub location: f64,
    pub value: f64,
}

/// `base^exp` for `base >= 0` with `x^0 = 1` for every `x`, including 0.
#[inline]
fn pow0(base: f64, exp: f64) -> f64 {
    debug_assert!(base >= 0.0, "negative base {base}");
    if exp == 0.0 {
        1.0
    } else {
        base.powf(exp)
    }
}

/// `G(t, s)`. The diagonal `t = s` is evaluated on the `t <= s` branch.
pub fn greens_value(t: f64, s: f64, p: &ProblemSpec) -> Result<f64> {
    let t = p.clamp_arg("t", t)?;
    let s = p.clamp_arg("s", s)?;
    Ok(greens_value_unchecked(t, s, p))
}

pub(crate) fn greens_value_unchecked(t: f64, s: f64, p: &ProblemSpec) -> f64 {
    let am1 = p.alpha - 1.0;
    let lead = pow0(t - p.a, am1);
    let weight = pow0((p.b - s) / p.length(), p.gap);
    let value = if s < t {
        // (t-a)^(α-1) [ ((b-s)/(b-a))^(α-1-β) - ((t-s)/(t-a))^(α-1) ], clamped
        // against round-off since the bracket is nonnegative.
        let ratio = (t - s) / (t - p.a);
        (lead * (weight - pow0(ratio, am1))).max(0.0)
    } else {
        lead * weight
    };
    value / gamma_unchecked(p.alpha)
}

/// Diagonal `g(s) = G(s, s)`.
pub fn greens_diag(s: f64, p: &ProblemSpec) -> Result<f64> {
    let s = p.clamp_arg("s", s)?;
    let num = pow0(s - p.a, p.alpha - 1.0) * pow0(p.b - s, p.gap);
    Ok(num / (pow0(p.length(), p.gap) * gamma_unchecked(p.alpha)))
}

/// Maximizer `s*` of the diagonal and `G(s*, s*)`.
pub fn diag_argmax(p: &ProblemSpec) -> ExtremalPoint {
    let am1 = p.alpha - 1.0;
    let denom = am1 + p.gap; // 2α - 2 - β > 0
    let location = if p.gap == 0.0 { p.b } else { (am1 * p.b + p.gap * p.a) / denom };
    let shape = if p.gap == 0.0 { 1.0 } else { (p.gap * (p.gap / denom).ln()).exp() };
    let value = pow0(p.length() * am1 / denom, am1) * shape / gamma_unchecked(p.alpha);
    ExtremalPoint { location, value }
}

/// Closed form of `∫_a^b G(t, s) ds`:
/// `(t-a)^(α-1) / Γ(α+1) · [α/(α-β) (b-a) - (t-a)]`.
pub fn greens_row_integral(t: f64, p: &ProblemSpec) -> Result<f64> {
    let t = p.clamp_arg("t", t)?;
    Ok(row_integral_unchecked(t, p))
}

fn row_integral_unchecked(t: f64, p: &ProblemSpec) -> f64 {
    let x = t - p.a;
    let reach = p.alpha / (p.gap + 1.0) * p.length();
    pow0(x, p.alpha - 1.0) * (reach - x) / gamma_unchecked(p.alpha + 1.0)
}

/// Maximizer `t* = a + (α-1)/(α-β) (b-a)` of the row integral and
/// `(α-1)^(α-1) (b-a)^α / ((α-β)^α Γ(α+1))`.
pub fn row_integral_max(p: &ProblemSpec) -> ExtremalPoint {
    let am1 = p.alpha - 1.0;
    let amb = p.gap + 1.0;
    let location = (p.a + am1 / amb * p.length()).min(p.b);
    let value = pow0(am1, am1) * p.length().powf(p.alpha) / (amb.powf(p.alpha) * gamma_unchecked(p.alpha + 1.0));
    ExtremalPoint { location, value }
}

/// Nyström matrix of `u ↦ ∫_a^b G(·, s) u(s) ds` on a grid: row `i` holds
/// `∫ G(t_i, s) φ_k(s) ds` for the hat functions `φ_k`, so the product with
/// node values is exact for piecewise-linear `u`.
#[derive(Debug, Clone)]
pub struct GreenOperator {
    grid: Grid,
    size: usize,
    entries: Vec<f64>,
}

impl GreenOperator {
    pub fn assemble(p: &ProblemSpec, grid: Grid) -> Result<Self> {
        Self::assemble_with(p, grid, Exec::default())
    }

    pub fn assemble_with(p: &ProblemSpec, grid: Grid, exec: Exec) -> Result<Self> {
        p.check_grid(&grid)?;
        // ∫ (b-s)^(α-1-β) u(s) ds = Γ(α-β) I^(α-β) u(b)
        let boundary = ProductWeights::new(&grid, p.gap + 1.0)?;
        let volterra = ProductWeights::new(&grid, p.alpha)?;
        let size = grid.len();
        let n = grid.n();
        let lift = gamma_unchecked(p.gap + 1.0) / (pow0(p.length(), p.gap) * gamma_unchecked(p.alpha));
        let rows = exec.map_indices(size, |i| {
            let coef = pow0(grid.node(i) - p.a, p.alpha - 1.0) * lift;
            (0..size).map(|k| (coef * boundary.weight(n, k) - volterra.weight(i, k)).max(0.0)).collect::<Vec<f64>>()
        });
        Ok(Self { grid, size, entries: rows.concat() })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        self.apply_with(values, Exec::default())
    }

    pub fn apply_with(&self, values: &[f64], exec: Exec) -> Vec<f64> {
        debug_assert_eq!(values.len(), self.size);
        exec.map_indices(self.size, |i| dot(self.row(i), values))
    }

    /// Entrywise `G-weights · diag(q)`, i.e. the operator `u ↦ ∫ G q u`.
    pub fn with_column_scaling(&self, q: &[f64], exec: Exec) -> Vec<f64> {
        let size = self.size;
        let mut out = vec![0.0; size * size];
        match exec {
            Exec::Sequential => out.chunks_mut(size).enumerate().for_each(|(i, row)| scale_row(row, self.row(i), q)),
            Exec::Parallel => {
                let rows = exec.map_indices(size, |i| {
                    let mut row = vec![0.0; size];
                    scale_row(&mut row, self.row(i), q);
                    row
                });
                for (dst, src) in out.chunks_mut(size).zip(rows) {
                    dst.copy_from_slice(&src);
                }
            }
        }
        out
    }

    pub fn apply_to(&self, h: &GridFunction) -> Result<GridFunction> {
        if h.grid() != &self.grid {
            return Err(Error::GridMismatch { left: self.grid.n(), right: h.grid().n() });
        }
        GridFunction::from_values(self.grid, self.apply(h.values()))
    }
}

fn scale_row(dst: &mut [f64], src: &[f64], q: &[f64]) {
    for ((d, s), w) in dst.iter_mut().zip(src).zip(q) {
        *d = s * w;
    }
}

#[inline]
pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
