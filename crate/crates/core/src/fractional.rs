//! Riemann–Liouville fractional integrals and derivatives.
//!
//! Grid operators use the product trapezoidal rule: `u` is replaced by its
//! piecewise-linear interpolant and integrated exactly against the weakly
//! singular kernel `(t - s)^(nu - 1)`. For node `t_j = a + j h`,
//!
//! ```text
//! I^nu u(t_j) ≈ h^nu / Γ(nu + 2) · ( d_j u_0 + Σ_{k=1}^{j-1} c_{j-k} u_k + u_j )
//! c_m = (m + 1)^(nu+1) - 2 m^(nu+1) + (m - 1)^(nu+1)
//! d_j = (j - 1)^(nu+1) - (j - nu - 1) j^nu
//! ```
//!
//! The rule is exact whenever `u` is piecewise linear on the grid.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::gamma::{gamma_unchecked, recip_gamma};
use crate::grid::{FractionalOrder, Grid, GridFunction};

/// Product trapezoidal weights of `I^nu` on a uniform grid.
#[derive(Debug, Clone)]
pub struct ProductWeights {
    scale: f64,
    interior: Vec<f64>,
    first: Vec<f64>,
}

impl ProductWeights {
    pub fn new(grid: &Grid, order: f64) -> Result<Self> {
        if !(order > 0.0 && order.is_finite()) {
            return Err(Error::InvalidOrder { order, reason: "integral order must be > 0" });
        }
        let n = grid.n();
        let p = order + 1.0;
        let pow_p = |m: f64| if m <= 0.0 { 0.0 } else { m.powf(p) };
        let mut interior = vec![0.0; n + 1];
        for (m, c) in interior.iter_mut().enumerate().skip(1) {
            let m = m as f64;
            *c = pow_p(m + 1.0) - 2.0 * pow_p(m) + pow_p(m - 1.0);
        }
        let mut first = vec![0.0; n + 1];
        for (j, d) in first.iter_mut().enumerate().skip(1) {
            let jf = j as f64;
            *d = pow_p(jf - 1.0) - (jf - order - 1.0) * jf.powf(order);
        }
        let scale = grid.step().powf(order) / gamma_unchecked(order + 2.0);
        Ok(Self { scale, interior, first })
    }

    /// Weight of `u_k` in the approximation of `I^nu u(t_j)`.
    #[inline]
    pub fn weight(&self, j: usize, k: usize) -> f64 {
        if k > j || j == 0 {
            0.0
        } else if k == j {
            self.scale
        } else if k == 0 {
            self.scale * self.first[j]
        } else {
            self.scale * self.interior[j - k]
        }
    }

    /// `I^nu u(t_j)` for the interpolant of `values`.
    pub fn apply_at(&self, j: usize, values: &[f64]) -> f64 {
        if j == 0 {
            return 0.0;
        }
        let acc = self.first[j] * values[0] + values[j];
        let acc = values[1..j].iter().zip(self.interior[1..j].iter().rev()).fold(acc, |acc, (v, w)| acc + w * v);
        self.scale * acc
    }
}

/// `I_{a+}^nu u` sampled at every node. The value at `t_0` is zero.
pub fn frac_integral(u: &GridFunction, order: FractionalOrder) -> Result<GridFunction> {
    frac_integral_with(u, order, Exec::default())
}

pub fn frac_integral_with(u: &GridFunction, order: FractionalOrder, exec: Exec) -> Result<GridFunction> {
    let weights = ProductWeights::new(u.grid(), order.value())?;
    let values = u.values();
    let out = exec.map_indices(values.len(), |j| weights.apply_at(j, values));
    GridFunction::from_values(*u.grid(), out)
}

/// `I_{a+}^nu u` with starting-weight corrections: the rule is additionally
/// exact for `(t - a)^sigma`, `sigma` in `exponents` (each `> 0`), while
/// staying exact for `1` and `t - a`. The corrections act on the first
/// `m + 2` nodes, `m` the number of distinct non-integer exponents.
///
/// Without the correction the interpolation error of `(t - a)^sigma`,
/// `0 < sigma < 1`, in the first cell spoils finite differences of the
/// result near `a`.
pub fn frac_integral_corrected(u: &GridFunction, order: FractionalOrder, exponents: &[f64]) -> Result<GridFunction> {
    let nu = order.value();
    let grid = u.grid();
    let weights = ProductWeights::new(grid, nu)?;
    let mut sigmas: Vec<f64> = vec![0.0, 1.0];
    for &s in exponents {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("starting exponent must be > 0, got {s}")));
        }
        if sigmas.iter().all(|&t| (t - s).abs() > 1e-12) {
            sigmas.push(s);
        }
    }
    let m = sigmas.len();
    if m == 2 {
        return frac_integral(u, order);
    }
    if m > grid.len() {
        return Err(Error::InvalidGrid(format!(
            "{} starting exponents need more than {} subintervals",
            m - 2,
            grid.n()
        )));
    }
    let a = grid.a();
    let nodes: Vec<f64> = grid.nodes().collect();
    let powers: Vec<Vec<f64>> =
        sigmas.iter().map(|&s| nodes.iter().map(|&t| if s == 0.0 { 1.0 } else { (t - a).powf(s) }).collect()).collect();
    // rows: exponent, columns: starting nodes 0..m
    let system: Vec<Vec<f64>> = powers.iter().map(|row| row[..m].to_vec()).collect();
    let values = u.values();
    let mut out = vec![0.0; nodes.len()];
    for j in 1..nodes.len() {
        let mut defect: Vec<f64> = sigmas
            .iter()
            .zip(&powers)
            .map(|(&s, pw)| {
                let exact = gamma_unchecked(s + 1.0) * recip_gamma(s + nu + 1.0) * (nodes[j] - a).powf(s + nu);
                exact - weights.apply_at(j, pw)
            })
            .collect();
        solve_dense(system.clone(), &mut defect)?;
        let correction: f64 = defect.iter().zip(&values[..m]).map(|(w, v)| w * v).sum();
        out[j] = weights.apply_at(j, values) + correction;
    }
    GridFunction::from_values(*grid, out)
}

/// Gaussian elimination with partial pivoting; `rhs` is overwritten with
/// the solution.
fn solve_dense(mut mat: Vec<Vec<f64>>, rhs: &mut [f64]) -> Result<()> {
    let m = rhs.len();
    for col in 0..m {
        let pivot = (col..m).max_by(|&x, &y| mat[x][col].abs().total_cmp(&mat[y][col].abs())).expect("nonempty");
        if mat[pivot][col] == 0.0 {
            return Err(Error::Domain("starting-weight system is singular".into()));
        }
        mat.swap(col, pivot);
        rhs.swap(col, pivot);
        let (done, rest) = mat.split_at_mut(col + 1);
        let pivot_row = &done[col];
        for (offset, row) in rest.iter_mut().enumerate() {
            let factor = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= factor * p;
            }
            rhs[col + 1 + offset] -= factor * rhs[col];
        }
    }
    for col in (0..m).rev() {
        let tail: f64 = (col + 1..m).map(|k| mat[col][k] * rhs[k]).sum();
        rhs[col] = (rhs[col] - tail) / mat[col][col];
    }
    Ok(())
}

/// Grid approximation of a fractional derivative.
#[derive(Debug, Clone)]
pub struct FracDerivative {
    pub values: GridFunction,
    /// Nodes computed with one-sided differences; accuracy there is lower
    /// and the true derivative may be singular at `t_0`.
    pub low_accuracy_nodes: Vec<usize>,
}

/// `D_{a+}^alpha u = D^m I^{m - alpha} u`, `m = ceil(alpha)`, for `0 < alpha <= 2`.
///
/// Interior nodes use central differences; the two endpoints use
/// second-order one-sided differences.
pub fn frac_derivative(u: &GridFunction, order: FractionalOrder) -> Result<FracDerivative> {
    frac_derivative_corrected(u, order, &[])
}

/// [`frac_derivative`] with the inner integral computed by
/// [`frac_integral_corrected`], for `u` whose expansion at `a` contains the
/// powers `(t - a)^sigma`, `sigma` in `exponents`.
pub fn frac_derivative_corrected(
    u: &GridFunction,
    order: FractionalOrder,
    exponents: &[f64],
) -> Result<FracDerivative> {
    let alpha = order.value();
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidOrder { order: alpha, reason: "derivative order must lie in (0, 2]" });
    }
    let m = alpha.ceil() as u32;
    let lift = m as f64 - alpha;
    let smoothed =
        if lift > 0.0 { frac_integral_corrected(u, FractionalOrder::new(lift)?, exponents)? } else { u.clone() };
    let h = u.grid().step();
    let v = smoothed.values();
    let values = match m {
        1 => first_difference(v, h),
        _ => second_difference(v, h),
    };
    Ok(FracDerivative {
        values: GridFunction::from_values(*u.grid(), values)?,
        low_accuracy_nodes: vec![0, u.grid().n()],
    })
}

fn first_difference(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len() - 1;
    let mut out = vec![0.0; n + 1];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for i in 1..n {
        out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    out[n] = right_end_slope(v, h);
    out
}

fn second_difference(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len() - 1;
    let h2 = h * h;
    let mut out = vec![0.0; n + 1];
    for i in 1..n {
        out[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    }
    if n >= 3 {
        out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
        out[n] = (2.0 * v[n] - 5.0 * v[n - 1] + 4.0 * v[n - 2] - v[n - 3]) / h2;
    } else {
        out[0] = out[1];
        out[n] = out[n - 1];
    }
    out
}

/// Second-order backward difference for the slope at the last node.
pub(crate) fn right_end_slope(v: &[f64], h: f64) -> f64 {
    let n = v.len() - 1;
    (3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h)
}

/// `I_{a+}^{nu2} (t - a)^{nu1} = Γ(nu1 + 1) / Γ(nu1 + nu2 + 1) · (t - a)^(nu1 + nu2)`.
pub fn power_rule_integral(nu1: f64, nu2: f64, t: f64, a: f64) -> Result<f64> {
    if !(nu1 > -1.0) || !(nu2 >= 0.0) {
        return Err(Error::Domain(format!("power rule needs nu1 > -1 and nu2 >= 0, got nu1 = {nu1}, nu2 = {nu2}")));
    }
    if !(t >= a) {
        return Err(Error::Domain(format!("power rule needs t >= a, got t = {t}, a = {a}")));
    }
    let value = gamma_unchecked(nu1 + 1.0) * recip_gamma(nu1 + nu2 + 1.0) * (t - a).powf(nu1 + nu2);
    if !value.is_finite() {
        return Err(Error::Domain(format!("(t - a)^{} is singular at t = a", nu1 + nu2)));
    }
    Ok(value)
}

/// `D_{a+}^{nu2} (t - a)^{nu1} = Γ(nu1 + 1) / Γ(nu1 + 1 - nu2) · (t - a)^(nu1 - nu2)`,
/// exactly zero when `nu2 - nu1` is a positive integer.
pub fn power_rule_derivative(nu1: f64, nu2: f64, t: f64, a: f64) -> Result<f64> {
    if !(nu1 > -1.0) || !(nu2 >= 0.0) {
        return Err(Error::Domain(format!("power rule needs nu1 > -1 and nu2 >= 0, got nu1 = {nu1}, nu2 = {nu2}")));
    }
    if !(t > a) {
        return Err(Error::Domain(format!("power rule derivative needs t > a, got t = {t}, a = {a}")));
    }
    let gap = nu2 - nu1;
    let nearest = gap.round();
    let slack = 8.0 * f64::EPSILON * nu1.abs().max(nu2.abs()).max(1.0);
    if nearest >= 1.0 && (gap - nearest).abs() <= slack {
        return Ok(0.0);
    }
    Ok(gamma_unchecked(nu1 + 1.0) * recip_gamma(nu1 + 1.0 - nu2) * (t - a).powf(nu1 - nu2))
}
