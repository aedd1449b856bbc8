//! Spectral radius of the integral operator `(K_q u)(t) = ∫ G(t,s) q(s) u(s) ds`.
//!
//! A nontrivial solution of `D^alpha u + q u = 0` with the homogeneous
//! boundary conditions is exactly an eigenfunction of `K_q` for eigenvalue 1.
//! For `q >= 0` the operator is positive, its Perron root is real, and the
//! Lyapunov-type bound predicts `radius < 1` whenever `∫ q₊ <= rhs`.

use log::debug;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::greens::{diag_argmax, dot, GreenOperator, ProblemSpec};
use crate::grid::{Grid, GridFunction};
use crate::lyapunov::{lyapunov_rhs, qplus_integral};

/// Nyström matrix of `K_q`, row-major `(N+1) × (N+1)`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    entries: Vec<f64>,
    size: usize,
    grid: Grid,
    pub q_ref: String,
}

impl OperatorMatrix {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.size..(i + 1) * self.size]
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        (0..self.size).map(|i| dot(self.row(i), v)).collect()
    }
}

pub fn discretize_operator(p: &ProblemSpec, q: &GridFunction) -> Result<OperatorMatrix> {
    p.check_grid(q.grid())?;
    let green = GreenOperator::assemble(p, *q.grid())?;
    discretize_with(&green, q, "q", Exec::default())
}

/// Reuses an assembled Green's operator; only the column scaling by `q` is
/// recomputed.
pub fn discretize_with(green: &GreenOperator, q: &GridFunction, q_ref: &str, exec: Exec) -> Result<OperatorMatrix> {
    if q.grid() != green.grid() {
        return Err(Error::GridMismatch { left: green.grid().n(), right: q.grid().n() });
    }
    Ok(OperatorMatrix {
        entries: green.with_column_scaling(q.values(), exec),
        size: green.size(),
        grid: *green.grid(),
        q_ref: q_ref.to_string(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralReport {
    pub radius: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `‖M v - radius v‖∞ / ‖v‖∞` for the final iterate `v`.
    pub residual: f64,
}

/// Power iteration from the all-ones vector with sup-norm normalization.
///
/// Converged once successive Rayleigh quotients differ by at most `tol` and
/// the eigen-residual is at most `tol`.
pub fn spectral_radius(m: &OperatorMatrix, tol: f64, max_iter: usize) -> SpectralReport {
    let mut v = vec![1.0; m.size];
    let mut previous = f64::NAN;
    let mut report = SpectralReport { radius: 0.0, iterations: 0, converged: false, residual: f64::INFINITY };
    for iteration in 1..=max_iter {
        let w = m.apply(&v);
        let w_norm = sup_norm(&w);
        if w_norm == 0.0 {
            return SpectralReport { radius: 0.0, iterations: iteration, converged: true, residual: 0.0 };
        }
        let estimate = dot(&v, &w) / dot(&v, &v);
        let residual = w.iter().zip(&v).fold(0.0, |acc: f64, (x, y)| acc.max((x - estimate * y).abs())) / sup_norm(&v);
        report = SpectralReport { radius: estimate.abs(), iterations: iteration, converged: false, residual };
        if (estimate - previous).abs() <= tol && residual <= tol {
            report.converged = true;
            return report;
        }
        previous = estimate;
        v = w.into_iter().map(|x| x / w_norm).collect();
    }
    debug!("power iteration stopped after {max_iter} steps: {report:?}");
    report
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Families of nonnegative `q` for probing how close `∫ q₊ = rhs` comes to
/// producing a nontrivial solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanFamily {
    Constant,
    /// Tent `max(0, 1 - |t - center| / width)`; the scan halves `width`
    /// on each row.
    Bump {
        center: f64,
        width: f64,
    },
}

impl ScanFamily {
    /// Bump centered at the diagonal maximizer `s*`.
    pub fn bump_at_s_star(p: &ProblemSpec, width: f64) -> Self {
        ScanFamily::Bump { center: diag_argmax(p).location, width }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub parameter: f64,
    pub scaled_integral: f64,
    pub radius: f64,
    pub converged: bool,
}

/// Scales each member of the family so that `∫ q₊` equals the Lyapunov
/// bound and reports the spectral radius of `K_q`. Bump widths below the
/// grid step end the scan early.
pub fn sharpness_scan(
    p: &ProblemSpec,
    family: ScanFamily,
    samples: usize,
    grid_n: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Vec<ScanRow>> {
    let grid = p.grid(grid_n)?;
    let green = GreenOperator::assemble(p, grid)?;
    let rhs = lyapunov_rhs(p);
    let mut members = Vec::new();
    match family {
        ScanFamily::Constant => members.push((rhs / p.length(), GridFunction::constant(grid, 1.0)?)),
        ScanFamily::Bump { center, width } => {
            if !(width > 0.0) || !(center >= p.a() && center <= p.b()) {
                return Err(Error::Domain(format!(
                    "bump needs width > 0 and center in [a, b], got center {center}, width {width}"
                )));
            }
            let mut w = width;
            for _ in 0..samples {
                if w < grid.step() {
                    debug!("bump width {w} is below the grid step; scan truncated");
                    break;
                }
                members.push((w, GridFunction::from_fn(grid, |t| (1.0 - (t - center).abs() / w).max(0.0))?));
                w /= 2.0;
            }
        }
    }
    members
        .into_iter()
        .map(|(parameter, shape)| {
            let mass = qplus_integral(&shape);
            if mass <= 0.0 {
                return Err(Error::Domain("scan member has zero integral on this grid".into()));
            }
            let q = shape.scaled(rhs / mass)?;
            let m = discretize_with(&green, &q, "scan", Exec::default())?;
            let report = spectral_radius(&m, tol, max_iter);
            Ok(ScanRow {
                parameter,
                scaled_integral: qplus_integral(&q),
                radius: report.radius,
                converged: report.converged,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn spec(alpha: f64, beta: f64) -> ProblemSpec {
        ProblemSpec::new(alpha, beta, 0.0, 1.0).unwrap()
    }

    #[test]
    fn zero_q_gives_zero_operator() {
        let p = spec(1.5, 0.25);
        let g = p.grid(32).unwrap();
        let m = discretize_operator(&p, &GridFunction::zeros(g)).unwrap();
        assert!(m.entries().iter().all(|&x| x == 0.0));
        let r = spectral_radius(&m, 1e-12, 100);
        assert_eq!(r.radius, 0.0);
        assert!(r.converged);
    }

    #[test]
    fn first_row_vanishes_and_entries_nonnegative() {
        let p = spec(1.3, 0.2);
        let g = p.grid(64).unwrap();
        let q = GridFunction::from_fn(g, |t| 1.0 + t * t).unwrap();
        let m = discretize_operator(&p, &q).unwrap();
        assert!(m.row(0).iter().all(|&x| x == 0.0));
        assert!(m.entries().iter().all(|&x| x >= 0.0 && x.is_finite()));
    }

    #[test]
    fn classical_eigenpair() {
        let p = spec(2.0, 0.0);
        let g = p.grid(256).unwrap();
        let m = discretize_operator(&p, &GridFunction::constant(g, 1.0).unwrap()).unwrap();
        let v: Vec<f64> = g.nodes().map(|t| (PI * t).sin()).collect();
        let mv = m.apply(&v);
        let err = mv.iter().zip(&v).fold(0.0, |acc: f64, (x, y)| acc.max((x - y / (PI * PI)).abs()));
        assert!(err < 1e-5, "{err}");
    }

    #[test]
    fn eigenvalue_anchors() {
        let cases = [(spec(2.0, 0.0), PI * PI), (spec(2.0, 1.0), PI * PI / 4.0)];
        for (p, lambda) in cases {
            let g = p.grid(512).unwrap();
            let m = discretize_operator(&p, &GridFunction::constant(g, lambda).unwrap()).unwrap();
            let r = spectral_radius(&m, 1e-12, 10_000);
            assert!(r.converged);
            assert!((r.radius - 1.0).abs() < 1e-3, "{r:?}");
            assert!(r.residual <= 1e-12);
        }
    }

    #[test]
    fn monotone_in_q() {
        let p = spec(1.7, 0.4);
        let g = p.grid(128).unwrap();
        let q1 = GridFunction::from_fn(g, |t| 2.0 * t).unwrap();
        let q2 = GridFunction::from_fn(g, |t| 2.0 * t + (3.0 * t).sin().abs()).unwrap();
        let r1 = spectral_radius(&discretize_operator(&p, &q1).unwrap(), 1e-12, 10_000).radius;
        let r2 = spectral_radius(&discretize_operator(&p, &q2).unwrap(), 1e-12, 10_000).radius;
        assert!(r1 <= r2 + 1e-9);
    }

    #[test]
    fn constant_scan_classical() {
        let rows = sharpness_scan(&spec(2.0, 0.0), ScanFamily::Constant, 1, 256, 1e-12, 10_000).unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].parameter - 4.0).abs() < 1e-12);
        assert!((rows[0].scaled_integral - 4.0).abs() < 1e-12);
        assert!((rows[0].radius - 4.0 / (PI * PI)).abs() < 1e-4, "{:?}", rows[0]);
    }

    #[test]
    fn bump_scan_climbs_toward_one() {
        let p = spec(2.0, 0.0);
        let rows = sharpness_scan(&p, ScanFamily::bump_at_s_star(&p, 0.4), 5, 512, 1e-12, 10_000).unwrap();
        assert_eq!(rows.len(), 5);
        for w in rows.windows(2) {
            assert!(w[1].radius > w[0].radius, "{rows:?}");
        }
        assert!(rows.iter().all(|r| r.radius < 1.0 && r.converged));
        assert!(rows.last().unwrap().radius > 0.9);
    }

    #[test]
    fn bump_scan_truncates_below_grid_step() {
        let p = spec(2.0, 0.0);
        let rows = sharpness_scan(&p, ScanFamily::Bump { center: 0.5, width: 0.25 }, 10, 32, 1e-12, 10_000).unwrap();
        assert_eq!(rows.len(), 4); // 0.25 .. 0.03125 = 1/32
        assert!(sharpness_scan(&p, ScanFamily::Bump { center: 2.0, width: 0.25 }, 3, 32, 1e-12, 100).is_err());
    }

    #[test]
    fn half_scaled_q_has_smaller_radius() {
        let p = spec(1.5, 0.25);
        let g = p.grid(128).unwrap();
        let c = lyapunov_rhs(&p);
        let full =
            spectral_radius(&discretize_operator(&p, &GridFunction::constant(g, c).unwrap()).unwrap(), 1e-12, 10_000);
        let half = spectral_radius(
            &discretize_operator(&p, &GridFunction::constant(g, c / 2.0).unwrap()).unwrap(),
            1e-12,
            10_000,
        );
        assert!(half.radius < full.radius);
    }
}
