//! Invariants checked by sampling, each against an independent oracle or a
//! structural property of the operators.

mod common;

use fraclyap_core::expr::parse;
use fraclyap_core::fractional::{frac_derivative, frac_integral, power_rule_integral};
use fraclyap_core::greens::{diag_argmax, greens_diag, greens_value, row_integral_max};
use fraclyap_core::lyapunov::{lyapunov_rhs, qplus_integral};
use fraclyap_core::solver::{picard_solve, residual_check, solve_linear, NonlinearProblem, PicardSolver};
use fraclyap_core::spectral::{discretize_operator, spectral_radius};
use fraclyap_core::{gamma, FractionalOrder, Grid, GridFunction, ProblemSpec};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{lattice, random_expr, random_piecewise_linear, unit_spec};

fn order(v: f64) -> FractionalOrder {
    FractionalOrder::new(v).unwrap()
}

fn unit_grid(n: usize) -> Grid {
    Grid::new(0.0, 1.0, n).unwrap()
}

/// Sup over nodes with `t >= t_min`.
fn sup_from(diff: &GridFunction, t_min: f64) -> f64 {
    diff.grid().nodes().zip(diff.values()).filter(|(t, _)| *t >= t_min).map(|(_, v)| v.abs()).fold(0.0, f64::max)
}

// Test-side Green's function branches, written from the definition.
fn g1(t: f64, s: f64, alpha: f64, beta: f64) -> f64 {
    g2(t, s, alpha, beta) - (t - s).powf(alpha - 1.0) / gamma(alpha).unwrap()
}

fn g2(t: f64, s: f64, alpha: f64, beta: f64) -> f64 {
    let gap = alpha - 1.0 - beta;
    let right = if gap.abs() < 1e-12 { 1.0 } else { (1.0 - s).powf(gap) };
    t.powf(alpha - 1.0) * right / gamma(alpha).unwrap()
}

// fractional-core

#[test]
fn semigroup_error_decays() {
    for n1 in [0.3, 0.7, 1.2] {
        for n2 in [0.3, 0.7, 1.2] {
            let errs: Vec<f64> = [64, 256, 1024]
                .iter()
                .map(|&n| {
                    let mut rng = ChaCha8Rng::seed_from_u64(3);
                    let u = random_piecewise_linear(&mut rng, unit_grid(n), 5, -2.0, 2.0);
                    let nested = frac_integral(&frac_integral(&u, order(n1)).unwrap(), order(n2)).unwrap();
                    nested.sub(&frac_integral(&u, order(n1 + n2)).unwrap()).unwrap().sup_norm()
                })
                .collect();
            assert!(errs[1] < errs[0] && errs[2] < errs[1], "({n1},{n2}) {errs:?}");
        }
    }
}

#[test]
fn derivative_is_left_inverse_of_integral() {
    let u = |t: f64| (2.0 * t).cos() + t;
    for alpha in [0.4, 1.0, 1.3, 1.8] {
        let errs: Vec<f64> = [128, 512, 2048]
            .iter()
            .map(|&n| {
                let g = GridFunction::from_fn(unit_grid(n), u).unwrap();
                let d = frac_derivative(&frac_integral(&g, order(alpha)).unwrap(), order(alpha)).unwrap();
                sup_from(&d.values.sub(&g).unwrap(), 0.1)
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "alpha {alpha}: {errs:?}");
        assert!(errs[2] < 1e-3, "alpha {alpha}: {errs:?}");
    }
}

#[test]
fn derivative_of_integral_reduces_order() {
    let u = |t: f64| (3.0 * t).sin() + 1.0;
    for (nu1, nu2) in [(0.5, 1.2), (0.3, 0.3), (1.0, 1.7), (1.6, 2.0)] {
        let errs: Vec<f64> = [128, 512, 2048]
            .iter()
            .map(|&n| {
                let g = GridFunction::from_fn(unit_grid(n), u).unwrap();
                let lhs = frac_derivative(&frac_integral(&g, order(nu2)).unwrap(), order(nu1)).unwrap().values;
                let rhs = if nu2 > nu1 { frac_integral(&g, order(nu2 - nu1)).unwrap() } else { g.clone() };
                sup_from(&lhs.sub(&rhs).unwrap(), 0.1)
            })
            .collect();
        assert!(errs[2] < errs[0] && errs[2] < 1e-3, "({nu1},{nu2}) {errs:?}");
    }
}

/// Least-squares remainder of `r` after removing span{t^{α-1}, t^{α-2}}
/// over nodes in `[0.1, 0.9]`.
fn projected_remainder(r: &GridFunction, alpha: f64) -> f64 {
    let rows: Vec<(f64, f64, f64)> = r
        .grid()
        .nodes()
        .zip(r.values())
        .filter(|(t, _)| (0.1..=0.9).contains(t))
        .map(|(t, &v)| (t.powf(alpha - 1.0), t.powf(alpha - 2.0), v))
        .collect();
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(x, y, v) in &rows {
        a11 += x * x;
        a12 += x * y;
        a22 += y * y;
        b1 += x * v;
        b2 += y * v;
    }
    let det = a11 * a22 - a12 * a12;
    let c1 = (b1 * a22 - b2 * a12) / det;
    let c2 = (a11 * b2 - a12 * b1) / det;
    rows.iter().map(|&(x, y, v)| (v - c1 * x - c2 * y).abs()).fold(0.0, f64::max)
}

#[test]
fn integral_of_derivative_is_identity_up_to_singular_span() {
    let u = |t: f64| t * (1.0 + t).exp();
    for alpha in [1.25, 1.5, 1.8] {
        let errs: Vec<f64> = [128, 512, 2048]
            .iter()
            .map(|&n| {
                let g = GridFunction::from_fn(unit_grid(n), u).unwrap();
                let d = frac_derivative(&g, order(alpha)).unwrap().values;
                let back = frac_integral(&d, order(alpha)).unwrap();
                projected_remainder(&back.sub(&g).unwrap(), alpha)
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[2] < errs[1], "alpha {alpha}: {errs:?}");
    }
}

#[test]
fn power_rule_integral_matches_quadrature() {
    for (nu1, nu2) in [(0.0, 0.5), (1.0, 0.7), (0.5, 1.5), (2.0, 0.3)] {
        let g = GridFunction::from_fn(unit_grid(2048), |t| t.powf(nu1)).unwrap();
        let numeric = frac_integral(&g, order(nu2)).unwrap();
        let exact = power_rule_integral(nu1, nu2, 1.0, 0.0).unwrap();
        assert!((numeric.value(2048) - exact).abs() < 1e-4, "({nu1},{nu2})");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integral_is_linear_and_positive(
        knots_a in prop::collection::vec(0.0f64..5.0, 2..9),
        knots_b in prop::collection::vec(0.0f64..5.0, 2..9),
        nu in 0.05f64..2.5,
        c in -3.0f64..3.0,
    ) {
        let grid = unit_grid(200);
        let interp = |k: &Vec<f64>| {
            let k = k.clone();
            GridFunction::from_fn(grid, move |t| {
                let x = t * (k.len() - 1) as f64;
                let i = (x.floor() as usize).min(k.len() - 2);
                k[i] + (x - i as f64) * (k[i + 1] - k[i])
            }).unwrap()
        };
        let (ua, ub) = (interp(&knots_a), interp(&knots_b));
        let ia = frac_integral(&ua, order(nu)).unwrap();
        let ib = frac_integral(&ub, order(nu)).unwrap();
        prop_assert!(ia.values().iter().all(|&v| v >= 0.0));
        let combo = frac_integral(&ua.add(&ub.scaled(c).unwrap()).unwrap(), order(nu)).unwrap();
        let expected = ia.add(&ib.scaled(c).unwrap()).unwrap();
        prop_assert!(combo.sub(&expected).unwrap().sup_norm() <= 1e-12 * (1.0 + expected.sup_norm()));
    }
}

// greens

fn random_spec() -> impl Strategy<Value = ProblemSpec> {
    (1.0001f64..=2.0, 0.0f64..=1.0, -2.0f64..2.0, 0.1f64..4.0)
        .prop_map(|(alpha, frac, a, len)| ProblemSpec::new(alpha, frac * (alpha - 1.0), a, a + len).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn green_nonnegative_and_dominated_by_diagonal(p in random_spec(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let (t, s) = (p.a() + x * p.length(), p.a() + y * p.length());
        let g = greens_value(t, s, &p).unwrap();
        prop_assert!(g >= 0.0);
        prop_assert!(g <= greens_diag(s, &p).unwrap() + 1e-12);
        prop_assert!(greens_diag(s, &p).unwrap() <= diag_argmax(&p).value * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn green_scales_with_interval(p in random_spec(), x in 0.0f64..=1.0, y in 0.0f64..=1.0) {
        let unit = p.with_interval(0.0, 1.0).unwrap();
        let (t, s) = (p.a() + x * p.length(), p.a() + y * p.length());
        let scaled = p.length().powf(p.alpha() - 1.0) * greens_value(x, y, &unit).unwrap();
        let direct = greens_value(t, s, &p).unwrap();
        prop_assert!((direct - scaled).abs() <= 1e-12 * (1.0 + scaled.abs()), "{direct} vs {scaled}");
    }
}

#[test]
fn green_matches_branch_formulas_and_is_continuous() {
    for (alpha, beta) in lattice() {
        let p = unit_spec(alpha, beta);
        for i in 1..200 {
            let t = i as f64 / 200.0;
            assert!((g1(t, t, alpha, beta) - g2(t, t, alpha, beta)).abs() <= 1e-12);
            for j in 0..=20 {
                let s = j as f64 / 20.0;
                let want = if s <= t { g1(t, s, alpha, beta) } else { g2(t, s, alpha, beta) };
                let got = greens_value(t, s, &p).unwrap();
                assert!((got - want.max(0.0)).abs() <= 1e-12, "({alpha},{beta}) t={t} s={s}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn green_branches_are_monotone() {
    for (alpha, beta) in lattice() {
        let p = unit_spec(alpha, beta);
        for s in [0.1, 0.37, 0.5, 0.82] {
            let samples: Vec<(f64, f64)> = (0..=1000)
                .map(|i| {
                    let t = i as f64 / 1000.0;
                    (t, greens_value(t, s, &p).unwrap())
                })
                .collect();
            for w in samples.windows(2) {
                let ((t0, v0), (t1, v1)) = (w[0], w[1]);
                if t1 <= s {
                    assert!(v1 >= v0 - 1e-14, "g2 not nondecreasing ({alpha},{beta}) s={s} t={t1}");
                } else if t0 >= s {
                    assert!(v1 <= v0 + 1e-14, "g1 not nonincreasing ({alpha},{beta}) s={s} t={t1}");
                }
            }
        }
    }
}

#[test]
fn extremal_points_match_grid_search() {
    for (alpha, beta) in lattice() {
        let p = unit_spec(alpha, beta);
        let cells = 100_000;
        let (mut best_diag, mut best_row): (f64, f64) = (0.0, 0.0);
        for i in 0..=cells {
            let x = i as f64 / cells as f64;
            best_diag = best_diag.max(greens_diag(x, &p).unwrap());
            best_row = best_row.max(x.powf(alpha - 1.0) / gamma(alpha + 1.0).unwrap() * (alpha / (alpha - beta) - x));
        }
        let d = diag_argmax(&p).value;
        let r = row_integral_max(&p).value;
        assert!(best_diag <= d * (1.0 + 1e-12) && (d - best_diag) / d < 1e-7, "({alpha},{beta}) diag");
        assert!(best_row <= r * (1.0 + 1e-12) && (r - best_row) / r < 1e-7, "({alpha},{beta}) row");
    }
}

// lyapunov

#[test]
fn bound_reductions_hold_on_general_intervals() {
    for (alpha, beta) in lattice() {
        for len in [0.5, 1.0, 2.0, 4.0] {
            let p = ProblemSpec::new(alpha, beta, -1.0, -1.0 + len).unwrap();
            assert!((lyapunov_rhs(&p) * diag_argmax(&p).value - 1.0).abs() <= 1e-12);
            if beta == 0.0 {
                let want = gamma(alpha).unwrap() * (4.0 / len).powf(alpha - 1.0);
                assert!((lyapunov_rhs(&p) - want).abs() <= 1e-12 * want.max(1.0));
            }
        }
    }
}

// solver

#[test]
fn solve_linear_is_linear_and_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (alpha, beta) in lattice() {
        let p = unit_spec(alpha, beta);
        let grid = p.grid(128).unwrap();
        let h1 = random_piecewise_linear(&mut rng, grid, 6, 0.0, 3.0);
        let h2 = random_piecewise_linear(&mut rng, grid, 4, 0.0, 3.0);
        let u1 = solve_linear(&p, &h1).unwrap();
        let u2 = solve_linear(&p, &h2).unwrap();
        let sum = solve_linear(&p, &h1.add(&h2).unwrap()).unwrap();
        assert!(sum.sub(&u1.add(&u2).unwrap()).unwrap().sup_norm() <= 1e-12);
        assert!(u1.values().iter().chain(u2.values()).all(|&v| v >= 0.0));
    }
}

#[test]
fn residuals_decrease_under_refinement() {
    for (alpha, beta) in [(1.3, 0.1), (1.5, 0.5), (1.9, 0.3)] {
        let p = unit_spec(alpha, beta);
        let res: Vec<f64> = [128, 256, 512, 1024]
            .iter()
            .map(|&n| {
                let h = GridFunction::from_fn(p.grid(n).unwrap(), |t| 1.0 + t * t).unwrap();
                residual_check(&solve_linear(&p, &h).unwrap(), &p, &h).unwrap().interior_residual_sup
            })
            .collect();
        assert!(res.windows(2).all(|w| w[1] < w[0] || w[1] < 1e-6), "({alpha},{beta}) {res:?}");
    }
}

#[test]
fn picard_limit_is_unique_and_a_fixed_point() {
    let tol = 1e-11;
    for (alpha, beta, src) in [(1.5, 0.25, "cos(u) + t"), (2.0, 1.0, "0.5*sin(u*t) - 1"), (1.2, 0.0, "u/(1+u^2)")] {
        let np = NonlinearProblem::new(unit_spec(alpha, beta), parse(src).unwrap(), 1.0, 0.3).unwrap();
        assert!(np.predicted_contraction() < 1.0);
        let solver = PicardSolver::new(&np, 256).unwrap();
        let a = picard_solve(&np, 256, tol, 300).unwrap();
        let b = solver.run(&GridFunction::constant(*solver.grid(), 1.0).unwrap(), tol, 300).unwrap();
        assert!(a.converged && b.converged);
        assert!(a.solution.sub(&b.solution).unwrap().sup_norm() <= 10.0 * tol);
        let again = solver.step(a.solution.values()).unwrap();
        let moved = again.iter().zip(a.solution.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(moved <= tol, "{src}: {moved}");
    }
}

// spectral

#[test]
fn radius_is_monotone_in_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for (alpha, beta) in [(1.3, 0.2), (1.7, 0.7), (2.0, 0.5)] {
        let p = unit_spec(alpha, beta);
        let grid = p.grid(128).unwrap();
        for _ in 0..10 {
            let q1 = random_piecewise_linear(&mut rng, grid, 5, 0.0, 4.0);
            let bump = random_piecewise_linear(&mut rng, grid, 3, 0.0, 2.0);
            let q2 = q1.add(&bump).unwrap();
            let r1 = spectral_radius(&discretize_operator(&p, &q1).unwrap(), 1e-12, 50_000).radius;
            let r2 = spectral_radius(&discretize_operator(&p, &q2).unwrap(), 1e-12, 50_000).radius;
            assert!(r1 <= r2 + 1e-9, "{r1} > {r2}");
        }
    }
}

#[test]
fn nystrom_radius_converges_like_one_over_n() {
    for (alpha, beta) in [(1.5, 0.25), (2.0, 0.0), (1.8, 0.8)] {
        let p = unit_spec(alpha, beta);
        let radius = |n: usize| {
            let q = GridFunction::from_fn(p.grid(n).unwrap(), |t| 3.0 + (2.0 * t).sin()).unwrap();
            spectral_radius(&discretize_operator(&p, &q).unwrap(), 1e-13, 50_000).radius
        };
        let r: Vec<f64> = [64, 128, 256, 512].iter().map(|&n| radius(n)).collect();
        let d: Vec<f64> = r.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for (i, w) in d.windows(2).enumerate() {
            assert!(w[1] <= 0.75 * w[0] + 1e-12, "({alpha},{beta}) step {i}: {d:?}");
        }
        assert!(d[2] * 512.0 < 1.0, "({alpha},{beta}) {d:?}");
    }
}

#[test]
fn bound_scaled_q_never_exceeds_unit_radius() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for (alpha, beta) in lattice().into_iter().step_by(3) {
        let p = unit_spec(alpha, beta);
        let grid = p.grid(128).unwrap();
        for _ in 0..5 {
            let shape = random_piecewise_linear(&mut rng, grid, 8, 0.0, 1.0);
            let q = shape.scaled(lyapunov_rhs(&p) / qplus_integral(&shape)).unwrap();
            let r = spectral_radius(&discretize_operator(&p, &q).unwrap(), 1e-10, 20_000);
            assert!(r.radius < 1.0 + 5e-3, "({alpha},{beta}) radius {}", r.radius);
        }
    }
}

// expr

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn printed_expressions_parse_back(seed in any::<u64>(), depth in 0usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = random_expr(&mut rng, depth);
        let printed = tree.to_string();
        prop_assert_eq!(parse(&printed).unwrap(), tree, "{}", printed);
    }

    #[test]
    fn evaluation_is_pure(seed in any::<u64>(), t in -3.0f64..3.0, u in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree = random_expr(&mut rng, 5);
        let first = tree.eval(t, Some(u));
        let second = tree.clone().eval(t, Some(u));
        match (first, second) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x.to_bits(), y.to_bits()),
            (Err(x), Err(y)) => prop_assert_eq!(x, y),
            _ => prop_assert!(false, "results differ"),
        }
    }
}
