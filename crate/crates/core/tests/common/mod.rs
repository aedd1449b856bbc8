#![allow(dead_code)]

use fraclyap_core::expr::{BinOp, Constant, Expr, Func, Var};
use fraclyap_core::{Grid, GridFunction, ProblemSpec};
use rand::Rng;

/// α ∈ {1.1, ..., 2.0} × β ∈ {0, (α-1)/3, 2(α-1)/3, α-1}: 40 pairs.
pub fn lattice() -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..=10 {
        let alpha = 1.0 + i as f64 / 10.0;
        for j in 0..=3 {
            out.push((alpha, (alpha - 1.0) * j as f64 / 3.0));
        }
    }
    out
}

pub fn unit_spec(alpha: f64, beta: f64) -> ProblemSpec {
    ProblemSpec::new(alpha, beta, 0.0, 1.0).unwrap()
}

/// Piecewise-linear function with `pieces` equal pieces on `[a, b]` and
/// node values drawn from `[lo, hi)`, sampled on `grid`.
pub fn random_piecewise_linear<R: Rng>(rng: &mut R, grid: Grid, pieces: usize, lo: f64, hi: f64) -> GridFunction {
    let knots: Vec<f64> = (0..=pieces).map(|_| rng.gen_range(lo..hi)).collect();
    let (a, b) = (grid.a(), grid.b());
    GridFunction::from_fn(grid, |t| {
        let x = (t - a) / (b - a) * pieces as f64;
        let k = (x.floor() as usize).min(pieces - 1);
        let w = x - k as f64;
        knots[k] * (1.0 - w) + knots[k + 1] * w
    })
    .unwrap()
}

pub fn random_expr<R: Rng>(rng: &mut R, depth: usize) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..6) {
            0 => Expr::Var(Var::T),
            1 => Expr::Var(Var::U),
            2 => Expr::Const(if rng.gen_bool(0.5) { Constant::Pi } else { Constant::E }),
            3 => Expr::Num(rng.gen_range(0..100) as f64),
            4 => Expr::Num(rng.gen_range(0.0..1e3)),
            _ => Expr::Num([1e-7, 2.5e-12, 6.02e23, 0.1, 0.0][rng.gen_range(0..5)]),
        };
    }
    match rng.gen_range(0..4) {
        0 => Expr::negate(random_expr(rng, depth - 1)),
        1 | 2 => {
            let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Pow][rng.gen_range(0..5)];
            Expr::binary(op, random_expr(rng, depth - 1), random_expr(rng, depth - 1))
        }
        _ => {
            let func = Func::ALL[rng.gen_range(0..Func::ALL.len())];
            let args = (0..func.arity()).map(|_| random_expr(rng, depth - 1)).collect();
            Expr::Call(func, args)
        }
    }
}

pub fn expr_depth(e: &Expr) -> usize {
    match e {
        Expr::Num(_) | Expr::Var(_) | Expr::Const(_) => 0,
        Expr::Neg(x) => 1 + expr_depth(x),
        Expr::Binary(_, l, r) => 1 + expr_depth(l).max(expr_depth(r)),
        Expr::Call(_, args) => 1 + args.iter().map(expr_depth).max().unwrap_or(0),
    }
}
