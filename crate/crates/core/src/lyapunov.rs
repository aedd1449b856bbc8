//! Lyapunov-type bound and the nonexistence certificate built on it.
//!
//! If `D^alpha u + q u = 0`, `u(a) = 0`, `D^beta u(b) = 0` has a nontrivial
//! solution then `∫ q₊ > rhs`, where `rhs = 1 / G(s*, s*)`. Conversely,
//! `∫ q₊ <= rhs` certifies that only the trivial solution exists.

use crate::error::Result;
use crate::gamma::gamma_unchecked;
use crate::greens::{diag_argmax, ExtremalPoint, ProblemSpec};
use crate::grid::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    NoNontrivialSolution,
    /// The bound is violated; nothing follows in either direction.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NoNontrivialSolution => "NoNontrivialSolution",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub rhs: f64,
    pub q_plus_integral: f64,
    pub verdict: Verdict,
    pub s_star: ExtremalPoint,
}

/// `Γ(α) ((2α-2-β) / ((b-a)(α-1)))^(α-1) ((2α-2-β) / (α-1-β))^(α-1-β)`.
pub fn lyapunov_rhs(p: &ProblemSpec) -> f64 {
    let am1 = p.alpha() - 1.0;
    let gap = p.gap();
    let denom = am1 + gap;
    let shape = if gap == 0.0 { 1.0 } else { (gap * (denom / gap).ln()).exp() };
    gamma_unchecked(p.alpha()) * (denom / (p.length() * am1)).powf(am1) * shape
}

/// Trapezoidal integral of `max(q, 0)` on the grid of `q`.
pub fn qplus_integral(q: &GridFunction) -> f64 {
    let positive = q.map(|v| v.max(0.0)).expect("clamping finite values stays finite");
    positive.trapezoid()
}

pub fn nonexistence_verdict(p: &ProblemSpec, q: &GridFunction) -> Result<BoundReport> {
    p.check_grid(q.grid())?;
    let rhs = lyapunov_rhs(p);
    let q_plus_integral = qplus_integral(q);
    // Equality still certifies: a nontrivial solution forces strict `>`.
    let verdict = if q_plus_integral <= rhs { Verdict::NoNontrivialSolution } else { Verdict::Inconclusive };
    Ok(BoundReport { rhs, q_plus_integral, verdict, s_star: diag_argmax(p) })
}
