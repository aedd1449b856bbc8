use thiserror::Error;

use super::{BinOp, Constant, Expr, Func, Var};
use crate::gamma::gamma;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is not bound")]
    Unbound(&'static str),

    #[error("domain error in `{expr}`: {detail}")]
    Domain { expr: String, detail: String },
}

fn domain(expr: &Expr, detail: impl Into<String>) -> EvalError {
    EvalError::Domain { expr: expr.to_string(), detail: detail.into() }
}

impl Expr {
    /// Evaluates at `t` (and `u`, when the expression references it). Any
    /// non-finite intermediate result is a domain error.
    pub fn eval(&self, t: f64, u: Option<f64>) -> Result<f64, EvalError> {
        let value = match self {
            Expr::Num(x) => *x,
            Expr::Var(Var::T) => t,
            Expr::Var(Var::U) => u.ok_or(EvalError::Unbound("u"))?,
            Expr::Const(Constant::Pi) => std::f64::consts::PI,
            Expr::Const(Constant::E) => std::f64::consts::E,
            Expr::Neg(inner) => -inner.eval(t, u)?,
            Expr::Binary(op, l, r) => {
                let x = l.eval(t, u)?;
                let y = r.eval(t, u)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err(domain(self, "division by zero"));
                        }
                        x / y
                    }
                    BinOp::Pow => power(self, x, y)?,
                }
            }
            Expr::Call(func, args) => {
                let x = args[0].eval(t, u)?;
                match func {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x <= 0.0 {
                            return Err(domain(self, format!("log of nonpositive value {x}")));
                        }
                        x.ln()
                    }
                    Func::Abs => x.abs(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(domain(self, format!("square root of negative value {x}")));
                        }
                        x.sqrt()
                    }
                    Func::Gamma => gamma(x).map_err(|e| domain(self, e.to_string()))?,
                    Func::Pow => power(self, x, args[1].eval(t, u)?)?,
                    Func::Max => x.max(args[1].eval(t, u)?),
                    Func::Min => x.min(args[1].eval(t, u)?),
                }
            }
        };
        if !value.is_finite() {
            return Err(domain(self, format!("result {value} is not finite")));
        }
        Ok(value)
    }
}

fn power(expr: &Expr, base: f64, exp: f64) -> Result<f64, EvalError> {
    if base == 0.0 && exp < 0.0 {
        return Err(domain(expr, "zero raised to a negative power"));
    }
    if base < 0.0 && exp.fract() != 0.0 {
        return Err(domain(expr, format!("negative base {base} with non-integer exponent {exp}")));
    }
    Ok(base.powf(exp))
}
