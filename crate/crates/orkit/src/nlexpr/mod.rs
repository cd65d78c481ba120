//! Algebraic expression graphs for nonlinear constraints and the machinery
//! built on them: symbolic differentiation by the chain rule, canonical keys
//! for detecting equivalent constraints, and compiled sparse Jacobian plans.
//!
//! Expressions are plain trees; constants and variable columns are concrete
//! values spliced in at build time. Columns are one-based, matching
//! [`crate::model`]. A dense point `x` binds column `c` to `x[c - 1]`.

mod canon;
mod deriv;
mod jacobian;

pub use canon::{canonical_key, CanonicalKey};
pub use deriv::differentiate;
pub use jacobian::{compile_jacobian, JacobianPlan};

use crate::model::{ModelError, RowSense};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("point has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("fractional power of negative base {base}")]
    NegativeBase { base: f64 },
}

/// Exponent of a `Power` node. Always stored reduced with a positive
/// denominator, so equal rationals compare equal bitwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let sign = den.signum();
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        Rational {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> i64 {
        self.den
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self - 1`, used by the power rule.
    pub fn minus_one(&self) -> Self {
        Rational::new(self.num - self.den, self.den)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Node of an algebraic expression graph.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(f64),
    Variable(u32),
    Sum(Vec<Expr>),
    Negate(Box<Expr>),
    Product(Vec<Expr>),
    Power(Box<Expr>, Rational),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn constant(v: f64) -> Expr {
        Expr::Constant(v)
    }

    /// `column` is one-based.
    pub fn variable(column: u32) -> Expr {
        assert!(column >= 1, "columns are one-based");
        Expr::Variable(column)
    }

    pub fn sum(children: Vec<Expr>) -> Expr {
        Expr::Sum(children)
    }

    pub fn negate(child: Expr) -> Expr {
        Expr::Negate(Box::new(child))
    }

    pub fn product(children: Vec<Expr>) -> Expr {
        Expr::Product(children)
    }

    pub fn power(base: Expr, num: i64, den: i64) -> Expr {
        Expr::Power(Box::new(base), Rational::new(num, den))
    }

    pub fn sin(child: Expr) -> Expr {
        Expr::Sin(Box::new(child))
    }

    pub fn cos(child: Expr) -> Expr {
        Expr::Cos(Box::new(child))
    }

    /// `a - b` as `Sum[a, Negate(b)]`.
    pub fn minus(a: Expr, b: Expr) -> Expr {
        Expr::Sum(vec![a, Expr::negate(b)])
    }

    /// Evaluates at the dense point `x` (column `c` reads `x[c - 1]`).
    pub fn eval(&self, x: &[f64]) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Constant(v) => *v,
            Expr::Variable(c) => {
                *x.get((*c - 1) as usize)
                    .ok_or(EvalError::DimensionMismatch {
                        expected: *c as usize,
                        got: x.len(),
                    })?
            }
            Expr::Sum(children) => {
                let mut acc = 0.0;
                for ch in children {
                    acc += ch.eval(x)?;
                }
                acc
            }
            Expr::Negate(ch) => -ch.eval(x)?,
            Expr::Product(children) => {
                let mut acc = 1.0;
                for ch in children {
                    acc *= ch.eval(x)?;
                }
                acc
            }
            Expr::Power(base, p) => pow_rational(base.eval(x)?, *p)?,
            Expr::Sin(ch) => ch.eval(x)?.sin(),
            Expr::Cos(ch) => ch.eval(x)?.cos(),
        })
    }

    /// Distinct variable columns in first-occurrence (preorder) order.
    pub fn variables(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut Vec<u32>) {
        match self {
            Expr::Constant(_) => {}
            Expr::Variable(c) => {
                if !out.contains(c) {
                    out.push(*c);
                }
            }
            Expr::Sum(children) | Expr::Product(children) => {
                for ch in children {
                    ch.collect_variables(out);
                }
            }
            Expr::Negate(ch) | Expr::Sin(ch) | Expr::Cos(ch) => ch.collect_variables(out),
            Expr::Power(base, _) => base.collect_variables(out),
        }
    }
}

/// Rational powering. Integer exponents go through `powi` and accept any
/// base; fractional exponents require a nonnegative base. Half-integer
/// exponents use the square root directly, avoiding `powf` on the hot path.
pub(crate) fn pow_rational(base: f64, p: Rational) -> Result<f64, EvalError> {
    if p.den == 1 {
        let n = i32::try_from(p.num).expect("exponent fits i32");
        return Ok(base.powi(n));
    }
    if base < 0.0 {
        return Err(EvalError::NegativeBase { base });
    }
    if p.den == 2 {
        let n = i32::try_from(p.num).expect("exponent fits i32");
        return Ok(base.sqrt().powi(n));
    }
    Ok(base.powf(p.as_f64()))
}

#[derive(Debug, Clone)]
pub struct NlConstraint {
    pub expr: Expr,
    pub sense: RowSense,
}

/// Nonlinear model: variable bounds plus an ordered list of constraints, each
/// interpreted as `expr sense 0`.
#[derive(Debug, Clone, Default)]
pub struct NonlinearModel {
    lower: Vec<f64>,
    upper: Vec<f64>,
    constraints: Vec<NlConstraint>,
}

impl NonlinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_variable(&mut self, lb: f64, ub: f64) -> Result<u32, ModelError> {
        if lb > ub {
            return Err(ModelError::BoundOrder { lb, ub });
        }
        self.lower.push(lb);
        self.upper.push(ub);
        Ok(self.lower.len() as u32)
    }

    pub fn add_constraint(&mut self, expr: Expr, sense: RowSense) -> Result<usize, ModelError> {
        let issued = self.num_variables();
        let stale = expr
            .variables()
            .into_iter()
            .find(|&c| c == 0 || c as usize > issued);
        if let Some(column) = stale {
            return Err(ModelError::StaleColumn { column, issued });
        }
        self.constraints.push(NlConstraint { expr, sense });
        Ok(self.constraints.len())
    }

    pub fn num_variables(&self) -> usize {
        self.lower.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn bounds(&self, column: u32) -> (f64, f64) {
        let i = (column - 1) as usize;
        (self.lower[i], self.upper[i])
    }

    pub fn constraints(&self) -> &[NlConstraint] {
        &self.constraints
    }
}

/// Residuals `g_i(x)` for every constraint; senses are ignored.
pub fn evaluate_constraints(m: &NonlinearModel, x: &[f64]) -> Result<Vec<f64>, EvalError> {
    if x.len() != m.num_variables() {
        return Err(EvalError::DimensionMismatch {
            expected: m.num_variables(),
            got: x.len(),
        });
    }
    m.constraints.iter().map(|c| c.expr.eval(x)).collect()
}

#[cfg(test)]
mod tests;
