//! Symbolic differentiation with light folding.
//!
//! The chain rule is applied structurally. Simplification is limited to
//! constant arithmetic and 0/1 folding (`0*u -> 0`, `1*u -> u`, `u+0 -> u`,
//! `u^1 -> u`, `u^0 -> 1`); there is no general common-subexpression
//! elimination, so output shapes stay predictable.

use super::{pow_rational, Expr, Rational};

/// Symbolic partial derivative of `expr` with respect to `column`.
pub fn differentiate(expr: &Expr, column: u32) -> Expr {
    match expr {
        Expr::Constant(_) => Expr::Constant(0.0),
        Expr::Variable(c) => Expr::Constant(if *c == column { 1.0 } else { 0.0 }),
        Expr::Sum(children) => {
            fold_sum(children.iter().map(|ch| differentiate(ch, column)).collect())
        }
        Expr::Negate(ch) => fold_negate(differentiate(ch, column)),
        Expr::Product(children) => {
            // Product rule: sum over k of (d ch_k) * prod_{j != k} ch_j.
            let mut terms = Vec::new();
            for k in 0..children.len() {
                let dk = differentiate(&children[k], column);
                if matches!(dk, Expr::Constant(v) if v == 0.0) {
                    continue;
                }
                let mut factors: Vec<Expr> = Vec::with_capacity(children.len());
                for (j, ch) in children.iter().enumerate() {
                    if j != k {
                        factors.push(ch.clone());
                    }
                }
                factors.push(dk);
                terms.push(fold_product(factors));
            }
            fold_sum(terms)
        }
        Expr::Power(base, p) => {
            if p.num() == 0 {
                return Expr::Constant(0.0);
            }
            let db = differentiate(base, column);
            fold_product(vec![
                Expr::Constant(p.as_f64()),
                fold_power((**base).clone(), p.minus_one()),
                db,
            ])
        }
        Expr::Sin(ch) => fold_product(vec![Expr::cos((**ch).clone()), differentiate(ch, column)]),
        Expr::Cos(ch) => fold_negate(fold_product(vec![
            Expr::sin((**ch).clone()),
            differentiate(ch, column),
        ])),
    }
}

pub(crate) fn fold_sum(terms: Vec<Expr>) -> Expr {
    let mut constant = 0.0;
    let mut rest: Vec<Expr> = Vec::with_capacity(terms.len());
    for t in terms {
        match t {
            Expr::Constant(v) => constant += v,
            other => rest.push(other),
        }
    }
    if constant != 0.0 {
        rest.push(Expr::Constant(constant));
    }
    match rest.len() {
        0 => Expr::Constant(0.0),
        1 => rest.pop().unwrap(),
        _ => Expr::Sum(rest),
    }
}

pub(crate) fn fold_product(factors: Vec<Expr>) -> Expr {
    let mut constant = 1.0;
    let mut rest: Vec<Expr> = Vec::with_capacity(factors.len());
    for f in factors {
        match f {
            Expr::Constant(v) => {
                if v == 0.0 {
                    return Expr::Constant(0.0);
                }
                constant *= v;
            }
            other => rest.push(other),
        }
    }
    if constant != 1.0 {
        rest.insert(0, Expr::Constant(constant));
    }
    match rest.len() {
        0 => Expr::Constant(1.0),
        1 => rest.pop().unwrap(),
        _ => Expr::Product(rest),
    }
}

pub(crate) fn fold_negate(child: Expr) -> Expr {
    match child {
        Expr::Constant(v) => Expr::Constant(-v),
        other => Expr::Negate(Box::new(other)),
    }
}

fn fold_power(base: Expr, p: Rational) -> Expr {
    if p.num() == 0 {
        return Expr::Constant(1.0);
    }
    if p.num() == p.den() {
        return base;
    }
    if let Expr::Constant(v) = base {
        if let Ok(folded) = pow_rational(v, p) {
            return Expr::Constant(folded);
        }
    }
    Expr::Power(Box::new(base), p)
}
