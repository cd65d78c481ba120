//! Canonical keys for expression trees.
//!
//! Two constraints get equal keys exactly when they are symbolically
//! identical and there is a one-to-one correspondence between the variables
//! present: the key linearizes the tree shape, operator kinds and arities,
//! constant bit patterns, and variable slots numbered by first occurrence.
//! Constants must match bitwise; there is no numeric tolerance.

use super::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum KeyToken {
    Const(u64),
    Var(u32),
    Sum(u32),
    Prod(u32),
    Neg,
    Pow(i64, i64),
    Sin,
    Cos,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalKey(Vec<KeyToken>);

impl CanonicalKey {
    /// Number of distinct variable slots in the keyed expression.
    pub fn slot_count(&self) -> usize {
        self.0
            .iter()
            .filter_map(|t| match t {
                KeyToken::Var(s) => Some(*s as usize + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

pub fn canonical_key(expr: &Expr) -> CanonicalKey {
    let mut tokens = Vec::new();
    let mut slots: Vec<u32> = Vec::new();
    walk(expr, &mut tokens, &mut slots);
    CanonicalKey(tokens)
}

fn walk(expr: &Expr, tokens: &mut Vec<KeyToken>, slots: &mut Vec<u32>) {
    match expr {
        Expr::Constant(v) => tokens.push(KeyToken::Const(v.to_bits())),
        Expr::Variable(c) => {
            let slot = match slots.iter().position(|&s| s == *c) {
                Some(k) => k,
                None => {
                    slots.push(*c);
                    slots.len() - 1
                }
            };
            tokens.push(KeyToken::Var(slot as u32));
        }
        Expr::Sum(children) => {
            tokens.push(KeyToken::Sum(children.len() as u32));
            for ch in children {
                walk(ch, tokens, slots);
            }
        }
        Expr::Product(children) => {
            tokens.push(KeyToken::Prod(children.len() as u32));
            for ch in children {
                walk(ch, tokens, slots);
            }
        }
        Expr::Negate(ch) => {
            tokens.push(KeyToken::Neg);
            walk(ch, tokens, slots);
        }
        Expr::Power(base, p) => {
            tokens.push(KeyToken::Pow(p.num(), p.den()));
            walk(base, tokens, slots);
        }
        Expr::Sin(ch) => {
            tokens.push(KeyToken::Sin);
            walk(ch, tokens, slots);
        }
        Expr::Cos(ch) => {
            tokens.push(KeyToken::Cos);
            walk(ch, tokens, slots);
        }
    }
}
