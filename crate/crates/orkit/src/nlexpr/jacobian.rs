//! Sparse Jacobian plans.
//!
//! Compilation groups constraints by canonical key, differentiates once per
//! equivalence class and variable slot, and lowers each partial derivative to
//! a straight-line stack program (a tape). Evaluation binds a row's slots to
//! its concrete columns and runs the class tapes; rows that are symbolically
//! identical up to variable renaming share tapes.
//!
//! The row-wise structure stores, per constraint, the distinct variable
//! columns in first-occurrence order. Repeated occurrences of one variable
//! inside a constraint contribute a single structural entry; the chain rule
//! sums their derivative terms symbolically.

use std::collections::HashMap;

use super::canon::canonical_key;
use super::deriv::differentiate;
use super::{pow_rational, EvalError, Expr, NonlinearModel, Rational};

#[derive(Debug, Clone, Copy)]
enum TapeOp {
    Const(f64),
    Slot(u32),
    Add(u32),
    Mul(u32),
    Neg,
    Pow(Rational),
    Sin,
    Cos,
}

/// Straight-line stack program for one partial derivative.
#[derive(Debug, Clone)]
struct Tape {
    ops: Vec<TapeOp>,
    max_stack: usize,
}

impl Tape {
    fn compile(expr: &Expr, slot_of: &HashMap<u32, u32>) -> Tape {
        let mut ops = Vec::new();
        lower(expr, slot_of, &mut ops);
        let mut depth = 0usize;
        let mut max_stack = 0usize;
        for op in &ops {
            match op {
                TapeOp::Const(_) | TapeOp::Slot(_) => depth += 1,
                TapeOp::Add(k) | TapeOp::Mul(k) => depth = depth - *k as usize + 1,
                TapeOp::Neg | TapeOp::Pow(_) | TapeOp::Sin | TapeOp::Cos => {}
            }
            max_stack = max_stack.max(depth);
        }
        Tape { ops, max_stack }
    }

    fn eval(&self, x: &[f64], binding: &[u32], stack: &mut Vec<f64>) -> Result<f64, EvalError> {
        stack.clear();
        stack.reserve(self.max_stack);
        for op in &self.ops {
            match *op {
                TapeOp::Const(v) => stack.push(v),
                TapeOp::Slot(s) => stack.push(x[(binding[s as usize] - 1) as usize]),
                TapeOp::Add(k) => {
                    let base = stack.len() - k as usize;
                    let mut acc = 0.0;
                    for v in stack.drain(base..) {
                        acc += v;
                    }
                    stack.push(acc);
                }
                TapeOp::Mul(k) => {
                    let base = stack.len() - k as usize;
                    let mut acc = 1.0;
                    for v in stack.drain(base..) {
                        acc *= v;
                    }
                    stack.push(acc);
                }
                TapeOp::Neg => {
                    let top = stack.last_mut().expect("tape underflow");
                    *top = -*top;
                }
                TapeOp::Pow(p) => {
                    let top = stack.last_mut().expect("tape underflow");
                    *top = pow_rational(*top, p)?;
                }
                TapeOp::Sin => {
                    let top = stack.last_mut().expect("tape underflow");
                    *top = top.sin();
                }
                TapeOp::Cos => {
                    let top = stack.last_mut().expect("tape underflow");
                    *top = top.cos();
                }
            }
        }
        Ok(stack.pop().expect("empty tape"))
    }
}

fn lower(expr: &Expr, slot_of: &HashMap<u32, u32>, ops: &mut Vec<TapeOp>) {
    match expr {
        Expr::Constant(v) => ops.push(TapeOp::Const(*v)),
        Expr::Variable(c) => ops.push(TapeOp::Slot(slot_of[c])),
        Expr::Sum(children) => {
            for ch in children {
                lower(ch, slot_of, ops);
            }
            ops.push(TapeOp::Add(children.len() as u32));
        }
        Expr::Product(children) => {
            for ch in children {
                lower(ch, slot_of, ops);
            }
            ops.push(TapeOp::Mul(children.len() as u32));
        }
        Expr::Negate(ch) => {
            lower(ch, slot_of, ops);
            ops.push(TapeOp::Neg);
        }
        Expr::Power(base, p) => {
            lower(base, slot_of, ops);
            ops.push(TapeOp::Pow(*p));
        }
        Expr::Sin(ch) => {
            lower(ch, slot_of, ops);
            ops.push(TapeOp::Sin);
        }
        Expr::Cos(ch) => {
            lower(ch, slot_of, ops);
            ops.push(TapeOp::Cos);
        }
    }
}

#[derive(Debug)]
struct ClassTapes {
    tapes: Vec<Tape>, // one per variable slot
}

/// Compiled row-wise Jacobian structure plus per-class derivative tapes.
#[derive(Debug)]
pub struct JacobianPlan {
    nvars: usize,
    row_ptr: Vec<usize>,
    col_ind: Vec<u32>,
    row_class: Vec<u32>,
    classes: Vec<ClassTapes>,
    diff_invocations: usize,
}

/// Groups constraints into equivalence classes, differentiates once per class
/// per slot, and emits the evaluation plan.
pub fn compile_jacobian(m: &NonlinearModel) -> JacobianPlan {
    let mut class_of: HashMap<super::CanonicalKey, u32> = HashMap::new();
    let mut classes: Vec<ClassTapes> = Vec::new();
    let mut diff_invocations = 0usize;

    let nrows = m.num_constraints();
    let mut row_ptr = Vec::with_capacity(nrows + 1);
    let mut col_ind = Vec::new();
    let mut row_class = Vec::with_capacity(nrows);

    row_ptr.push(0);
    for constraint in m.constraints() {
        let vars = constraint.expr.variables();
        let key = canonical_key(&constraint.expr);
        let class = *class_of.entry(key).or_insert_with(|| {
            let slot_of: HashMap<u32, u32> = vars
                .iter()
                .enumerate()
                .map(|(k, &c)| (c, k as u32))
                .collect();
            let tapes = vars
                .iter()
                .map(|&c| {
                    diff_invocations += 1;
                    Tape::compile(&differentiate(&constraint.expr, c), &slot_of)
                })
                .collect();
            classes.push(ClassTapes { tapes });
            classes.len() as u32 - 1
        });
        row_class.push(class);
        col_ind.extend_from_slice(&vars);
        row_ptr.push(col_ind.len());
    }

    JacobianPlan {
        nvars: m.num_variables(),
        row_ptr,
        col_ind,
        row_class,
        classes,
        diff_invocations,
    }
}

impl JacobianPlan {
    pub fn num_rows(&self) -> usize {
        self.row_class.len()
    }

    pub fn num_variables(&self) -> usize {
        self.nvars
    }

    /// Number of structural nonzero entries.
    pub fn nnz(&self) -> usize {
        self.col_ind.len()
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// How many symbolic differentiations compilation performed: the sum of
    /// slot counts over equivalence classes, independent of the row count.
    pub fn diff_invocations(&self) -> usize {
        self.diff_invocations
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    /// One-based columns of row `i`, in first-occurrence order.
    pub fn row_columns(&self, i: usize) -> &[u32] {
        &self.col_ind[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn col_indices(&self) -> &[u32] {
        &self.col_ind
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), EvalError> {
        if x.len() != self.nvars {
            return Err(EvalError::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn eval_row(
        &self,
        i: usize,
        x: &[f64],
        out: &mut [f64],
        stack: &mut Vec<f64>,
    ) -> Result<(), EvalError> {
        let binding = self.row_columns(i);
        let class = &self.classes[self.row_class[i] as usize];
        for (k, tape) in class.tapes.iter().enumerate() {
            out[k] = tape.eval(x, binding, stack)?;
        }
        Ok(())
    }

    /// Jacobian values aligned with the structure (`col_indices`). Dispatches
    /// to the rayon path when the `parallel` feature is enabled.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        #[cfg(feature = "parallel")]
        {
            self.evaluate_parallel(x)
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.evaluate_sequential(x)
        }
    }

    pub fn evaluate_sequential(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.nnz()];
        let mut stack = Vec::new();
        for i in 0..self.num_rows() {
            let (lo, hi) = (self.row_ptr[i], self.row_ptr[i + 1]);
            // Split so eval_row writes into the row's own window.
            let row_out = &mut out[lo..hi];
            self.eval_row(i, x, row_out, &mut stack)?;
        }
        Ok(out)
    }

    /// Row-parallel evaluation: rows write into disjoint windows of the
    /// output, so values are identical to the sequential path.
    #[cfg(feature = "parallel")]
    pub fn evaluate_parallel(&self, x: &[f64]) -> Result<Vec<f64>, EvalError> {
        use rayon::prelude::*;

        self.check_dim(x)?;
        let mut out = vec![0.0; self.nnz()];
        let mut windows = Vec::with_capacity(self.num_rows());
        let mut rest: &mut [f64] = &mut out;
        for i in 0..self.num_rows() {
            let width = self.row_ptr[i + 1] - self.row_ptr[i];
            let (head, tail) = rest.split_at_mut(width);
            windows.push(head);
            rest = tail;
        }
        windows
            .into_par_iter()
            .enumerate()
            .try_for_each_init(Vec::new, |stack, (i, row_out)| {
                self.eval_row(i, x, row_out, stack)
            })?;
        Ok(out)
    }
}
