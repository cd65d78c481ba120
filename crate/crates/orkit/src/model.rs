//! Linear models built as sparse rows.
//!
//! A model is stored as an ordered list of rows until it is completely
//! specified. Each row holds two parallel arrays, the column indices and the
//! coefficients of the terms appearing in it, plus a constant. Constraints are
//! normalized to `expr ⋈ 0` at build time: the right-hand side is folded into
//! the constant with negated sign, and writers re-derive `rhs = -constant`.
//!
//! Duplicate column indices inside a row are deliberately retained while
//! building; they are merged (summed) only when the model is converted to
//! column form or written out. Columns are one-based and dense: the k-th
//! variable added to a model gets column k.

use crate::sparse::CscMatrix;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("lower bound {lb} exceeds upper bound {ub}")]
    BoundOrder { lb: f64, ub: f64 },
    #[error("expression references column {column} but the model has {issued} variables")]
    StaleColumn { column: u32, issued: usize },
}

/// Objective direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjSense {
    Minimize,
    Maximize,
}

/// Constraint sense; the row is interpreted as `expr sense 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

/// Handle to a model variable. `column` is the one-based column index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VariableRef {
    column: u32,
}

impl VariableRef {
    pub fn column(&self) -> u32 {
        self.column
    }
}

/// Sparse affine expression: parallel index/coefficient arrays plus a
/// constant. Appending never merges duplicates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AffineExpression {
    vars: Vec<u32>,
    coeffs: Vec<f64>,
    constant: f64,
}

impl AffineExpression {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reserves space for `terms` terms up front. The hint is advisory:
    /// correctness never depends on it.
    pub fn with_capacity(terms: usize) -> Self {
        AffineExpression {
            vars: Vec::with_capacity(terms),
            coeffs: Vec::with_capacity(terms),
            constant: 0.0,
        }
    }

    pub fn add_term(&mut self, coeff: f64, var: VariableRef) {
        self.vars.push(var.column);
        self.coeffs.push(coeff);
    }

    pub fn add_constant(&mut self, value: f64) {
        self.constant += value;
    }

    pub fn vars(&self) -> &[u32] {
        &self.vars
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn num_terms(&self) -> usize {
        self.vars.len()
    }

    pub fn capacity(&self) -> usize {
        self.vars.capacity().min(self.coeffs.capacity())
    }

    /// Terms with duplicate columns summed, in first-occurrence order.
    /// Exact zeros produced by cancellation are kept.
    pub fn merged_terms(&self) -> Vec<(u32, f64)> {
        let mut position = std::collections::HashMap::new();
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(self.vars.len());
        for (&c, &v) in self.vars.iter().zip(&self.coeffs) {
            match position.get(&c) {
                Some(&k) => merged[k as usize].1 += v,
                None => {
                    position.insert(c, merged.len() as u32);
                    merged.push((c, v));
                }
            }
        }
        merged
    }
}

/// A row: an affine expression compared against zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub expr: AffineExpression,
    pub sense: RowSense,
}

/// Row-wise model under construction. Single-owner while building; freeze by
/// taking a shared reference (writers and converters take `&Model`).
#[derive(Debug, Clone)]
pub struct Model {
    sense: ObjSense,
    lower: Vec<f64>,
    upper: Vec<f64>,
    names: Vec<Option<String>>,
    objective: AffineExpression,
    rows: Vec<Constraint>,
}

/// Column-oriented snapshot of a model: duplicate (row, column) entries
/// summed, entries sorted by row within each column.
#[derive(Debug, Clone)]
pub struct ColumnForm {
    pub matrix: CscMatrix,
    pub row_senses: Vec<RowSense>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub objective: Vec<f64>,
    pub objective_constant: f64,
}

impl Model {
    pub fn new(sense: ObjSense) -> Self {
        Model {
            sense,
            lower: Vec::new(),
            upper: Vec::new(),
            names: Vec::new(),
            objective: AffineExpression::new(),
            rows: Vec::new(),
        }
    }

    pub fn sense(&self) -> ObjSense {
        self.sense
    }

    pub fn num_variables(&self) -> usize {
        self.lower.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_variable(&mut self, lb: f64, ub: f64) -> Result<VariableRef, ModelError> {
        self.push_variable(lb, ub, None)
    }

    pub fn add_variable_named(
        &mut self,
        lb: f64,
        ub: f64,
        name: &str,
    ) -> Result<VariableRef, ModelError> {
        self.push_variable(lb, ub, Some(name.to_owned()))
    }

    fn push_variable(
        &mut self,
        lb: f64,
        ub: f64,
        name: Option<String>,
    ) -> Result<VariableRef, ModelError> {
        if lb > ub {
            return Err(ModelError::BoundOrder { lb, ub });
        }
        self.lower.push(lb);
        self.upper.push(ub);
        self.names.push(name);
        Ok(VariableRef {
            column: self.lower.len() as u32,
        })
    }

    /// Name used in files: the explicit name if set, `x<column>` otherwise.
    pub fn variable_name(&self, column: u32) -> String {
        match &self.names[(column - 1) as usize] {
            Some(n) => n.clone(),
            None => format!("x{column}"),
        }
    }

    pub fn bounds(&self, column: u32) -> (f64, f64) {
        let i = (column - 1) as usize;
        (self.lower[i], self.upper[i])
    }

    fn check_columns(&self, expr: &AffineExpression) -> Result<(), ModelError> {
        let issued = self.num_variables();
        for &c in expr.vars() {
            if c == 0 || c as usize > issued {
                return Err(ModelError::StaleColumn { column: c, issued });
            }
        }
        Ok(())
    }

    /// Appends a row; returns its one-based index.
    pub fn add_constraint(
        &mut self,
        expr: AffineExpression,
        sense: RowSense,
    ) -> Result<usize, ModelError> {
        self.check_columns(&expr)?;
        self.rows.push(Constraint { expr, sense });
        Ok(self.rows.len())
    }

    /// Replaces the objective.
    pub fn set_objective(&mut self, expr: AffineExpression) -> Result<(), ModelError> {
        self.check_columns(&expr)?;
        self.objective = expr;
        Ok(())
    }

    pub fn objective(&self) -> &AffineExpression {
        &self.objective
    }

    pub fn rows(&self) -> &[Constraint] {
        &self.rows
    }

    /// Converts to column form: duplicates merged, columns sorted by row,
    /// `rhs[i] = -rows[i].expr.constant`.
    pub fn to_column_form(&self) -> ColumnForm {
        let n = self.num_variables();
        let m = self.num_rows();
        let mut triplets = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (&c, &v) in row.expr.vars().iter().zip(row.expr.coeffs()) {
                triplets.push((i, (c - 1) as usize, v));
            }
        }
        let matrix = CscMatrix::from_triplets(m, n, &triplets);
        let mut objective = vec![0.0; n];
        for (&c, &v) in self.objective.vars().iter().zip(self.objective.coeffs()) {
            objective[(c - 1) as usize] += v;
        }
        ColumnForm {
            matrix,
            row_senses: self.rows.iter().map(|r| r.sense).collect(),
            rhs: self.rows.iter().map(|r| -r.expr.constant()).collect(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
            objective,
            objective_constant: self.objective.constant(),
        }
    }
}
