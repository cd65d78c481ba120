//! Revised-dual-simplex benchmark kernels: the restricted transpose mat-vec,
//! the two-pass stabilized minimum ratio test, and the range-checked axpy,
//! each in a dense-vector and a sparse-vector (hyper-sparse) variant.
//!
//! All kernels are single-threaded, reentrant, and pure apart from the
//! in-place `y` update of the axpy. Indices are zero-based.

use crate::sparse::{CscMatrix, CsrMatrix, SparseVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KernelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("tolerances must be positive (eps_p={eps_p}, eps_d={eps_d})")]
    NonpositiveTolerance { eps_p: f64, eps_d: f64 },
}

/// Nonbasic-at-lower or basic. Upper-bounded states are out of scope; the
/// ratio test is simplified in that respect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarState {
    Lower,
    Basic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioTestResult {
    /// Winning index, if any candidate qualified.
    pub result: Option<u32>,
    /// Bound on the dual step length from the relaxed first pass.
    pub theta_max: f64,
    /// Pass-1 candidate list, in scan order (diagnostic).
    pub candidates: Vec<u32>,
}

/// y := A_N^T x for the columns selected by `flags`; positions with a zero
/// flag are written as 0 so the output always has `n` entries.
pub fn restricted_transpose_matvec_dense(
    a: &CscMatrix,
    x: &[f64],
    flags: &[bool],
) -> Result<Vec<f64>, KernelError> {
    if x.len() != a.nrows() || flags.len() != a.ncols() {
        return Err(KernelError::DimensionMismatch(format!(
            "matrix is {}x{}, x has {}, flags has {}",
            a.nrows(),
            a.ncols(),
            x.len(),
            flags.len()
        )));
    }
    let mut y = vec![0.0; a.ncols()];
    for (i, flag) in flags.iter().enumerate() {
        if !flag {
            continue;
        }
        let (rows, vals) = a.col(i);
        let mut s = 0.0;
        for (&j, &q) in rows.iter().zip(vals) {
            s += q * x[j as usize];
        }
        y[i] = s;
    }
    Ok(y)
}

/// Sparse A^T x as a linear combination of the rows of A selected by the
/// stored entries of x. Output indices appear in first-touch order; entries
/// that cancel to zero stay stored. No flag filtering happens here.
pub fn transpose_matvec_sparse(
    a: &CsrMatrix,
    x: &SparseVector,
) -> Result<SparseVector, KernelError> {
    if x.dim() != a.nrows() {
        return Err(KernelError::DimensionMismatch(format!(
            "matrix is {}x{}, x has {}",
            a.nrows(),
            a.ncols(),
            x.dim()
        )));
    }
    let n = a.ncols();
    let mut accumulator = vec![0.0; n];
    let mut touched = vec![false; n];
    let mut order: Vec<u32> = Vec::new();
    for (j, p) in x.iter() {
        let (cols, vals) = a.row(j as usize);
        for (&i, &q) in cols.iter().zip(vals) {
            if !touched[i as usize] {
                touched[i as usize] = true;
                order.push(i);
            }
            accumulator[i as usize] += p * q;
        }
    }
    let values = order.iter().map(|&i| accumulator[i as usize]).collect();
    Ok(SparseVector::new(n, order, values).expect("first-touch indices are unique"))
}

/// Two-pass stabilized minimum ratio test over dense `alpha`.
///
/// Pass 1 collects candidates (`state == Lower` and `alpha > eps_p`) and
/// relaxes the bound to `theta_max = min (d + eps_d) / alpha`. Pass 2 picks,
/// among candidates whose unrelaxed ratio still fits under `theta_max`, the
/// one with the largest pivot `alpha` (strictly larger: the first seen wins
/// ties). Returns `result: None` with `theta_max = inf` when no candidate
/// exists.
pub fn ratio_test_dense(
    d: &[f64],
    alpha: &[f64],
    states: &[VarState],
    eps_p: f64,
    eps_d: f64,
) -> Result<RatioTestResult, KernelError> {
    if d.len() != alpha.len() || d.len() != states.len() {
        return Err(KernelError::DimensionMismatch(format!(
            "d has {}, alpha has {}, states has {}",
            d.len(),
            alpha.len(),
            states.len()
        )));
    }
    check_tolerances(eps_p, eps_d)?;
    Ok(two_pass(
        alpha.iter().enumerate().map(|(i, &a)| (i as u32, a)),
        d,
        states,
        eps_p,
        eps_d,
    ))
}

/// Sparse variant: pass 1 loops over the stored entries of `alpha` in stored
/// order, which also fixes the tie-breaking scan order of pass 2.
pub fn ratio_test_sparse(
    d: &[f64],
    alpha: &SparseVector,
    states: &[VarState],
    eps_p: f64,
    eps_d: f64,
) -> Result<RatioTestResult, KernelError> {
    if d.len() != alpha.dim() || d.len() != states.len() {
        return Err(KernelError::DimensionMismatch(format!(
            "d has {}, alpha has {}, states has {}",
            d.len(),
            alpha.dim(),
            states.len()
        )));
    }
    check_tolerances(eps_p, eps_d)?;
    Ok(two_pass(alpha.iter(), d, states, eps_p, eps_d))
}

fn check_tolerances(eps_p: f64, eps_d: f64) -> Result<(), KernelError> {
    if eps_p <= 0.0 || eps_d <= 0.0 {
        return Err(KernelError::NonpositiveTolerance { eps_p, eps_d });
    }
    Ok(())
}

fn two_pass(
    pairs: impl Iterator<Item = (u32, f64)>,
    d: &[f64],
    states: &[VarState],
    eps_p: f64,
    eps_d: f64,
) -> RatioTestResult {
    let mut theta_max = f64::INFINITY;
    let mut candidates: Vec<u32> = Vec::new();
    let mut pivots: Vec<f64> = Vec::new();
    for (i, a) in pairs {
        if states[i as usize] == VarState::Lower && a > eps_p {
            candidates.push(i);
            pivots.push(a);
            theta_max = theta_max.min((d[i as usize] + eps_d) / a);
        }
    }
    let mut alpha_max = 0.0;
    let mut result = None;
    for (&i, &a) in candidates.iter().zip(&pivots) {
        if d[i as usize] / a <= theta_max && a > alpha_max {
            alpha_max = a;
            result = Some(i);
        }
    }
    RatioTestResult {
        result,
        theta_max,
        candidates,
    }
}

/// y += alpha * x over every position; each updated component whose new
/// value falls in (-inf, -eps) has its index appended, in update order.
pub fn axpy_checked_dense(
    alpha: f64,
    x: &[f64],
    y: &mut [f64],
    eps: f64,
) -> Result<Vec<u32>, KernelError> {
    if x.len() != y.len() {
        return Err(KernelError::DimensionMismatch(format!(
            "x has {}, y has {}",
            x.len(),
            y.len()
        )));
    }
    debug_assert!(eps > 0.0);
    let mut flagged = Vec::new();
    for (j, (&xj, yj)) in x.iter().zip(y.iter_mut()).enumerate() {
        *yj += alpha * xj;
        if *yj < -eps {
            flagged.push(j as u32);
        }
    }
    Ok(flagged)
}

/// Sparse variant: only components at stored indices of x are updated and
/// therefore checked, in stored order.
pub fn axpy_checked_sparse(
    alpha: f64,
    x: &SparseVector,
    y: &mut [f64],
    eps: f64,
) -> Result<Vec<u32>, KernelError> {
    if x.dim() != y.len() {
        return Err(KernelError::DimensionMismatch(format!(
            "x has {}, y has {}",
            x.dim(),
            y.len()
        )));
    }
    debug_assert!(eps > 0.0);
    let mut flagged = Vec::new();
    for (j, v) in x.iter() {
        let yj = &mut y[j as usize];
        *yj += alpha * v;
        if *yj < -eps {
            flagged.push(j);
        }
    }
    Ok(flagged)
}
