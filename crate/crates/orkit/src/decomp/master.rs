//! Master problem: minimize the summed cutting-plane models over the box.
//!
//! The epigraph linear program introduces one variable per component model
//! and one row per cut, and goes to the bundled dense simplex. Variables are
//! shifted to the nonnegative orthant first: the iterate by the (possibly
//! trust-region-tightened) lower box corner, each epigraph variable by a
//! valid lower bound on its model function over the box.

use super::simplex::{solve_dense, LinearProgram, LpRow};
use super::{DecompError, MasterConfig, ModelFunction};
use crate::model::RowSense;

#[derive(Debug, Clone)]
pub struct MasterSolution {
    /// Minimizer of the summed model functions (the next iterate).
    pub point: Vec<f64>,
    /// Optimal master value: a global lower bound on the true objective.
    pub lower_bound: f64,
}

/// Solves `min_x sum_j m_j(x)` over the box (intersected with the trust
/// region around `incumbent`, when configured).
pub fn solve_master(
    model_functions: &[ModelFunction],
    incumbent: &[f64],
    cfg: &MasterConfig,
) -> Result<MasterSolution, DecompError> {
    let dim = cfg.lower.len();
    let ncomp = model_functions.len();

    let mut lo = cfg.lower.clone();
    let mut hi = cfg.upper.clone();
    if let Some(delta) = cfg.trust_radius {
        for k in 0..dim {
            lo[k] = lo[k].max(incumbent[k] - delta);
            hi[k] = hi[k].min(incumbent[k] + delta);
        }
    }

    // theta_j is shifted by a lower bound of model j over the box: the best
    // cut's worst box value. The shift never cuts the optimum off.
    let mut shifts = Vec::with_capacity(ncomp);
    for mf in model_functions {
        if mf.cuts.is_empty() {
            return Err(DecompError::UndefinedModel {
                component: mf.component,
            });
        }
        let shift = mf
            .cuts
            .iter()
            .map(|cut| {
                let mut v = cut.value;
                for k in 0..dim {
                    let g = cut.subgradient[k];
                    let corner = if g >= 0.0 { lo[k] } else { hi[k] };
                    v += g * (corner - cut.point[k]);
                }
                v
            })
            .fold(f64::NEG_INFINITY, f64::max);
        shifts.push(shift);
    }

    // Variables: x' = x - lo (dim of them), then theta' = theta - shift.
    let nvars = dim + ncomp;
    let mut objective = vec![0.0; nvars];
    for j in 0..ncomp {
        objective[dim + j] = 1.0;
    }
    let mut rows = Vec::new();
    for (j, mf) in model_functions.iter().enumerate() {
        for cut in &mf.cuts {
            let mut coeffs = vec![0.0; nvars];
            let mut rhs = cut.value - shifts[j];
            for k in 0..dim {
                let g = cut.subgradient[k];
                coeffs[k] = -g;
                rhs += g * (lo[k] - cut.point[k]);
            }
            coeffs[dim + j] = 1.0;
            rows.push(LpRow {
                coeffs,
                sense: RowSense::Ge,
                rhs,
            });
        }
    }
    for k in 0..dim {
        let mut coeffs = vec![0.0; nvars];
        coeffs[k] = 1.0;
        rows.push(LpRow {
            coeffs,
            sense: RowSense::Le,
            rhs: hi[k] - lo[k],
        });
    }

    let solution = solve_dense(&LinearProgram { objective, rows })?;
    let point = (0..dim).map(|k| solution.x[k] + lo[k]).collect();
    let lower_bound = solution.objective + shifts.iter().sum::<f64>();
    Ok(MasterSolution { point, lower_bound })
}
