//! Small dense two-phase primal simplex with Bland's rule.
//!
//! Solves `min c'x  s.t.  A x {<=,=,>=} b,  x >= 0` on a dense tableau.
//! Bland's anti-cycling rule keeps pivoting deterministic and finite, which
//! is what the master problems and test oracles need; scale is desk-sized by
//! design.

use crate::model::RowSense;
use thiserror::Error;

const PIVOT_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum SimplexError {
    #[error("problem is infeasible (phase-1 objective {0})")]
    Infeasible(f64),
    #[error("problem is unbounded")]
    Unbounded,
    #[error("iteration limit reached")]
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub sense: RowSense,
    pub rhs: f64,
}

/// `min objective . x` subject to `rows`, `x >= 0`.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
}

struct Tableau {
    ncols: usize, // structural + slack/surplus + artificial
    first_artificial: usize,
    rows: Vec<Vec<f64>>, // m rows of length ncols + 1 (rhs last)
    basis: Vec<usize>,
    cost: Vec<f64>, // reduced-cost row of length ncols + 1 (objective value negated last)
}

pub fn solve_dense(lp: &LinearProgram) -> Result<LpSolution, SimplexError> {
    let n = lp.objective.len();
    let m = lp.rows.len();
    for row in &lp.rows {
        assert_eq!(row.coeffs.len(), n, "row length mismatch");
    }

    // Normalize to nonnegative rhs, then attach slack/surplus and artificial
    // columns. Le rows start basic on their slack; Ge/Eq rows on an
    // artificial.
    let mut slack_cols = 0usize;
    for row in &lp.rows {
        let sense = effective_sense(row);
        if sense != RowSense::Eq {
            slack_cols += 1;
        }
    }
    let mut artificial_rows: Vec<usize> = Vec::new();
    let first_slack = n;
    let mut ncols = n + slack_cols;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut basis = vec![usize::MAX; m];

    let mut slack_cursor = first_slack;
    for (i, row) in lp.rows.iter().enumerate() {
        let flip = row.rhs < 0.0;
        let mut r: Vec<f64> = row
            .coeffs
            .iter()
            .map(|&v| if flip { -v } else { v })
            .collect();
        r.resize(ncols, 0.0);
        r.push(if flip { -row.rhs } else { row.rhs });
        let sense = effective_sense(row);
        match sense {
            RowSense::Le => {
                r[slack_cursor] = 1.0;
                basis[i] = slack_cursor;
                slack_cursor += 1;
            }
            RowSense::Ge => {
                r[slack_cursor] = -1.0;
                slack_cursor += 1;
                artificial_rows.push(i);
            }
            RowSense::Eq => {
                artificial_rows.push(i);
            }
        }
        rows.push(r);
    }

    // Append artificial columns.
    let first_artificial = ncols;
    ncols += artificial_rows.len();
    for r in rows.iter_mut() {
        let rhs = r.pop().expect("rhs present");
        r.resize(ncols, 0.0);
        r.push(rhs);
    }
    for (k, &i) in artificial_rows.iter().enumerate() {
        rows[i][first_artificial + k] = 1.0;
        basis[i] = first_artificial + k;
    }

    let mut t = Tableau {
        ncols,
        first_artificial,
        rows,
        basis,
        cost: vec![0.0; ncols + 1],
    };

    // Phase 1: minimize the sum of artificials.
    if !artificial_rows.is_empty() {
        let mut phase1 = vec![0.0; ncols + 1];
        for c in first_artificial..ncols {
            phase1[c] = 1.0;
        }
        t.cost = reduced_costs(&t, &phase1);
        iterate(&mut t, ncols)?;
        let phase1_obj = -t.cost[ncols];
        if phase1_obj > 1e-7 {
            return Err(SimplexError::Infeasible(phase1_obj));
        }
        drive_out_artificials(&mut t);
    }

    // Phase 2 over the original objective; artificial columns are barred
    // from entering.
    let mut phase2 = vec![0.0; ncols + 1];
    phase2[..n].copy_from_slice(&lp.objective);
    t.cost = reduced_costs(&t, &phase2);
    iterate(&mut t, first_artificial)?;

    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            x[b] = t.rows[i][ncols];
        }
    }
    Ok(LpSolution {
        x,
        objective: -t.cost[ncols],
    })
}

fn effective_sense(row: &LpRow) -> RowSense {
    if row.rhs >= 0.0 {
        row.sense
    } else {
        match row.sense {
            RowSense::Le => RowSense::Ge,
            RowSense::Ge => RowSense::Le,
            RowSense::Eq => RowSense::Eq,
        }
    }
}

/// Reduced costs c_j - c_B . T_j for the current basis, with the negated
/// objective value in the last slot.
fn reduced_costs(t: &Tableau, costs: &[f64]) -> Vec<f64> {
    let mut rc = costs.to_vec();
    for (i, &b) in t.basis.iter().enumerate() {
        let cb = costs[b];
        if cb != 0.0 {
            for j in 0..=t.ncols {
                rc[j] -= cb * t.rows[i][j];
            }
        }
    }
    rc
}

/// Primal simplex iterations with Bland's rule. Columns at or beyond
/// `enter_limit` never enter (used to bar artificials in phase 2).
fn iterate(t: &mut Tableau, enter_limit: usize) -> Result<(), SimplexError> {
    let max_iters = 50 * (t.ncols + t.rows.len() + 10) * (t.rows.len() + 10);
    for _ in 0..max_iters {
        // Bland: the lowest-index improving column enters.
        let entering = (0..enter_limit).find(|&j| t.cost[j] < -PIVOT_EPS);
        let Some(entering) = entering else {
            return Ok(());
        };
        // Ratio test; ties broken by the smallest basic variable index.
        let mut leaving: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..t.rows.len() {
            let a = t.rows[i][entering];
            if a > PIVOT_EPS {
                let ratio = t.rows[i][t.ncols] / a;
                let better = match leaving {
                    None => true,
                    Some(l) => {
                        ratio < best_ratio - PIVOT_EPS
                            || (ratio < best_ratio + PIVOT_EPS && t.basis[i] < t.basis[l])
                    }
                };
                if better {
                    leaving = Some(i);
                    best_ratio = ratio;
                }
            }
        }
        let Some(leaving) = leaving else {
            return Err(SimplexError::Unbounded);
        };
        pivot(t, leaving, entering);
    }
    Err(SimplexError::IterationLimit)
}

fn pivot(t: &mut Tableau, row: usize, col: usize) {
    let p = t.rows[row][col];
    for v in t.rows[row].iter_mut() {
        *v /= p;
    }
    let pivot_row = t.rows[row].clone();
    for (i, r) in t.rows.iter_mut().enumerate() {
        if i != row && r[col] != 0.0 {
            let f = r[col];
            for (v, &pv) in r.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
        }
    }
    if t.cost[col] != 0.0 {
        let f = t.cost[col];
        for (v, &pv) in t.cost.iter_mut().zip(&pivot_row) {
            *v -= f * pv;
        }
    }
    t.basis[row] = col;
}

/// After phase 1, pivot zero-valued artificial basics onto structural
/// columns where possible; rows with no eligible pivot are redundant and
/// keep their artificial at zero (it is barred from re-entering).
fn drive_out_artificials(t: &mut Tableau) {
    for i in 0..t.rows.len() {
        if t.basis[i] >= t.first_artificial {
            let col = (0..t.first_artificial).find(|&j| t.rows[i][j].abs() > PIVOT_EPS);
            if let Some(col) = col {
                pivot(t, i, col);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(coeffs: &[f64], sense: RowSense, rhs: f64) -> LpRow {
        LpRow {
            coeffs: coeffs.to_vec(),
            sense,
            rhs,
        }
    }

    #[test]
    fn maximizes_along_single_bound() {
        // min -x s.t. x <= 1
        let lp = LinearProgram {
            objective: vec![-1.0],
            rows: vec![row(&[1.0], RowSense::Le, 1.0)],
        };
        let sol = solve_dense(&lp).unwrap();
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
        assert!((sol.objective + 1.0).abs() < 1e-9);
    }

    #[test]
    fn equality_rows_use_artificials() {
        // min x1 + x2 s.t. x1 + x2 = 1
        let lp = LinearProgram {
            objective: vec![1.0, 1.0],
            rows: vec![row(&[1.0, 1.0], RowSense::Eq, 1.0)],
        };
        let sol = solve_dense(&lp).unwrap();
        assert!((sol.objective - 1.0).abs() < 1e-9);
        assert!((sol.x[0] + sol.x[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_rhs_is_normalized() {
        // min x s.t. -x <= -2  (i.e. x >= 2)
        let lp = LinearProgram {
            objective: vec![1.0],
            rows: vec![row(&[-1.0], RowSense::Le, -2.0)],
        };
        let sol = solve_dense(&lp).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn detects_infeasibility() {
        // x <= -1 with x >= 0
        let lp = LinearProgram {
            objective: vec![0.0],
            rows: vec![row(&[1.0], RowSense::Le, -1.0)],
        };
        assert!(matches!(solve_dense(&lp), Err(SimplexError::Infeasible(_))));
    }

    #[test]
    fn detects_unboundedness() {
        let lp = LinearProgram {
            objective: vec![-1.0],
            rows: vec![],
        };
        assert_eq!(solve_dense(&lp), Err(SimplexError::Unbounded));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Klee-Minty-ish degeneracy; Bland's rule must still terminate.
        let lp = LinearProgram {
            objective: vec![-0.75, 150.0, -0.02, 6.0],
            rows: vec![
                row(&[0.25, -60.0, -0.04, 9.0], RowSense::Le, 0.0),
                row(&[0.5, -90.0, -0.02, 3.0], RowSense::Le, 0.0),
                row(&[0.0, 0.0, 1.0, 0.0], RowSense::Le, 1.0),
            ],
        };
        let sol = solve_dense(&lp).unwrap();
        assert!((sol.objective + 0.05).abs() < 1e-9);
    }

    /// Brute-force oracle for 2-variable LPs: enumerate intersections of
    /// tight constraint pairs (including the axes) and take the best
    /// feasible one.
    fn brute_force_2d(lp: &LinearProgram) -> Option<(f64, [f64; 2])> {
        let mut lines: Vec<[f64; 3]> = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        for r in &lp.rows {
            lines.push([r.coeffs[0], r.coeffs[1], r.rhs]);
        }
        let feasible = |x: [f64; 2]| {
            if x[0] < -1e-7 || x[1] < -1e-7 {
                return false;
            }
            lp.rows.iter().all(|r| {
                let lhs = r.coeffs[0] * x[0] + r.coeffs[1] * x[1];
                match r.sense {
                    RowSense::Le => lhs <= r.rhs + 1e-7,
                    RowSense::Ge => lhs >= r.rhs - 1e-7,
                    RowSense::Eq => (lhs - r.rhs).abs() <= 1e-7,
                }
            })
        };
        let mut best: Option<(f64, [f64; 2])> = None;
        for a in 0..lines.len() {
            for b in (a + 1)..lines.len() {
                let (l1, l2) = (lines[a], lines[b]);
                let det = l1[0] * l2[1] - l1[1] * l2[0];
                if det.abs() < 1e-10 {
                    continue;
                }
                let x = [
                    (l1[2] * l2[1] - l1[1] * l2[2]) / det,
                    (l1[0] * l2[2] - l1[2] * l2[0]) / det,
                ];
                if feasible(x) {
                    let val = lp.objective[0] * x[0] + lp.objective[1] * x[1];
                    if best.is_none() || val < best.unwrap().0 - 1e-12 {
                        best = Some((val, x));
                    }
                }
            }
        }
        best
    }

    #[test]
    fn matches_vertex_enumeration_on_random_2d_problems() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for case in 0..60 {
            let mut rows = vec![
                row(&[1.0, 0.0], RowSense::Le, rng.random_range(1.0..5.0)),
                row(&[0.0, 1.0], RowSense::Le, rng.random_range(1.0..5.0)),
            ];
            for _ in 0..3 {
                rows.push(row(
                    &[rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                    RowSense::Le,
                    rng.random_range(0.5..4.0),
                ));
            }
            let lp = LinearProgram {
                objective: vec![rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)],
                rows,
            };
            let oracle = brute_force_2d(&lp).expect("origin is feasible");
            let sol = solve_dense(&lp).unwrap();
            assert!(
                (sol.objective - oracle.0).abs() <= 1e-7 * (1.0 + oracle.0.abs()),
                "case {case}: simplex {} vs oracle {}",
                sol.objective,
                oracle.0
            );
        }
    }
}
