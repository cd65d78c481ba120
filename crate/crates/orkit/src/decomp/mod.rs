//! Cutting-plane minimization of a sum of convex components, synchronous or
//! asynchronous, over a dynamic worker pool.
//!
//! Each component j is known only through an oracle returning `(f_j(x), g)`
//! pairs with `g` a subgradient at x. Accumulated cuts form per-component
//! model functions (pointwise maxima of affine minorants, global
//! underestimators of the true functions); the master problem minimizes
//! their sum over a finite box, optionally intersected with a fixed-radius
//! trust-region box around the incumbent, and yields both the next iterate
//! and a global lower bound.
//!
//! The synchronous driver evaluates all components at each iterate through
//! [`WorkerPool::parallel_map`]. The asynchronous variant generates a new
//! iterate as soon as a proportion `alpha` of the current iterate's
//! subproblems has returned, using whatever cuts are available; late results
//! for stale iterates still contribute cuts. With `alpha = 1` and one worker
//! it collapses to the synchronous iterate sequence. The upper bound (and
//! hence the convergence gap) only counts fully evaluated iterates.

mod master;
mod metrics;
mod pool;
pub mod simplex;

pub use master::{solve_master, MasterSolution};
pub use metrics::{compute_metrics, efficiency, Metrics, MetricsError};
pub use pool::{Event, EventKind, LatencyModel, PoolCtx, PoolMode, WorkerPool, WorkerPoolConfig};

use simplex::SimplexError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecompError {
    #[error("model function {component} has no cuts")]
    UndefinedModel { component: usize },
    #[error("invalid configuration: {0}")]
    Configuration(String),
    #[error("oracle failed on component {component}: {message}")]
    Oracle { component: usize, message: String },
    #[error("master solve failed: {0}")]
    Master(#[from] SimplexError),
}

/// One affine minorant: f(point) plus the subgradient inequality gives
/// `f(x) >= value + g . (x - point)` everywhere.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub point: Vec<f64>,
    pub value: f64,
    pub subgradient: Vec<f64>,
}

impl Cut {
    pub fn minorant_at(&self, x: &[f64]) -> f64 {
        let mut v = self.value;
        for k in 0..x.len() {
            v += self.subgradient[k] * (x[k] - self.point[k]);
        }
        v
    }
}

/// Cutting-plane model of one component: the pointwise max of its cuts.
#[derive(Debug, Clone, Default)]
pub struct ModelFunction {
    pub component: usize,
    pub cuts: Vec<Cut>,
}

impl ModelFunction {
    pub fn new(component: usize) -> Self {
        ModelFunction {
            component,
            cuts: Vec::new(),
        }
    }

    /// `max_i { f(x^i) + g_i . (x - x^i) }`; undefined until a cut exists.
    pub fn value(&self, x: &[f64]) -> Result<f64, DecompError> {
        if self.cuts.is_empty() {
            return Err(DecompError::UndefinedModel {
                component: self.component,
            });
        }
        Ok(self
            .cuts
            .iter()
            .map(|c| c.minorant_at(x))
            .fold(f64::NEG_INFINITY, f64::max))
    }
}

/// Function value and subgradient at one point.
#[derive(Debug, Clone)]
pub struct CutInfo {
    pub value: f64,
    pub subgradient: Vec<f64>,
}

/// Supplier of component evaluations. Implementations must be thread-safe;
/// workers call them concurrently.
pub trait Oracle: Sync {
    fn components(&self) -> usize;
    fn evaluate(&self, component: usize, x: &[f64]) -> Result<CutInfo, String>;
}

#[derive(Debug, Clone)]
pub struct MasterConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Fixed trust-region radius around the incumbent; never adapted.
    pub trust_radius: Option<f64>,
    /// Relative gap tolerance: stop when `ub - lb <= tol * (1 + |ub|)`.
    pub tol: f64,
    /// Proportion of an iterate's subproblems that triggers the next master
    /// solve in the asynchronous variant.
    pub alpha: f64,
    /// Starting iterate; the box midpoint when unset.
    pub initial: Option<Vec<f64>>,
    pub max_iterations: usize,
}

impl MasterConfig {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Self {
        MasterConfig {
            lower,
            upper,
            trust_radius: None,
            tol: 1e-6,
            alpha: 1.0,
            initial: None,
            max_iterations: 1000,
        }
    }

    pub fn validate(&self) -> Result<(), DecompError> {
        let err = |m: String| Err(DecompError::Configuration(m));
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return err("box bounds are empty or mismatched".into());
        }
        for (k, (&l, &u)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !l.is_finite() || !u.is_finite() {
                return err(format!("box must be finite, coordinate {k} is not"));
            }
            if l > u {
                return err(format!("box is empty in coordinate {k}: {l} > {u}"));
            }
        }
        if !(self.tol > 0.0) {
            return err(format!("tolerance must be positive, got {}", self.tol));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return err(format!("alpha must lie in (0, 1], got {}", self.alpha));
        }
        if let Some(d) = self.trust_radius {
            if !(d > 0.0) {
                return err(format!("trust radius must be positive, got {d}"));
            }
        }
        if let Some(x0) = &self.initial {
            if x0.len() != self.lower.len() {
                return err("initial point dimension mismatch".into());
            }
            for k in 0..x0.len() {
                if x0[k] < self.lower[k] || x0[k] > self.upper[k] {
                    return err(format!("initial point leaves the box in coordinate {k}"));
                }
            }
        }
        if self.max_iterations == 0 {
            return err("max_iterations must be positive".into());
        }
        Ok(())
    }

    fn initial_point(&self) -> Vec<f64> {
        match &self.initial {
            Some(x) => x.clone(),
            None => self
                .lower
                .iter()
                .zip(&self.upper)
                .map(|(&l, &u)| 0.5 * (l + u))
                .collect(),
        }
    }
}

/// Outcome of a decomposition run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Best fully evaluated point.
    pub point: Vec<f64>,
    /// Its objective value (the best upper bound).
    pub value: f64,
    /// Last master lower bound.
    pub lower_bound: f64,
    /// Number of iterates generated (and scheduled for evaluation).
    pub iterations: usize,
    pub converged: bool,
    /// Every iterate in generation order.
    pub iterates: Vec<Vec<f64>>,
    /// Dispatch/complete/master-solve trace.
    pub events: Vec<Event>,
    pub metrics: Metrics,
}

fn check_oracle_reply(
    info: &CutInfo,
    component: usize,
    dim: usize,
) -> Result<(), DecompError> {
    if info.subgradient.len() != dim {
        return Err(DecompError::Oracle {
            component,
            message: format!(
                "subgradient has dimension {}, expected {dim}",
                info.subgradient.len()
            ),
        });
    }
    Ok(())
}

fn gap_closed(upper: f64, lower: f64, tol: f64) -> bool {
    upper.is_finite() && upper - lower <= tol * (1.0 + upper.abs())
}

/// Synchronous cutting-plane loop: evaluate every component at the current
/// iterate (in parallel), add the cuts, solve the master, repeat until the
/// gap closes or the iteration cap is hit.
pub fn sync_solve<O: Oracle>(
    oracle: &O,
    cfg: &MasterConfig,
    pool_cfg: &WorkerPoolConfig,
) -> Result<SolveReport, DecompError> {
    cfg.validate()?;
    let n = oracle.components();
    if n == 0 {
        return Err(DecompError::Configuration("oracle has no components".into()));
    }
    let dim = cfg.lower.len();
    let mut pool = WorkerPool::new(pool_cfg.clone());
    let mut mfs: Vec<ModelFunction> = (0..n).map(ModelFunction::new).collect();
    let mut iterates = vec![cfg.initial_point()];
    let mut best_value = f64::INFINITY;
    let mut best_point = iterates[0].clone();

    let (lower_bound, converged) = loop {
        let x = iterates.last().expect("nonempty").clone();
        let tasks: Vec<(usize, Vec<f64>)> = (0..n).map(|j| (j, x.clone())).collect();
        let results = pool.parallel_map(|(j, point)| oracle.evaluate(*j, point), tasks);
        let mut total = 0.0;
        for (j, reply) in results.into_iter().enumerate() {
            let info = reply.map_err(|message| DecompError::Oracle {
                component: j,
                message,
            })?;
            check_oracle_reply(&info, j, dim)?;
            total += info.value;
            mfs[j].cuts.push(Cut {
                point: x.clone(),
                value: info.value,
                subgradient: info.subgradient,
            });
        }
        if total < best_value {
            best_value = total;
            best_point = x;
        }

        let solution = solve_master(&mfs, &best_point, cfg)?;
        pool.record_master(iterates.len(), solution.lower_bound);
        if gap_closed(best_value, solution.lower_bound, cfg.tol) {
            break (solution.lower_bound, true);
        }
        if iterates.len() >= cfg.max_iterations {
            break (solution.lower_bound, false);
        }
        iterates.push(solution.point);
    };

    let metrics = compute_metrics(pool.events(), pool.workers(), None)
        .expect("at least one component completed");
    Ok(SolveReport {
        point: best_point,
        value: best_value,
        lower_bound,
        iterations: iterates.len(),
        converged,
        iterates,
        events: pool.into_events(),
        metrics,
    })
}

struct AsyncTask {
    iterate: usize,
    component: usize,
    point: Vec<f64>,
}

struct AsyncState {
    mfs: Vec<ModelFunction>,
    iterates: Vec<Vec<f64>>,
    received: Vec<usize>,
    totals: Vec<f64>,
    best_value: f64,
    best_point: Vec<f64>,
    lower_bound: f64,
    last_triggered: Option<usize>,
    master_solves: usize,
    terminated: bool,
    converged: bool,
    error: Option<DecompError>,
    /// Serialization witness: counts `process_result` applications.
    seq: u64,
}

/// Asynchronous variant: a single task queue feeds the pool; once
/// `ceil(alpha * n)` results for the newest iterate have arrived, the master
/// resolves on all available cuts and a fresh set of subproblems joins the
/// queue. Results for older iterates still add their cuts when they land.
pub fn async_solve<O: Oracle>(
    oracle: &O,
    cfg: &MasterConfig,
    pool_cfg: &WorkerPoolConfig,
) -> Result<SolveReport, DecompError> {
    cfg.validate()?;
    let n = oracle.components();
    if n == 0 {
        return Err(DecompError::Configuration("oracle has no components".into()));
    }
    let dim = cfg.lower.len();
    let threshold = ((cfg.alpha * n as f64).ceil() as usize).clamp(1, n);

    let x1 = cfg.initial_point();
    let initial: Vec<AsyncTask> = (0..n)
        .map(|j| AsyncTask {
            iterate: 0,
            component: j,
            point: x1.clone(),
        })
        .collect();
    let state = AsyncState {
        mfs: (0..n).map(ModelFunction::new).collect(),
        iterates: vec![x1.clone()],
        received: vec![0],
        totals: vec![0.0],
        best_value: f64::INFINITY,
        best_point: x1,
        lower_bound: f64::NEG_INFINITY,
        last_triggered: None,
        master_solves: 0,
        terminated: false,
        converged: false,
        error: None,
        seq: 0,
    };

    let mut pool = WorkerPool::new(pool_cfg.clone());
    let state = pool.run_task_pool(
        state,
        initial,
        |task| oracle.evaluate(task.component, &task.point),
        |task| format!("k{}.j{}", task.iterate + 1, task.component),
        |s| s.terminated,
        |s, task, reply, ctx| apply_result(s, task, reply, ctx, cfg, n, dim, threshold),
    );

    if let Some(error) = state.error {
        return Err(error);
    }
    let metrics = compute_metrics(pool.events(), pool.workers(), None)
        .expect("at least one subproblem completed");
    Ok(SolveReport {
        point: state.best_point,
        value: state.best_value,
        lower_bound: state.lower_bound,
        iterations: state.iterates.len(),
        converged: state.converged,
        iterates: state.iterates,
        events: pool.into_events(),
        metrics,
    })
}

#[allow(clippy::too_many_arguments)]
fn apply_result(
    s: &mut AsyncState,
    task: AsyncTask,
    reply: Result<CutInfo, String>,
    ctx: &mut PoolCtx<'_, AsyncTask>,
    cfg: &MasterConfig,
    n: usize,
    dim: usize,
    threshold: usize,
) {
    s.seq += 1;
    let info = match reply {
        Ok(info) => info,
        Err(message) => {
            s.error = Some(DecompError::Oracle {
                component: task.component,
                message,
            });
            s.terminated = true;
            return;
        }
    };
    if let Err(e) = check_oracle_reply(&info, task.component, dim) {
        s.error = Some(e);
        s.terminated = true;
        return;
    }

    s.mfs[task.component].cuts.push(Cut {
        point: task.point,
        value: info.value,
        subgradient: info.subgradient,
    });
    s.received[task.iterate] += 1;
    s.totals[task.iterate] += info.value;

    if s.received[task.iterate] == n {
        // Iterate fully evaluated: it can carry the upper bound.
        if s.totals[task.iterate] < s.best_value {
            s.best_value = s.totals[task.iterate];
            s.best_point = s.iterates[task.iterate].clone();
        }
        if gap_closed(s.best_value, s.lower_bound, cfg.tol) {
            s.terminated = true;
            s.converged = true;
            return;
        }
    }

    let current = s.iterates.len() - 1;
    // The first master solve additionally waits until every model function
    // has been seeded with a cut; from then on the trigger is pure alpha.
    let all_seeded = s.last_triggered.is_some() || s.mfs.iter().all(|mf| !mf.cuts.is_empty());
    if task.iterate == current
        && s.received[current] >= threshold
        && s.last_triggered != Some(current)
        && all_seeded
    {
        s.last_triggered = Some(current);
        let solution = match solve_master(&s.mfs, &s.best_point, cfg) {
            Ok(sol) => sol,
            Err(e) => {
                s.error = Some(e);
                s.terminated = true;
                return;
            }
        };
        s.lower_bound = solution.lower_bound;
        s.master_solves += 1;
        ctx.record_master(s.master_solves, s.lower_bound);
        if gap_closed(s.best_value, s.lower_bound, cfg.tol) {
            s.terminated = true;
            s.converged = true;
            return;
        }
        if s.iterates.len() >= cfg.max_iterations {
            s.terminated = true;
            return;
        }
        s.iterates.push(solution.point.clone());
        s.received.push(0);
        s.totals.push(0.0);
        for j in 0..n {
            ctx.push_task(AsyncTask {
                iterate: s.iterates.len() - 1,
                component: j,
                point: solution.point.clone(),
            });
        }
    }
}
