//! Linear families: p-median facility location and the cont5_2 linear-
//! quadratic control discretization (objective dropped, set to zero).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::GeneratorError;
use crate::model::{AffineExpression, Model, ObjSense, RowSense, VariableRef};

/// p-median: place `facilities` of `locations` candidates to serve
/// `customers`; the LP relaxation as modeled (all variables in [0, 1]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PMedianConfig {
    pub locations: usize,
    pub facilities: usize,
    pub customers: usize,
    pub seed: u64,
}

impl PMedianConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.facilities < 1 || self.facilities > self.locations {
            return Err(GeneratorError::InvalidConfig(format!(
                "need 1 <= facilities <= locations, got {} of {}",
                self.facilities, self.locations
            )));
        }
        if self.customers < 1 {
            return Err(GeneratorError::InvalidConfig(
                "need at least one customer".into(),
            ));
        }
        Ok(())
    }
}

/// Builds the p-median model:
///
/// - variables `x[i][j]` (customer i served from location j) then `y[j]`
///   (location j open), all bounded `[0, 1]`;
/// - rows `x[i][j] <= y[j]`, then `sum_j x[i][j] = 1` per customer, then
///   `sum_j y[j] = facilities`;
/// - objective `sum |C_i - j| x[i][j]` with customer locations `C_i` drawn
///   uniformly from `[1, locations]` using the seeded generator.
pub fn pmedian(cfg: &PMedianConfig) -> Result<Model, GeneratorError> {
    cfg.validate()?;
    let (l, n) = (cfg.locations, cfg.customers);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let customer: Vec<f64> = (0..n).map(|_| rng.random_range(1.0..=l as f64)).collect();

    let mut model = Model::new(ObjSense::Minimize);
    let mut x: Vec<VariableRef> = Vec::with_capacity(n * l);
    for _ in 0..n * l {
        x.push(model.add_variable(0.0, 1.0).expect("valid bounds"));
    }
    let y: Vec<VariableRef> = (0..l)
        .map(|_| model.add_variable(0.0, 1.0).expect("valid bounds"))
        .collect();

    let mut obj = AffineExpression::with_capacity(n * l);
    for i in 0..n {
        for j in 0..l {
            obj.add_term((customer[i] - (j + 1) as f64).abs(), x[i * l + j]);
        }
    }
    model.set_objective(obj).expect("columns issued");

    for i in 0..n {
        for j in 0..l {
            let mut e = AffineExpression::with_capacity(2);
            e.add_term(1.0, x[i * l + j]);
            e.add_term(-1.0, y[j]);
            model.add_constraint(e, RowSense::Le).expect("columns issued");
        }
    }
    for i in 0..n {
        let mut e = AffineExpression::with_capacity(l);
        for j in 0..l {
            e.add_term(1.0, x[i * l + j]);
        }
        e.add_constant(-1.0);
        model.add_constraint(e, RowSense::Eq).expect("columns issued");
    }
    let mut e = AffineExpression::with_capacity(l);
    for &yj in &y {
        e.add_term(1.0, yj);
    }
    e.add_constant(-(cfg.facilities as f64));
    model.add_constraint(e, RowSense::Eq).expect("columns issued");

    Ok(model)
}

/// cont5_2 control discretization. `space_steps` is the spatial grid size N
/// (points j = 0..N), `time_steps` the time grid size M (points i = 0..M);
/// the benchmarks use N = M.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cont52Config {
    pub space_steps: usize,
    pub time_steps: usize,
}

impl Cont52Config {
    pub fn square(n: usize) -> Self {
        Cont52Config {
            space_steps: n,
            time_steps: n,
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.space_steps < 2 || self.time_steps < 2 {
            return Err(GeneratorError::InvalidConfig(
                "grid sizes must be at least 2".into(),
            ));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.space_steps as f64
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.time_steps as f64
    }

    /// Terminal profile g_j = (1 - (j*dx)^2) / 2 for j = 0..=N. The dropped
    /// objective would use it; it is kept available for fidelity.
    pub fn terminal_profile(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..=self.space_steps)
            .map(|j| 0.5 * (1.0 - (j as f64 * dx).powi(2)))
            .collect()
    }
}

/// Builds the cont5_2 model with a zero objective:
///
/// - variables `y[i][j]`, i = 0..=M (time), j = 0..=N (space), then `u[i]`,
///   i = 1..=M; `y[0][j]` is fixed to zero, the rest of y lies in [0, 1],
///   u in [-1, 1];
/// - the PDE stencil rows for i = 0..M-1, j = 1..N-1, then the two boundary
///   families for i = 1..=M, all equalities.
pub fn cont5_2(cfg: &Cont52Config) -> Result<Model, GeneratorError> {
    cfg.validate()?;
    let (n, m) = (cfg.space_steps, cfg.time_steps);
    let (dx, dt) = (cfg.dx(), cfg.dt());
    let diffusion = 1.0 / (2.0 * dx * dx);
    let rate = 1.0 / dt;

    let mut model = Model::new(ObjSense::Minimize);
    let mut y: Vec<VariableRef> = Vec::with_capacity((m + 1) * (n + 1));
    for i in 0..=m {
        for _j in 0..=n {
            let (lb, ub) = if i == 0 { (0.0, 0.0) } else { (0.0, 1.0) };
            y.push(model.add_variable(lb, ub).expect("valid bounds"));
        }
    }
    let u: Vec<VariableRef> = (0..m)
        .map(|_| model.add_variable(-1.0, 1.0).expect("valid bounds"))
        .collect();
    let yv = |i: usize, j: usize| y[i * (n + 1) + j];

    // (y[i+1][j] - y[i][j]) / dt = diffusion * (y[i][j-1] - 2 y[i][j]
    //   + y[i][j+1] + y[i+1][j-1] - 2 y[i+1][j] + y[i+1][j+1])
    for i in 0..m {
        for j in 1..n {
            let mut e = AffineExpression::with_capacity(8);
            e.add_term(rate, yv(i + 1, j));
            e.add_term(-rate, yv(i, j));
            e.add_term(-diffusion, yv(i, j - 1));
            e.add_term(2.0 * diffusion, yv(i, j));
            e.add_term(-diffusion, yv(i, j + 1));
            e.add_term(-diffusion, yv(i + 1, j - 1));
            e.add_term(2.0 * diffusion, yv(i + 1, j));
            e.add_term(-diffusion, yv(i + 1, j + 1));
            model.add_constraint(e, RowSense::Eq).expect("columns issued");
        }
    }
    // y[i][2] - 4 y[i][1] + 3 y[i][0] = 0
    for i in 1..=m {
        let mut e = AffineExpression::with_capacity(3);
        e.add_term(1.0, yv(i, 2));
        e.add_term(-4.0, yv(i, 1));
        e.add_term(3.0, yv(i, 0));
        model.add_constraint(e, RowSense::Eq).expect("columns issued");
    }
    // y[i][N-2] - 4 y[i][N-1] + 3 y[i][N] = 2 dx (u[i] - y[i][N])
    for i in 1..=m {
        let mut e = AffineExpression::with_capacity(5);
        e.add_term(1.0, yv(i, n - 2));
        e.add_term(-4.0, yv(i, n - 1));
        e.add_term(3.0, yv(i, n));
        e.add_term(-2.0 * dx, u[i - 1]);
        e.add_term(2.0 * dx, yv(i, n));
        model.add_constraint(e, RowSense::Eq).expect("columns issued");
    }

    Ok(model)
}
