//! Nonlinear families: the clnlbeam discretization and cont5_1.

use super::GeneratorError;
use crate::model::RowSense;
use crate::nlexpr::{Expr, NonlinearModel};

/// clnlbeam with discretization size `n` (h = 1/n): variables t, x, u of
/// length n+1 each, 2n equality constraints in two families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClnlbeamConfig {
    pub n: usize,
}

impl ClnlbeamConfig {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n < 1 {
            return Err(GeneratorError::InvalidConfig("n must be at least 1".into()));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }
}

/// Builds clnlbeam:
///
/// - t[1..=n+1] in [-1, 1], then x[1..=n+1] in [-0.05, 0.05], then
///   u[1..=n+1] free;
/// - family 1: x[i+1] - x[i] - (h/2)(sin t[i+1] + sin t[i]) = 0;
/// - family 2: t[i+1] - t[i] - (h/2) u[i+1] - (h/2) u[i] = 0.
pub fn clnlbeam(cfg: &ClnlbeamConfig) -> Result<NonlinearModel, GeneratorError> {
    cfg.validate()?;
    let n = cfg.n;
    let half_h = 0.5 * cfg.h();

    let mut m = NonlinearModel::new();
    let t: Vec<u32> = (0..=n)
        .map(|_| m.add_variable(-1.0, 1.0).expect("valid bounds"))
        .collect();
    let x: Vec<u32> = (0..=n)
        .map(|_| m.add_variable(-0.05, 0.05).expect("valid bounds"))
        .collect();
    let u: Vec<u32> = (0..=n)
        .map(|_| {
            m.add_variable(f64::NEG_INFINITY, f64::INFINITY)
                .expect("valid bounds")
        })
        .collect();

    for i in 0..n {
        let expr = Expr::sum(vec![
            Expr::variable(x[i + 1]),
            Expr::negate(Expr::variable(x[i])),
            Expr::negate(Expr::product(vec![
                Expr::constant(half_h),
                Expr::sum(vec![
                    Expr::sin(Expr::variable(t[i + 1])),
                    Expr::sin(Expr::variable(t[i])),
                ]),
            ])),
        ]);
        m.add_constraint(expr, RowSense::Eq).expect("columns issued");
    }
    for i in 0..n {
        let expr = Expr::sum(vec![
            Expr::variable(t[i + 1]),
            Expr::negate(Expr::variable(t[i])),
            Expr::negate(Expr::product(vec![
                Expr::constant(half_h),
                Expr::variable(u[i + 1]),
            ])),
            Expr::negate(Expr::product(vec![
                Expr::constant(half_h),
                Expr::variable(u[i]),
            ])),
        ]);
        m.add_constraint(expr, RowSense::Eq).expect("columns issued");
    }

    Ok(m)
}

/// cont5_1 with grid size `n`: y is an (n+1) x (n+1) grid, u has n entries,
/// all free; a = 8n^2/pi^2 and c = 2n/pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cont51Config {
    pub n: usize,
}

impl Cont51Config {
    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.n < 2 {
            return Err(GeneratorError::InvalidConfig("n must be at least 2".into()));
        }
        Ok(())
    }

    pub fn a(&self) -> f64 {
        8.0 * (self.n * self.n) as f64 / (std::f64::consts::PI * std::f64::consts::PI)
    }

    pub fn c(&self) -> f64 {
        2.0 * self.n as f64 / std::f64::consts::PI
    }
}

/// Builds cont5_1:
///
/// - family 1 (interior, i = 1..=n, j = 1..=n-1):
///   n(y[i+1][j+1] - y[i][j+1])
///     - a(y[i][j] - 2 y[i][j+1] + y[i][j+2]
///         + y[i+1][j] - 2 y[i+1][j+1] + y[i+1][j+2]) = 0;
/// - family 2 (i = 1..=n): y[i+1][3] - 4 y[i+1][2] + 3 y[i+1][1] = 0;
/// - family 3 (i = 1..=n):
///   c(y[i+1][n-1] - 4 y[i+1][n] + 3 y[i+1][n+1]) + y[i+1][n+1] - u[i]
///     + y[i+1][n+1] ((y[i+1][n+1])^2)^(3/2) = 0.
pub fn cont5_1(cfg: &Cont51Config) -> Result<NonlinearModel, GeneratorError> {
    cfg.validate()?;
    let n = cfg.n;
    let (a, c) = (cfg.a(), cfg.c());

    let mut m = NonlinearModel::new();
    // y[i][j] for i, j = 1..=n+1, row-major
    let mut y = vec![0u32; (n + 1) * (n + 1)];
    for slot in y.iter_mut() {
        *slot = m
            .add_variable(f64::NEG_INFINITY, f64::INFINITY)
            .expect("valid bounds");
    }
    let u: Vec<u32> = (0..n)
        .map(|_| {
            m.add_variable(f64::NEG_INFINITY, f64::INFINITY)
                .expect("valid bounds")
        })
        .collect();
    let yv = |i: usize, j: usize| Expr::variable(y[(i - 1) * (n + 1) + (j - 1)]);

    for i in 1..=n {
        for j in 1..n {
            let expr = Expr::sum(vec![
                Expr::product(vec![
                    Expr::constant(n as f64),
                    Expr::minus(yv(i + 1, j + 1), yv(i, j + 1)),
                ]),
                Expr::negate(Expr::product(vec![
                    Expr::constant(a),
                    Expr::sum(vec![
                        yv(i, j),
                        Expr::negate(Expr::product(vec![Expr::constant(2.0), yv(i, j + 1)])),
                        yv(i, j + 2),
                        yv(i + 1, j),
                        Expr::negate(Expr::product(vec![Expr::constant(2.0), yv(i + 1, j + 1)])),
                        yv(i + 1, j + 2),
                    ]),
                ])),
            ]);
            m.add_constraint(expr, RowSense::Eq).expect("columns issued");
        }
    }
    for i in 1..=n {
        let expr = Expr::sum(vec![
            yv(i + 1, 3),
            Expr::negate(Expr::product(vec![Expr::constant(4.0), yv(i + 1, 2)])),
            Expr::product(vec![Expr::constant(3.0), yv(i + 1, 1)]),
        ]);
        m.add_constraint(expr, RowSense::Eq).expect("columns issued");
    }
    for i in 1..=n {
        let expr = Expr::sum(vec![
            Expr::product(vec![
                Expr::constant(c),
                Expr::sum(vec![
                    yv(i + 1, n - 1),
                    Expr::negate(Expr::product(vec![Expr::constant(4.0), yv(i + 1, n)])),
                    Expr::product(vec![Expr::constant(3.0), yv(i + 1, n + 1)]),
                ]),
            ]),
            yv(i + 1, n + 1),
            Expr::negate(Expr::variable(u[i - 1])),
            Expr::product(vec![
                yv(i + 1, n + 1),
                Expr::power(Expr::power(yv(i + 1, n + 1), 2, 1), 3, 2),
            ]),
        ]);
        m.add_constraint(expr, RowSense::Eq).expect("columns issued");
    }

    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nlexpr::{canonical_key, compile_jacobian};

    #[test]
    fn clnlbeam_smallest_instance() {
        let m = clnlbeam(&ClnlbeamConfig { n: 1 }).unwrap();
        assert_eq!(m.num_variables(), 6);
        assert_eq!(m.num_constraints(), 2);
    }

    #[test]
    fn clnlbeam_dimensions_and_bounds() {
        let n = 10;
        let m = clnlbeam(&ClnlbeamConfig { n }).unwrap();
        assert_eq!(m.num_variables(), 3 * (n + 1));
        assert_eq!(m.num_constraints(), 2 * n);
        assert_eq!(m.bounds(1), (-1.0, 1.0));
        assert_eq!(m.bounds(n as u32 + 2), (-0.05, 0.05));
        assert_eq!(
            m.bounds(2 * (n as u32 + 1) + 1),
            (f64::NEG_INFINITY, f64::INFINITY)
        );
    }

    #[test]
    fn clnlbeam_families_form_two_classes() {
        let m = clnlbeam(&ClnlbeamConfig { n: 4 }).unwrap();
        // Rows of family 1 all share a canonical key.
        let k0 = canonical_key(&m.constraints()[0].expr);
        for row in &m.constraints()[1..4] {
            assert_eq!(canonical_key(&row.expr), k0);
        }
        // ...and differ from family 2.
        let k4 = canonical_key(&m.constraints()[4].expr);
        assert_ne!(k0, k4);
        let plan = compile_jacobian(&m);
        assert_eq!(plan.class_count(), 2);
        assert_eq!(plan.nnz(), 8 * 4);
        assert_eq!(plan.diff_invocations(), 8);
    }

    #[test]
    fn clnlbeam_jacobian_values_at_origin() {
        let n = 10;
        let m = clnlbeam(&ClnlbeamConfig { n }).unwrap();
        let plan = compile_jacobian(&m);
        let x = vec![0.0; m.num_variables()];
        let vals = plan.evaluate(&x).unwrap();
        // Family-1 rows: entries (1, -1, -0.05, -0.05) in first-occurrence
        // order x[i+1], x[i], t[i+1], t[i].
        for i in 0..n {
            let lo = plan.row_ptr()[i];
            assert_eq!(&vals[lo..lo + 4], &[1.0, -1.0, -0.05, -0.05]);
        }
    }

    #[test]
    fn clnlbeam_residuals_vanish_at_origin() {
        let m = clnlbeam(&ClnlbeamConfig { n: 5 }).unwrap();
        let g = crate::nlexpr::evaluate_constraints(&m, &vec![0.0; m.num_variables()]).unwrap();
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cont5_1_smallest_instance() {
        let m = cont5_1(&Cont51Config { n: 2 }).unwrap();
        // n(n-1) + n + n constraints
        assert_eq!(m.num_constraints(), 6);
        assert_eq!(m.num_variables(), 9 + 2);
        let plan = compile_jacobian(&m);
        assert_eq!(plan.nnz(), 6 * 2 * 1 + 3 * 2 + 4 * 2);
        assert_eq!(plan.class_count(), 3);
    }

    #[test]
    fn cont5_1_rejects_n_below_two() {
        assert!(cont5_1(&Cont51Config { n: 1 }).is_err());
        assert!(clnlbeam(&ClnlbeamConfig { n: 0 }).is_err());
    }

    #[test]
    fn cont5_1_nnz_formula_matches_structure() {
        for n in [3, 5, 8] {
            let m = cont5_1(&Cont51Config { n }).unwrap();
            let plan = compile_jacobian(&m);
            assert_eq!(plan.nnz(), 6 * n * (n - 1) + 3 * n + 4 * n, "n={n}");
            assert_eq!(plan.num_rows(), n * (n + 1));
        }
    }

    #[test]
    fn generators_are_pure_functions_of_config() {
        let a = clnlbeam(&ClnlbeamConfig { n: 6 }).unwrap();
        let b = clnlbeam(&ClnlbeamConfig { n: 6 }).unwrap();
        assert_eq!(a.num_constraints(), b.num_constraints());
        for (ca, cb) in a.constraints().iter().zip(b.constraints()) {
            assert_eq!(ca.expr, cb.expr);
        }
    }
}
