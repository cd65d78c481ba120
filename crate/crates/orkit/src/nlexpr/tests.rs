use super::*;
use crate::model::RowSense;

/// Central finite difference of `f` in coordinate `col` (one-based).
fn fd(expr: &Expr, x: &[f64], col: u32, h: f64) -> f64 {
    let mut hi = x.to_vec();
    let mut lo = x.to_vec();
    hi[(col - 1) as usize] += h;
    lo[(col - 1) as usize] -= h;
    (expr.eval(&hi).unwrap() - expr.eval(&lo).unwrap()) / (2.0 * h)
}

#[test]
fn rational_is_reduced() {
    assert_eq!(Rational::new(6, 4), Rational::new(3, 2));
    assert_eq!(Rational::new(3, 2).minus_one(), Rational::new(1, 2));
    assert_eq!(Rational::new(2, -4), Rational::new(-1, 2));
    assert!(Rational::integer(2).is_integer());
}

#[test]
fn derivative_of_sin_is_cos() {
    let d = differentiate(&Expr::sin(Expr::variable(1)), 1);
    assert_eq!(d, Expr::cos(Expr::variable(1)));
}

#[test]
fn derivative_wrt_absent_variable_is_zero() {
    let d = differentiate(&Expr::sin(Expr::variable(1)), 2);
    assert_eq!(d, Expr::Constant(0.0));
}

/// Family-1 row of the beam model at h = 0.1, columns t_i=1, t_{i+1}=2,
/// x_i=3, x_{i+1}=4: x_{i+1} - x_i - 0.05 (sin t_{i+1} + sin t_i).
fn beam_row() -> Expr {
    Expr::sum(vec![
        Expr::variable(4),
        Expr::negate(Expr::variable(3)),
        Expr::negate(Expr::product(vec![
            Expr::constant(0.05),
            Expr::sum(vec![
                Expr::sin(Expr::variable(2)),
                Expr::sin(Expr::variable(1)),
            ]),
        ])),
    ])
}

#[test]
fn beam_row_partial_matches_closed_form_and_fd() {
    let row = beam_row();
    let d = differentiate(&row, 1);
    assert_eq!(
        d,
        Expr::negate(Expr::product(vec![
            Expr::constant(0.05),
            Expr::cos(Expr::variable(1)),
        ]))
    );
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let analytic = d.eval(&x).unwrap();
        assert!((analytic - (-0.05 * x[0].cos())).abs() < 1e-15);
        assert!((analytic - fd(&row, &x, 1, 1e-6)).abs() <= 1e-6 * (1.0 + analytic.abs()));
    }
}

#[test]
fn power_chain_rule_matches_y_to_the_fourth() {
    // y * (y^2)^(3/2) equals y^4 for y >= 0; its derivative at y=2 is 32.
    let expr = Expr::product(vec![
        Expr::variable(1),
        Expr::power(Expr::power(Expr::variable(1), 2, 1), 3, 2),
    ]);
    let d = differentiate(&expr, 1);
    let at2 = d.eval(&[2.0]).unwrap();
    assert!((at2 - 32.0).abs() < 1e-12);
    let numeric = fd(&expr, &[2.0], 1, 1e-7);
    assert!((at2 - numeric).abs() <= 1e-6 * (1.0 + at2.abs()));
}

#[test]
fn canonical_keys_rename_variables() {
    let a = canonical_key(&Expr::sin(Expr::variable(1)));
    let b = canonical_key(&Expr::sin(Expr::variable(2)));
    assert_eq!(a, b);
    let c = canonical_key(&Expr::cos(Expr::variable(1)));
    assert_ne!(a, c);
}

#[test]
fn canonical_keys_track_repeated_slots() {
    // x1 - x1 and x1 - x2 differ even though both are two-term sums.
    let same = Expr::minus(Expr::variable(1), Expr::variable(1));
    let diff = Expr::minus(Expr::variable(1), Expr::variable(2));
    assert_ne!(canonical_key(&same), canonical_key(&diff));
    // x1 - x2 and x3 - x4 coincide under slot renaming.
    let other = Expr::minus(Expr::variable(3), Expr::variable(4));
    assert_eq!(canonical_key(&diff), canonical_key(&other));
}

#[test]
fn canonical_keys_compare_constants_bitwise() {
    let a = canonical_key(&Expr::product(vec![Expr::constant(1.0), Expr::variable(1)]));
    let b = canonical_key(&Expr::product(vec![
        Expr::constant(1.0 + f64::EPSILON),
        Expr::variable(1),
    ]));
    assert_ne!(a, b);
}

#[test]
fn eval_handles_trig_and_rational_powers() {
    let x = std::f64::consts::FRAC_PI_2;
    assert!((Expr::sin(Expr::variable(1)).eval(&[x]).unwrap() - 1.0).abs() < 1e-15);
    // (y^2)^(3/2) at y = -2: the square comes first, no domain error.
    let e = Expr::power(Expr::power(Expr::variable(1), 2, 1), 3, 2);
    assert_eq!(e.eval(&[-2.0]).unwrap(), 8.0);
    // A bare fractional power of a negative base is a domain error.
    let bad = Expr::power(Expr::variable(1), 1, 2);
    assert_eq!(
        bad.eval(&[-1.0]),
        Err(EvalError::NegativeBase { base: -1.0 })
    );
}

#[test]
fn dimension_mismatch_is_reported() {
    let mut m = NonlinearModel::new();
    let v = m.add_variable(-1.0, 1.0).unwrap();
    m.add_constraint(Expr::sin(Expr::variable(v)), RowSense::Eq)
        .unwrap();
    assert!(matches!(
        evaluate_constraints(&m, &[0.0, 0.0]),
        Err(EvalError::DimensionMismatch { expected: 1, got: 2 })
    ));
    let plan = compile_jacobian(&m);
    assert!(matches!(
        plan.evaluate(&[0.0, 0.0]),
        Err(EvalError::DimensionMismatch { .. })
    ));
}

#[test]
fn stale_columns_are_rejected() {
    let mut m = NonlinearModel::new();
    let _ = m.add_variable(0.0, 1.0).unwrap();
    let err = m
        .add_constraint(Expr::sin(Expr::variable(5)), RowSense::Eq)
        .unwrap_err();
    assert_eq!(
        err,
        crate::model::ModelError::StaleColumn {
            column: 5,
            issued: 1
        }
    );
}

#[test]
fn repeated_variable_merges_into_one_entry() {
    let mut m = NonlinearModel::new();
    let v = m.add_variable(-1.0, 1.0).unwrap();
    let expr = Expr::sum(vec![
        Expr::sin(Expr::variable(v)),
        Expr::sin(Expr::variable(v)),
    ]);
    m.add_constraint(expr, RowSense::Eq).unwrap();
    let plan = compile_jacobian(&m);
    assert_eq!(plan.nnz(), 1);
    assert_eq!(plan.row_columns(0), &[1]);
    let vals = plan.evaluate(&[0.3]).unwrap();
    assert!((vals[0] - 2.0 * 0.3f64.cos()).abs() < 1e-15);
}

#[test]
fn equivalent_rows_share_tapes() {
    let mut m = NonlinearModel::new();
    let vars: Vec<u32> = (0..6).map(|_| m.add_variable(-1.0, 1.0).unwrap()).collect();
    for w in vars.chunks(2) {
        let expr = Expr::minus(Expr::sin(Expr::variable(w[0])), Expr::variable(w[1]));
        m.add_constraint(expr, RowSense::Eq).unwrap();
    }
    let plan = compile_jacobian(&m);
    assert_eq!(plan.class_count(), 1);
    assert_eq!(plan.diff_invocations(), 2);
    assert_eq!(plan.num_rows(), 3);
    assert_eq!(plan.nnz(), 6);
}

#[test]
fn structure_lists_distinct_variables_per_row() {
    let mut m = NonlinearModel::new();
    let a = m.add_variable(-1.0, 1.0).unwrap();
    let b = m.add_variable(-1.0, 1.0).unwrap();
    let expr = Expr::product(vec![
        Expr::variable(b),
        Expr::sin(Expr::variable(a)),
        Expr::variable(b),
    ]);
    m.add_constraint(expr, RowSense::Eq).unwrap();
    let plan = compile_jacobian(&m);
    // First occurrence order: b before a.
    assert_eq!(plan.row_columns(0), &[b, a]);
}

#[test]
fn plan_evaluation_matches_finite_differences() {
    use rand::{Rng, SeedableRng};
    let mut m = NonlinearModel::new();
    let vars: Vec<u32> = (0..4).map(|_| m.add_variable(-1.0, 1.0).unwrap()).collect();
    // Two classes: a trig row and a polynomial row.
    m.add_constraint(
        Expr::minus(
            Expr::sin(Expr::variable(vars[0])),
            Expr::product(vec![Expr::constant(2.0), Expr::variable(vars[1])]),
        ),
        RowSense::Eq,
    )
    .unwrap();
    m.add_constraint(
        Expr::sum(vec![
            Expr::power(Expr::variable(vars[2]), 3, 1),
            Expr::product(vec![Expr::variable(vars[2]), Expr::variable(vars[3])]),
        ]),
        RowSense::Eq,
    )
    .unwrap();
    let plan = compile_jacobian(&m);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let x: Vec<f64> = (0..4).map(|_| rng.random_range(-1.0..1.0)).collect();
        let vals = plan.evaluate(&x).unwrap();
        for (i, c) in m.constraints().iter().enumerate() {
            for (k, &col) in plan.row_columns(i).iter().enumerate() {
                let numeric = fd(&c.expr, &x, col, 1e-7);
                let analytic = vals[plan.row_ptr()[i] + k];
                assert!(
                    (analytic - numeric).abs() <= 1e-6 * (1.0 + analytic.abs()),
                    "row {i} col {col}: {analytic} vs {numeric}"
                );
            }
        }
    }
}

#[test]
fn evaluation_is_pure() {
    let mut m = NonlinearModel::new();
    let v = m.add_variable(-1.0, 1.0).unwrap();
    m.add_constraint(Expr::sin(Expr::variable(v)), RowSense::Eq)
        .unwrap();
    let plan = compile_jacobian(&m);
    let a = plan.evaluate(&[0.7]).unwrap();
    let b = plan.evaluate(&[0.7]).unwrap();
    let bits_a: Vec<u64> = a.iter().map(|v| v.to_bits()).collect();
    let bits_b: Vec<u64> = b.iter().map(|v| v.to_bits()).collect();
    assert_eq!(bits_a, bits_b);
}

#[cfg(feature = "parallel")]
#[test]
fn parallel_and_sequential_paths_agree_bitwise() {
    use rand::{Rng, SeedableRng};
    let mut m = NonlinearModel::new();
    let vars: Vec<u32> = (0..20).map(|_| m.add_variable(-1.0, 1.0).unwrap()).collect();
    for w in vars.windows(2) {
        m.add_constraint(
            Expr::minus(Expr::sin(Expr::variable(w[0])), Expr::variable(w[1])),
            RowSense::Eq,
        )
        .unwrap();
    }
    let plan = compile_jacobian(&m);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
    let x: Vec<f64> = (0..20).map(|_| rng.random_range(-1.0..1.0)).collect();
    let seq = plan.evaluate_sequential(&x).unwrap();
    let par = plan.evaluate_parallel(&x).unwrap();
    assert_eq!(
        seq.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        par.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
}
