use crate::model::{AffineExpression, ColumnForm, Model, ObjSense, RowSense};
use crate::write::{read_lp, write_lp, write_mps, LpParseError};

fn one_var_model() -> Model {
    let mut m = Model::new(ObjSense::Maximize);
    let x = m.add_variable(0.0, 1.0).unwrap();
    let mut obj = AffineExpression::new();
    obj.add_term(1.0, x);
    m.set_objective(obj).unwrap();
    let mut row = AffineExpression::new();
    row.add_term(1.0, x);
    row.add_constant(-1.0);
    m.add_constraint(row, RowSense::Le).unwrap();
    m
}

fn lp_string(m: &Model) -> String {
    let mut buf = Vec::new();
    write_lp(m, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

fn mps_string(m: &Model) -> String {
    let mut buf = Vec::new();
    write_mps(m, &mut buf).unwrap();
    String::from_utf8(buf).unwrap()
}

pub(crate) fn assert_column_forms_close(a: &ColumnForm, b: &ColumnForm, tol: f64) {
    let (da, db) = (a.matrix.to_dense(), b.matrix.to_dense());
    assert_eq!(da.len(), db.len(), "row count");
    assert_eq!(a.matrix.ncols(), b.matrix.ncols(), "column count");
    for (ra, rb) in da.iter().zip(&db) {
        for (x, y) in ra.iter().zip(rb) {
            assert!((x - y).abs() <= tol, "matrix entry {x} vs {y}");
        }
    }
    assert_eq!(a.row_senses, b.row_senses);
    for (x, y) in a.rhs.iter().zip(&b.rhs) {
        assert!((x - y).abs() <= tol, "rhs {x} vs {y}");
    }
    for (x, y) in a.objective.iter().zip(&b.objective) {
        assert!((x - y).abs() <= tol, "objective {x} vs {y}");
    }
    assert!((a.objective_constant - b.objective_constant).abs() <= tol);
    assert_eq!(a.lower, b.lower);
    assert_eq!(a.upper, b.upper);
}

#[test]
fn lp_golden_one_variable() {
    assert_eq!(
        lp_string(&one_var_model()),
        "Maximize\n obj: 1 x1\nSubject To\n c1: 1 x1 <= 1\nBounds\n 0 <= x1 <= 1\nEnd\n"
    );
}

#[test]
fn lp_golden_empty_model() {
    let m = Model::new(ObjSense::Minimize);
    assert_eq!(lp_string(&m), "Minimize\n obj:\nSubject To\nBounds\nEnd\n");
}

#[test]
fn mps_golden_one_variable() {
    let text = mps_string(&one_var_model());
    assert_eq!(
        text,
        "NAME orkit\n\
         ROWS\n N  obj\n L  c1\n\
         COLUMNS\n    x1  obj  1\n    x1  c1  1\n\
         RHS\n    RHS  c1  1\n\
         BOUNDS\n UP BND x1 1\n\
         ENDATA\n"
    );
    assert!(text.contains("ROWS\n N  obj\n L  c1\n"));
}

#[test]
fn mps_free_and_fixed_bounds() {
    let mut m = Model::new(ObjSense::Minimize);
    let _free = m.add_variable(f64::NEG_INFINITY, f64::INFINITY).unwrap();
    let _fixed = m.add_variable(3.0, 3.0).unwrap();
    let text = mps_string(&m);
    assert!(text.contains("FR BND x1"));
    assert!(text.contains("FX BND x2 3"));
}

#[test]
fn mps_two_sided_and_negative_bounds() {
    let mut m = Model::new(ObjSense::Minimize);
    let _ = m.add_variable(-2.0, 5.0).unwrap();
    let _ = m.add_variable(f64::NEG_INFINITY, 1.0).unwrap();
    let _ = m.add_variable(4.0, f64::INFINITY).unwrap();
    let text = mps_string(&m);
    assert!(text.contains(" LO BND x1 -2\n UP BND x1 5\n"));
    assert!(text.contains(" MI BND x2\n UP BND x2 1\n"));
    assert!(text.contains(" LO BND x3 4\n"));
}

#[test]
fn objective_constant_is_emitted_in_both_formats() {
    let mut m = Model::new(ObjSense::Minimize);
    let x = m.add_variable(0.0, 2.0).unwrap();
    let mut obj = AffineExpression::new();
    obj.add_term(2.0, x);
    obj.add_constant(7.0);
    m.set_objective(obj).unwrap();
    assert_eq!(
        lp_string(&m),
        "Minimize\n obj: 2 x1 + 7\nSubject To\nBounds\n 0 <= x1 <= 2\nEnd\n"
    );
    // Negated on the objective row of the RHS section.
    assert!(mps_string(&m).contains("    RHS  obj  -7\n"));
}

#[test]
fn byte_count_matches_output_length() {
    let m = one_var_model();
    let mut lp = Vec::new();
    assert_eq!(write_lp(&m, &mut lp).unwrap(), lp.len());
    let mut mps = Vec::new();
    assert_eq!(write_mps(&m, &mut mps).unwrap(), mps.len());
}

#[test]
fn writers_are_deterministic() {
    let m = one_var_model();
    assert_eq!(lp_string(&m), lp_string(&m));
    assert_eq!(mps_string(&m), mps_string(&m));
}

#[test]
fn duplicate_terms_merge_at_write_time() {
    let mut m = Model::new(ObjSense::Minimize);
    let x = m.add_variable(0.0, 1.0).unwrap();
    let mut e = AffineExpression::new();
    e.add_term(1.0, x);
    e.add_term(4.0, x);
    m.add_constraint(e, RowSense::Eq).unwrap();
    assert!(lp_string(&m).contains(" c1: 5 x1 = 0\n"));
}

#[test]
fn read_lp_parses_single_term() {
    let text = "Minimize\n obj:\nSubject To\n c1: 1 x1 <= 1\nBounds\nEnd\n";
    let m = read_lp(text.as_bytes()).unwrap();
    assert_eq!(m.num_variables(), 1);
    assert_eq!(m.variable_name(1), "x1");
    let row = &m.rows()[0];
    assert_eq!(row.expr.vars(), &[1]);
    assert_eq!(row.expr.coeffs(), &[1.0]);
    assert_eq!(row.expr.constant(), -1.0);
}

#[test]
fn read_lp_rejects_garbage_header() {
    let err = read_lp("garbage\n".as_bytes()).unwrap_err();
    match err {
        LpParseError::Malformed { line, .. } => assert_eq!(line, 1),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn read_lp_reports_bad_constraint_line() {
    let text = "Minimize\n obj:\nSubject To\n c1: nonsense\nBounds\nEnd\n";
    match read_lp(text.as_bytes()).unwrap_err() {
        LpParseError::Malformed { line, .. } => assert_eq!(line, 4),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn knapsack_round_trip_preserves_column_form() {
    let mut m = Model::new(ObjSense::Maximize);
    let profit = [1.0, 2.0];
    let weight = [2.0, 3.0];
    let x: Vec<_> = (0..2).map(|_| m.add_variable(0.0, 1.0).unwrap()).collect();
    let mut obj = AffineExpression::new();
    for j in 0..2 {
        obj.add_term(profit[j], x[j]);
    }
    m.set_objective(obj).unwrap();
    let mut row = AffineExpression::new();
    for j in 0..2 {
        row.add_term(weight[j], x[j]);
    }
    row.add_constant(-5.0);
    m.add_constraint(row, RowSense::Le).unwrap();

    let text = lp_string(&m);
    let back = read_lp(text.as_bytes()).unwrap();
    assert_column_forms_close(&m.to_column_form(), &back.to_column_form(), 1e-12);
    // A second write is byte-identical.
    assert_eq!(lp_string(&back), text);
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn arb_model() -> impl Strategy<Value = Model> {
        // Variables always get finite non-default bounds so every column
        // appears in the Bounds section and survives the round trip.
        (1usize..8, 0usize..6).prop_flat_map(|(nv, nr)| {
            let coeffs = proptest::collection::vec((0usize..nv, -8i32..8), 0..(nr * 4 + 1));
            let consts = proptest::collection::vec(-5i32..5, nr);
            let obj = proptest::collection::vec((0usize..nv, -8i32..8), 0..4);
            (Just(nv), Just(nr), coeffs, consts, obj).prop_map(
                |(nv, nr, coeffs, consts, obj)| {
                    let mut m = Model::new(ObjSense::Minimize);
                    let vars: Vec<_> = (0..nv)
                        .map(|k| m.add_variable(-(k as f64) - 1.0, k as f64 + 1.0).unwrap())
                        .collect();
                    let mut rows: Vec<AffineExpression> =
                        (0..nr).map(|_| AffineExpression::new()).collect();
                    for (slot, (v, c)) in coeffs.iter().enumerate() {
                        if nr > 0 {
                            rows[slot % nr].add_term(*c as f64 * 0.5, vars[*v]);
                        }
                    }
                    for (i, e) in rows.into_iter().enumerate() {
                        let mut e = e;
                        e.add_constant(consts[i] as f64);
                        let sense = match consts[i].rem_euclid(3) {
                            0 => RowSense::Le,
                            1 => RowSense::Eq,
                            _ => RowSense::Ge,
                        };
                        m.add_constraint(e, sense).unwrap();
                    }
                    let mut o = AffineExpression::new();
                    for (v, c) in obj {
                        o.add_term(c as f64, vars[v]);
                    }
                    m.set_objective(o).unwrap();
                    m
                },
            )
        })
    }

    /// Per-row coefficient maps keyed by variable name, plus bounds and
    /// objective by name. Lets models be compared independently of column
    /// numbering, which the reader assigns by first appearance.
    fn by_name(m: &Model) -> (Vec<std::collections::HashMap<String, f64>>, Vec<f64>, std::collections::HashMap<String, (f64, f64, f64)>) {
        let rows = m
            .rows()
            .iter()
            .map(|r| {
                r.expr
                    .merged_terms()
                    .into_iter()
                    .map(|(c, v)| (m.variable_name(c), v))
                    .collect()
            })
            .collect();
        let rhs = m.rows().iter().map(|r| -r.expr.constant()).collect();
        let mut vars = std::collections::HashMap::new();
        let obj: std::collections::HashMap<u32, f64> =
            m.objective().merged_terms().into_iter().collect();
        for c in 1..=m.num_variables() as u32 {
            let (lb, ub) = m.bounds(c);
            vars.insert(
                m.variable_name(c),
                (lb, ub, obj.get(&c).copied().unwrap_or(0.0)),
            );
        }
        (rows, rhs, vars)
    }

    proptest! {
        #[test]
        fn lp_round_trip_is_stable(m in arb_model()) {
            let text = lp_string(&m);
            let back = read_lp(text.as_bytes()).unwrap();

            let (rows_a, rhs_a, vars_a) = by_name(&m);
            let (rows_b, rhs_b, vars_b) = by_name(&back);
            prop_assert_eq!(rows_a.len(), rows_b.len());
            for (ra, rb) in rows_a.iter().zip(&rows_b) {
                for (name, va) in ra {
                    let vb = rb.get(name).copied().unwrap_or(0.0);
                    prop_assert!((va - vb).abs() <= 1e-12);
                }
                for (name, vb) in rb {
                    let va = ra.get(name).copied().unwrap_or(0.0);
                    prop_assert!((va - vb).abs() <= 1e-12);
                }
            }
            for (a, b) in rhs_a.iter().zip(&rhs_b) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
            for (name, a) in &vars_b {
                // every reconstructed variable matches the original
                let b = vars_a.get(name).expect("unknown variable resurrected");
                prop_assert_eq!(a, b);
            }

            // One read reaches a fixpoint: further round trips are
            // byte-identical.
            let text2 = lp_string(&back);
            let again = read_lp(text2.as_bytes()).unwrap();
            prop_assert_eq!(lp_string(&again), text2);
        }
    }
}
