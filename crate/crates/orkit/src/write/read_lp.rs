use std::collections::HashMap;
use std::io::BufRead;

use thiserror::Error;

use crate::model::{AffineExpression, Model, ObjSense, RowSense, VariableRef};

/// Replay reader for files produced by [`super::write_lp`]. Used to check
/// round trips; it is not a general LP parser.
#[derive(Debug, Error)]
pub enum LpParseError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn malformed(line: usize, message: impl Into<String>) -> LpParseError {
    LpParseError::Malformed {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct Variables {
    columns: HashMap<String, u32>,
    names: Vec<String>,
}

impl Variables {
    fn column(&mut self, name: &str) -> u32 {
        if let Some(&c) = self.columns.get(name) {
            return c;
        }
        let c = self.names.len() as u32 + 1;
        self.columns.insert(name.to_owned(), c);
        self.names.push(name.to_owned());
        c
    }
}

/// Reconstructs an equivalent merged model from LP text. Variables get their
/// columns in first-appearance order (objective, then rows, then bounds);
/// unlisted bounds default to `[0, +inf)`.
pub fn read_lp<R: BufRead>(reader: R) -> Result<Model, LpParseError> {
    let lines: Vec<String> = reader.lines().collect::<Result<_, _>>()?;
    let mut cursor = 0usize;

    let next = |cursor: &mut usize| -> Option<(usize, &str)> {
        let i = *cursor;
        if i < lines.len() {
            *cursor += 1;
            Some((i + 1, lines[i].as_str()))
        } else {
            None
        }
    };

    let (lineno, header) = next(&mut cursor).ok_or_else(|| malformed(1, "empty file"))?;
    let sense = match header.trim() {
        "Maximize" => ObjSense::Maximize,
        "Minimize" => ObjSense::Minimize,
        other => return Err(malformed(lineno, format!("expected sense line, got {other:?}"))),
    };

    let mut vars = Variables::default();

    let (lineno, obj_line) = next(&mut cursor).ok_or_else(|| malformed(2, "missing objective"))?;
    let obj_tokens: Vec<&str> = obj_line.split_whitespace().collect();
    if obj_tokens.first() != Some(&"obj:") {
        return Err(malformed(lineno, "expected objective line starting with 'obj:'"));
    }
    let (obj_terms, obj_constant) = parse_terms(&obj_tokens[1..], lineno, &mut vars)?;

    match next(&mut cursor) {
        Some((_, l)) if l.trim() == "Subject To" => {}
        Some((ln, other)) => {
            return Err(malformed(ln, format!("expected 'Subject To', got {other:?}")))
        }
        None => return Err(malformed(lines.len() + 1, "missing 'Subject To'")),
    }

    // (terms, sense, constant) per row
    let mut rows: Vec<(Vec<(f64, u32)>, RowSense, f64)> = Vec::new();
    loop {
        let (lineno, line) = next(&mut cursor)
            .ok_or_else(|| malformed(lines.len() + 1, "missing 'Bounds'"))?;
        if line.trim() == "Bounds" {
            break;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() || !tokens[0].ends_with(':') {
            return Err(malformed(lineno, "expected constraint label"));
        }
        let rel_pos = tokens
            .iter()
            .position(|t| matches!(*t, "<=" | "=" | ">="))
            .ok_or_else(|| malformed(lineno, "missing relational operator"))?;
        if rel_pos + 2 != tokens.len() {
            return Err(malformed(lineno, "expected single right-hand side value"));
        }
        let sense = match tokens[rel_pos] {
            "<=" => RowSense::Le,
            "=" => RowSense::Eq,
            _ => RowSense::Ge,
        };
        let rhs: f64 = tokens[rel_pos + 1]
            .parse()
            .map_err(|_| malformed(lineno, "right-hand side is not a number"))?;
        let (terms, lhs_constant) = parse_terms(&tokens[1..rel_pos], lineno, &mut vars)?;
        rows.push((terms, sense, lhs_constant - rhs));
    }

    // name -> (lb, ub)
    let mut bounds: HashMap<u32, (f64, f64)> = HashMap::new();
    loop {
        let (lineno, line) = next(&mut cursor)
            .ok_or_else(|| malformed(lines.len() + 1, "missing 'End'"))?;
        if line.trim() == "End" {
            break;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let spec = match tokens.as_slice() {
            [name, "free"] => (vars.column(name), (f64::NEG_INFINITY, f64::INFINITY)),
            [name, "=", v] => {
                let v: f64 = v.parse().map_err(|_| malformed(lineno, "bad fixed bound"))?;
                (vars.column(name), (v, v))
            }
            [lb, "<=", name, "<=", ub] => {
                let lb: f64 = lb.parse().map_err(|_| malformed(lineno, "bad lower bound"))?;
                let ub: f64 = ub.parse().map_err(|_| malformed(lineno, "bad upper bound"))?;
                (vars.column(name), (lb, ub))
            }
            _ => return Err(malformed(lineno, "unrecognized bound line")),
        };
        bounds.insert(spec.0, spec.1);
    }

    let mut model = Model::new(sense);
    let mut refs: Vec<VariableRef> = Vec::with_capacity(vars.names.len());
    for (k, name) in vars.names.iter().enumerate() {
        let (lb, ub) = bounds
            .get(&(k as u32 + 1))
            .copied()
            .unwrap_or((0.0, f64::INFINITY));
        let v = model
            .add_variable_named(lb, ub, name)
            .expect("writer emits ordered bounds");
        refs.push(v);
    }

    let mut objective = AffineExpression::with_capacity(obj_terms.len());
    for (coeff, col) in obj_terms {
        objective.add_term(coeff, refs[(col - 1) as usize]);
    }
    objective.add_constant(obj_constant);
    model.set_objective(objective).expect("columns are dense");

    for (terms, sense, constant) in rows {
        let mut expr = AffineExpression::with_capacity(terms.len());
        for (coeff, col) in terms {
            expr.add_term(coeff, refs[(col - 1) as usize]);
        }
        expr.add_constant(constant);
        model.add_constraint(expr, sense).expect("columns are dense");
    }

    Ok(model)
}

/// Parses `<num> <name>` pairs joined by `+`; a bare trailing number is a
/// constant. Returns terms as (coefficient, column) plus the constant.
fn parse_terms(
    tokens: &[&str],
    lineno: usize,
    vars: &mut Variables,
) -> Result<(Vec<(f64, u32)>, f64), LpParseError> {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    let mut i = 0;
    while i < tokens.len() {
        if tokens[i] == "+" {
            i += 1;
            continue;
        }
        let coeff: f64 = tokens[i]
            .parse()
            .map_err(|_| malformed(lineno, format!("expected coefficient, got {:?}", tokens[i])))?;
        let takes_name = i + 1 < tokens.len() && tokens[i + 1] != "+" && tokens[i + 1].parse::<f64>().is_err();
        if takes_name {
            terms.push((coeff, vars.column(tokens[i + 1])));
            i += 2;
        } else {
            constant += coeff;
            i += 1;
        }
    }
    Ok((terms, constant))
}
