use std::io::{self, Write};

use super::number::format_f64;
use super::CountingWriter;
use crate::model::{Model, ObjSense, RowSense};

/// Emits the model in the fixed LP dialect. Returns the number of bytes
/// written. Rows are emitted in insertion order straight from the row-wise
/// data; duplicate terms are merged in first-occurrence order.
pub fn write_lp<W: Write>(model: &Model, sink: W) -> io::Result<usize> {
    let mut w = CountingWriter::new(sink);

    match model.sense() {
        ObjSense::Maximize => writeln!(w, "Maximize")?,
        ObjSense::Minimize => writeln!(w, "Minimize")?,
    }

    write!(w, " obj:")?;
    write_terms(&mut w, model, model.objective().merged_terms(), model.objective().constant())?;
    writeln!(w)?;

    writeln!(w, "Subject To")?;
    for (i, row) in model.rows().iter().enumerate() {
        write!(w, " c{}:", i + 1)?;
        write_terms(&mut w, model, row.expr.merged_terms(), 0.0)?;
        let rel = match row.sense {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        };
        writeln!(w, " {} {}", rel, format_f64(-row.expr.constant()))?;
    }

    writeln!(w, "Bounds")?;
    for column in 1..=model.num_variables() as u32 {
        let (lb, ub) = model.bounds(column);
        if lb == 0.0 && ub == f64::INFINITY {
            continue; // default
        }
        let name = model.variable_name(column);
        if lb == f64::NEG_INFINITY && ub == f64::INFINITY {
            writeln!(w, " {name} free")?;
        } else if lb == ub {
            writeln!(w, " {name} = {}", format_f64(lb))?;
        } else {
            writeln!(w, " {} <= {name} <= {}", render_bound(lb), render_bound(ub))?;
        }
    }

    writeln!(w, "End")?;
    w.flush()?;
    Ok(w.written())
}

fn render_bound(b: f64) -> String {
    if b == f64::NEG_INFINITY {
        "-inf".to_owned()
    } else if b == f64::INFINITY {
        "+inf".to_owned()
    } else {
        format_f64(b)
    }
}

fn write_terms<W: Write>(
    w: &mut W,
    model: &Model,
    terms: Vec<(u32, f64)>,
    constant: f64,
) -> io::Result<()> {
    let mut first = true;
    for (column, coeff) in terms {
        let sep = if first { " " } else { " + " };
        write!(w, "{sep}{} {}", format_f64(coeff), model.variable_name(column))?;
        first = false;
    }
    if constant != 0.0 {
        let sep = if first { " " } else { " + " };
        write!(w, "{sep}{}", format_f64(constant))?;
    }
    Ok(())
}
