use std::io::{self, Write};

use super::number::format_f64;
use super::CountingWriter;
use crate::model::{Model, RowSense};

/// Emits the model in free-format MPS. Returns the number of bytes written.
/// Goes through the column form: duplicates merged, one (row, value) pair per
/// COLUMNS line, columns in issue order, rows in insertion order.
pub fn write_mps<W: Write>(model: &Model, sink: W) -> io::Result<usize> {
    let cf = model.to_column_form();
    let mut w = CountingWriter::new(sink);

    writeln!(w, "NAME orkit")?;

    writeln!(w, "ROWS")?;
    writeln!(w, " N  obj")?;
    for (i, sense) in cf.row_senses.iter().enumerate() {
        let tag = match sense {
            RowSense::Le => 'L',
            RowSense::Eq => 'E',
            RowSense::Ge => 'G',
        };
        writeln!(w, " {tag}  c{}", i + 1)?;
    }

    writeln!(w, "COLUMNS")?;
    for j in 0..cf.matrix.ncols() {
        let name = model.variable_name(j as u32 + 1);
        if cf.objective[j] != 0.0 {
            writeln!(w, "    {name}  obj  {}", format_f64(cf.objective[j]))?;
        }
        let (rows, vals) = cf.matrix.col(j);
        for (&i, &v) in rows.iter().zip(vals) {
            writeln!(w, "    {name}  c{}  {}", i + 1, format_f64(v))?;
        }
    }

    writeln!(w, "RHS")?;
    if cf.objective_constant != 0.0 {
        writeln!(w, "    RHS  obj  {}", format_f64(-cf.objective_constant))?;
    }
    for (i, &rhs) in cf.rhs.iter().enumerate() {
        if rhs != 0.0 {
            writeln!(w, "    RHS  c{}  {}", i + 1, format_f64(rhs))?;
        }
    }

    writeln!(w, "BOUNDS")?;
    for j in 0..cf.matrix.ncols() {
        let name = model.variable_name(j as u32 + 1);
        let (lb, ub) = (cf.lower[j], cf.upper[j]);
        if lb == 0.0 && ub == f64::INFINITY {
            continue; // default
        }
        if lb == f64::NEG_INFINITY && ub == f64::INFINITY {
            writeln!(w, " FR BND {name}")?;
        } else if lb == ub {
            writeln!(w, " FX BND {name} {}", format_f64(lb))?;
        } else {
            if lb == f64::NEG_INFINITY {
                writeln!(w, " MI BND {name}")?;
            } else if lb != 0.0 {
                writeln!(w, " LO BND {name} {}", format_f64(lb))?;
            }
            if ub != f64::INFINITY {
                writeln!(w, " UP BND {name} {}", format_f64(ub))?;
            }
        }
    }

    writeln!(w, "ENDATA")?;
    w.flush()?;
    Ok(w.written())
}
