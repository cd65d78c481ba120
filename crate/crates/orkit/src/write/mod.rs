//! Deterministic LP and MPS emission plus the replay LP reader.
//!
//! Identical frozen models produce byte-identical files. The LP writer
//! iterates the naturally row-wise data directly; the MPS writer goes through
//! the column form. Neither reorders rows or columns.
//!
//! The dialects are fixed as follows.
//!
//! LP:
//! ```text
//! Maximize            (or Minimize)
//!  obj: 1 x1 + 2 x2   (explicit coefficient before every variable; a
//!                      trailing bare number is the objective constant)
//! Subject To
//!  c1: 1 x1 <= 1      (rows in insertion order, duplicates merged in
//!                      first-occurrence order, rhs = -constant)
//! Bounds
//!  0 <= x1 <= 1       (every non-default bound; "x free" for free
//!                      variables, "x = v" for fixed ones)
//! End
//! ```
//!
//! MPS (free format): sections NAME, ROWS, COLUMNS, RHS, BOUNDS, ENDATA.
//! One (row, value) pair per COLUMNS line, columns in issue order, entries
//! within a column in row order with the objective first. The RHS vector is
//! named `RHS`, the bound set `BND`; a nonzero objective constant is emitted
//! negated as an RHS entry on the objective row. There is no RANGES section.
//!
//! Numbers are rendered as the shortest string that parses back to the same
//! double, choosing between fixed and scientific notation by length (fixed
//! wins ties); integral values carry no decimal point.

mod lp;
mod mps;
mod number;
mod read_lp;

pub use lp::write_lp;
pub use mps::write_mps;
pub use number::format_f64;
pub use read_lp::{read_lp, LpParseError};

use std::io::{self, Write};

/// Write adapter that counts bytes as they pass through.
struct CountingWriter<W: Write> {
    inner: W,
    written: usize,
}

impl<W: Write> CountingWriter<W> {
    fn new(inner: W) -> Self {
        CountingWriter { inner, written: 0 }
    }

    fn written(&self) -> usize {
        self.written
    }
}

impl<W: Write> Write for CountingWriter<W> {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.written += n;
        Ok(n)
    }

    fn flush(&mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

#[cfg(test)]
mod tests;
