//! Rectangular report model with deterministic CSV and JSON writers.
//!
//! Floats are printed as `{:.16e}` — 17 significant digits, enough to
//! round-trip any f64 exactly — so two runs with the same inputs produce
//! byte-identical files. An undefined value (empty growth cone) is the
//! string `NaN` in CSV and `null` in JSON, keeping both schemas rectangular.

use std::io::{self, Write};

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    I(i64),
    S(&'static str),
}

#[derive(Debug)]
pub struct Report {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

fn float_token(x: f64) -> String {
    // {:.16e} renders NaN/inf without digits; those cases are handled by the
    // per-format writers instead.
    format!("{x:.16e}")
}

impl Report {
    pub fn write_csv<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            let fields: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Cell::F(x) if x.is_nan() => "NaN".to_string(),
                    Cell::F(x) => float_token(*x),
                    Cell::I(n) => n.to_string(),
                    Cell::S(s) => (*s).to_string(),
                })
                .collect();
            writeln!(w, "{}", fields.join(","))?;
        }
        Ok(())
    }

    /// An array of flat objects, one per row, keys in column order. Written
    /// by hand because the fixed-width float format above is part of the
    /// output contract and no serializer emits custom number tokens.
    pub fn write_json<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "[")?;
        for (i, row) in self.rows.iter().enumerate() {
            debug_assert_eq!(row.len(), self.columns.len());
            let fields: Vec<String> = self
                .columns
                .iter()
                .zip(row)
                .map(|(name, cell)| {
                    let value = match cell {
                        Cell::F(x) if !x.is_finite() => "null".to_string(),
                        Cell::F(x) => float_token(*x),
                        Cell::I(n) => n.to_string(),
                        Cell::S(s) => format!("\"{s}\""),
                    };
                    format!("\"{name}\": {value}")
                })
                .collect();
            let comma = if i + 1 < self.rows.len() { "," } else { "" };
            writeln!(w, "  {{{}}}{comma}", fields.join(", "))?;
        }
        writeln!(w, "]")
    }
}
