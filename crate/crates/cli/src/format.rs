//! Numeric formatting and delimited output.

use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Csv,
    Tsv,
}

impl std::str::FromStr for Delimiter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Delimiter::Csv),
            "tsv" => Ok(Delimiter::Tsv),
            _ => Err(format!("unknown format `{s}` (expected csv or tsv)")),
        }
    }
}

impl Delimiter {
    pub fn sep(self) -> char {
        match self {
            Delimiter::Csv => ',',
            Delimiter::Tsv => '\t',
        }
    }
}

/// Rounds to `digits` significant digits and prints the shortest decimal
/// that reads back to the rounded value.
pub fn num(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{:.*e}", digits.max(1) - 1, v)
        .parse()
        .expect("scientific notation parses");
    let a = rounded.abs();
    if !(1e-5..1e16).contains(&a) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// Writes delimited rows.
pub struct Table<W: Write> {
    out: W,
    sep: char,
}

impl<W: Write> Table<W> {
    pub fn new(out: W, delimiter: Delimiter) -> Self {
        Table {
            out,
            sep: delimiter.sep(),
        }
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> io::Result<()> {
        let mut first = true;
        for f in fields {
            if !first {
                write!(self.out, "{}", self.sep)?;
            }
            first = false;
            self.out.write_all(f.as_ref().as_bytes())?;
        }
        writeln!(self.out)
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
