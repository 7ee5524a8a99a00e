//! The alist text format.
//!
//! ```text
//! N M                      columns, rows
//! max_col_deg max_row_deg
//! <N column degrees>
//! <M row degrees>
//! <N lines: 1-indexed rows of each column, zero-padded to max_col_deg>
//! <M lines: 1-indexed columns of each row, zero-padded to max_row_deg>
//! ```

use std::collections::BTreeSet;
use std::fmt::Write as _;

use super::BinaryMatrix;
use crate::error::{Error, Result};

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items: Vec<_> = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| l.split_whitespace().map(move |t| (i + 1, t)))
            .collect();
        let last_line = text.lines().count().max(1);
        Self {
            items,
            pos: 0,
            last_line,
        }
    }

    fn next_usize(&mut self, what: &str) -> Result<(usize, usize)> {
        let Some(&(line, tok)) = self.items.get(self.pos) else {
            return Err(Error::parse(
                self.last_line,
                format!("unexpected end of input, expected {what}"),
            ));
        };
        self.pos += 1;
        tok.parse::<usize>()
            .map(|v| (line, v))
            .map_err(|_| Error::parse(line, format!("expected {what}, found {tok:?}")))
    }

    fn remaining(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }
}

/// Parses an alist description of a binary matrix.
pub fn parse_alist(text: &str) -> Result<BinaryMatrix> {
    let mut t = Tokens::new(text);
    let (_, n_cols) = t.next_usize("column count")?;
    let (_, n_rows) = t.next_usize("row count")?;
    let (_, max_col) = t.next_usize("max column degree")?;
    let (_, max_row) = t.next_usize("max row degree")?;

    let mut col_deg = Vec::with_capacity(n_cols);
    for _ in 0..n_cols {
        let (line, d) = t.next_usize("column degree")?;
        if d > max_col {
            return Err(Error::parse(
                line,
                format!("column degree {d} exceeds declared maximum {max_col}"),
            ));
        }
        col_deg.push(d);
    }
    let mut row_deg = Vec::with_capacity(n_rows);
    for _ in 0..n_rows {
        let (line, d) = t.next_usize("row degree")?;
        if d > max_row {
            return Err(Error::parse(
                line,
                format!("row degree {d} exceeds declared maximum {max_row}"),
            ));
        }
        row_deg.push(d);
    }

    let mut from_cols = BTreeSet::new();
    for (c, &deg) in col_deg.iter().enumerate() {
        let mut listed = 0;
        let mut first_line = 0;
        for k in 0..max_col {
            let (line, r) = t.next_usize("row index")?;
            if k == 0 {
                first_line = line;
            }
            if r == 0 {
                continue;
            }
            if r > n_rows {
                return Err(Error::parse(
                    line,
                    format!("row index {r} out of range 1..={n_rows}"),
                ));
            }
            if !from_cols.insert((r - 1, c)) {
                return Err(Error::parse(
                    line,
                    format!("duplicate row {r} in column {}", c + 1),
                ));
            }
            listed += 1;
        }
        if listed != deg {
            return Err(Error::parse(
                first_line,
                format!("column {} lists {listed} rows but degree is {deg}", c + 1),
            ));
        }
    }

    let mut from_rows = BTreeSet::new();
    for (r, &deg) in row_deg.iter().enumerate() {
        let mut listed = 0;
        let mut first_line = 0;
        for k in 0..max_row {
            let (line, c) = t.next_usize("column index")?;
            if k == 0 {
                first_line = line;
            }
            if c == 0 {
                continue;
            }
            if c > n_cols {
                return Err(Error::parse(
                    line,
                    format!("column index {c} out of range 1..={n_cols}"),
                ));
            }
            if !from_rows.insert((r, c - 1)) {
                return Err(Error::parse(
                    line,
                    format!("duplicate column {c} in row {}", r + 1),
                ));
            }
            listed += 1;
        }
        if listed != deg {
            return Err(Error::parse(
                first_line,
                format!("row {} lists {listed} columns but degree is {deg}", r + 1),
            ));
        }
    }

    if let Some((line, tok)) = t.remaining() {
        return Err(Error::parse(line, format!("trailing token {tok:?}")));
    }
    if from_cols != from_rows {
        let line = t.last_line;
        return Err(Error::parse(line, "row lists disagree with column lists"));
    }
    BinaryMatrix::new(n_rows, n_cols, from_cols)
}

/// Serializes a matrix in alist format with zero padding.
pub fn write_alist(m: &BinaryMatrix) -> String {
    let cols = m.column_lists();
    let rows = m.row_lists();
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = rows.iter().map(Vec::len).max().unwrap_or(0);

    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.n_cols(), m.n_rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    out.push_str(&join(cols.iter().map(Vec::len)));
    out.push('\n');
    out.push_str(&join(rows.iter().map(Vec::len)));
    out.push('\n');
    for list in &cols {
        out.push_str(&padded(list, max_col));
        out.push('\n');
    }
    for list in &rows {
        out.push_str(&padded(list, max_row));
        out.push('\n');
    }
    out
}

fn join(values: impl Iterator<Item = usize>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn padded(list: &[usize], width: usize) -> String {
    join(
        list.iter()
            .map(|&i| i + 1)
            .chain(std::iter::repeat(0))
            .take(width),
    )
}
