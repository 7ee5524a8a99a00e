use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::BinaryMatrix;
use crate::error::{Error, Result};

/// Base matrix of circulant shift powers.
///
/// A block with power `k` expands to the `p x p` circulant with its nonzero in
/// row `r` at column `(r + k) mod p`, so power 0 is the identity. Missing
/// blocks are zero circulants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcMatrix {
    p: usize,
    m_b: usize,
    n_b: usize,
    blocks: BTreeMap<(usize, usize), usize>,
}

impl QcMatrix {
    pub fn new(
        p: usize,
        m_b: usize,
        n_b: usize,
        blocks: impl IntoIterator<Item = ((usize, usize), usize)>,
    ) -> Result<Self> {
        if p == 0 {
            return Err(Error::Dimension("circulant size must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for ((br, bc), k) in blocks {
            if br >= m_b || bc >= n_b {
                return Err(Error::Dimension(format!(
                    "block ({br}, {bc}) outside {m_b}x{n_b} base"
                )));
            }
            if k >= p {
                return Err(Error::Dimension(format!("power {k} not below p = {p}")));
            }
            if map.insert((br, bc), k).is_some() {
                return Err(Error::Dimension(format!("block ({br}, {bc}) given twice")));
            }
        }
        Ok(Self {
            p,
            m_b,
            n_b,
            blocks: map,
        })
    }

    /// Array-type base: power `(i * j) mod p` at every block.
    pub fn array_code(p: usize, m_b: usize, n_b: usize) -> Self {
        let blocks = (0..m_b).flat_map(|i| (0..n_b).map(move |j| ((i, j), (i * j) % p)));
        Self::new(p, m_b, n_b, blocks).expect("array code parameters are valid")
    }

    pub fn circulant_size(&self) -> usize {
        self.p
    }

    pub fn base_rows(&self) -> usize {
        self.m_b
    }

    pub fn base_cols(&self) -> usize {
        self.n_b
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), usize> {
        &self.blocks
    }

    pub fn power(&self, block_row: usize, block_col: usize) -> Option<usize> {
        self.blocks.get(&(block_row, block_col)).copied()
    }

    pub fn nz_circulants(&self) -> usize {
        self.blocks.len()
    }

    /// Block containing the expanded position `(row, col)`.
    pub fn block_of(&self, row: usize, col: usize) -> (usize, usize) {
        (row / self.p, col / self.p)
    }
}

/// Expands a QC base matrix into its binary parity-check matrix.
pub fn expand_qc(q: &QcMatrix) -> BinaryMatrix {
    let p = q.p;
    let positions = q
        .blocks
        .iter()
        .flat_map(|(&(bi, bj), &k)| (0..p).map(move |r| (bi * p + r, bj * p + (r + k) % p)));
    BinaryMatrix::new(q.m_b * p, q.n_b * p, positions)
        .expect("circulant expansion is duplicate-free")
}

/// Parses the QC text format:
///
/// ```text
/// qc 1
/// p <p>
/// rows <m_b> cols <n_b>
/// <m_b lines of n_b tokens, '-' for a zero block or a shift power>
/// ```
pub fn parse_qc(text: &str) -> Result<QcMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse(text.lines().count().max(1), format!("missing {what}")))
    };

    let (line, header) = next("header")?;
    if header.split_whitespace().collect::<Vec<_>>() != ["qc", "1"] {
        return Err(Error::parse(
            line,
            format!("expected \"qc 1\", found {header:?}"),
        ));
    }
    let (line, p_line) = next("circulant size")?;
    let p = match p_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["p", v] => parse_num(line, v)?,
        _ => {
            return Err(Error::parse(
                line,
                format!("expected \"p <p>\", found {p_line:?}"),
            ))
        }
    };
    if p == 0 {
        return Err(Error::parse(line, "circulant size must be positive"));
    }
    let (line, dims) = next("dimensions")?;
    let (m_b, n_b) = match dims.split_whitespace().collect::<Vec<_>>()[..] {
        ["rows", r, "cols", c] => (parse_num(line, r)?, parse_num(line, c)?),
        _ => {
            return Err(Error::parse(
                line,
                format!("expected \"rows <m> cols <n>\", found {dims:?}"),
            ))
        }
    };

    let mut blocks = Vec::new();
    for bi in 0..m_b {
        let (line, row) = next("base row")?;
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != n_b {
            return Err(Error::parse(
                line,
                format!("expected {n_b} tokens, found {}", tokens.len()),
            ));
        }
        for (bj, tok) in tokens.into_iter().enumerate() {
            if tok == "-" {
                continue;
            }
            let k = parse_num(line, tok)?;
            if k >= p {
                return Err(Error::parse(line, format!("power {k} not below p = {p}")));
            }
            blocks.push(((bi, bj), k));
        }
    }
    if let Some((line, extra)) = lines.next() {
        return Err(Error::parse(
            line,
            format!("unexpected trailing line {extra:?}"),
        ));
    }
    QcMatrix::new(p, m_b, n_b, blocks)
}

fn parse_num(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("expected integer, found {tok:?}")))
}

pub fn write_qc(q: &QcMatrix) -> String {
    let mut out = format!("qc 1\np {}\nrows {} cols {}\n", q.p, q.m_b, q.n_b);
    for bi in 0..q.m_b {
        let row: Vec<String> = (0..q.n_b)
            .map(|bj| {
                q.power(bi, bj)
                    .map_or_else(|| "-".to_string(), |k| k.to_string())
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tanner::check_regular_gamma;

    fn single(p: usize, k: usize) -> BinaryMatrix {
        expand_qc(&QcMatrix::new(p, 1, 1, [((0, 0), k)]).unwrap())
    }

    #[test]
    fn power_zero_is_identity() {
        assert_eq!(single(3, 0), BinaryMatrix::identity(3));
    }

    #[test]
    fn power_one_shifts_right() {
        assert_eq!(single(3, 1).entries(), &[(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn all_zero_powers_2x2() {
        let q = parse_qc("qc 1\np 3\nrows 2 cols 2\n0 0\n0 0\n").unwrap();
        let m = expand_qc(&q);
        assert_eq!((m.n_rows(), m.n_cols()), (6, 6));
        assert_eq!(check_regular_gamma(&m), Some(2));
    }

    #[test]
    fn parse_and_write_round_trip() {
        let text = "qc 1\np 5\nrows 2 cols 3\n0 - 4\n- 2 1\n";
        let q = parse_qc(text).unwrap();
        assert_eq!(q.nz_circulants(), 4);
        assert_eq!(write_qc(&q), text);
    }

    #[test]
    fn parse_errors() {
        let bad_power = "qc 1\np 3\nrows 1 cols 2\n0 3\n";
        assert!(matches!(
            parse_qc(bad_power),
            Err(Error::Parse { line: 4, .. })
        ));
        let bad_count = "qc 1\np 3\nrows 1 cols 2\n0\n";
        assert!(matches!(
            parse_qc(bad_count),
            Err(Error::Parse { line: 4, .. })
        ));
        let bad_header = "qc 2\np 3\n";
        assert!(matches!(
            parse_qc(bad_header),
            Err(Error::Parse { line: 1, .. })
        ));
        let missing_row = "qc 1\np 3\nrows 2 cols 1\n0\n";
        assert!(matches!(parse_qc(missing_row), Err(Error::Parse { .. })));
    }

    #[test]
    fn weights_follow_base_weights() {
        let q = QcMatrix::new(5, 2, 3, [((0, 0), 1), ((0, 2), 3), ((1, 0), 4)]).unwrap();
        let m = expand_qc(&q);
        assert_eq!(
            m.column_weights(),
            [vec![2; 5], vec![0; 5], vec![1; 5]].concat()
        );
        assert_eq!(m.row_weights(), [vec![2; 5], vec![1; 5]].concat());
    }
}
