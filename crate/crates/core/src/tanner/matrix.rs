use crate::error::{Error, Result};

/// Sparse binary matrix stored as its nonzero positions.
///
/// Positions are kept in row-major order and the index of a position in that
/// order is its entry-id, so ids are dense in `0..nnz` and depend only on the
/// support of the matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize)>,
}

impl BinaryMatrix {
    /// Builds a matrix from NZ positions. Duplicates are rejected.
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        positions: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize)> = positions.into_iter().collect();
        for &(row, col) in &entries {
            if row >= n_rows || col >= n_cols {
                return Err(Error::OutOfRange {
                    row,
                    col,
                    n_rows,
                    n_cols,
                });
            }
        }
        entries.sort_unstable();
        if let Some(w) = entries.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEntry {
                row: w[0].0,
                col: w[0].1,
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            entries,
        })
    }

    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            entries: (0..n).map(|i| (i, i)).collect(),
        }
    }

    /// Builds a matrix from a dense 0/1 row list.
    pub fn from_dense(rows: &[&[u8]]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Dimension("ragged dense rows".into()));
        }
        let positions = rows.iter().enumerate().flat_map(|(i, r)| {
            r.iter()
                .enumerate()
                .filter(|(_, &b)| b != 0)
                .map(move |(j, _)| (i, j))
        });
        Self::new(rows.len(), n_cols, positions)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// All NZ positions; the slice index is the entry-id.
    pub fn entries(&self) -> &[(usize, usize)] {
        &self.entries
    }

    pub fn entry(&self, id: usize) -> (usize, usize) {
        self.entries[id]
    }

    pub fn entry_id(&self, row: usize, col: usize) -> Option<usize> {
        self.entries.binary_search(&(row, col)).ok()
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        self.entry_id(row, col).is_some()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n_cols];
        for &(_, c) in &self.entries {
            w[c] += 1;
        }
        w
    }

    pub fn row_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.n_rows];
        for &(r, _) in &self.entries {
            w[r] += 1;
        }
        w
    }

    /// Column indices of each row, ascending.
    pub fn row_lists(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.n_rows];
        for &(r, c) in &self.entries {
            rows[r].push(c);
        }
        rows
    }

    /// Row indices of each column, ascending.
    pub fn column_lists(&self) -> Vec<Vec<usize>> {
        let mut cols = vec![Vec::new(); self.n_cols];
        for &(r, c) in &self.entries {
            cols[c].push(r);
        }
        cols
    }
}

/// Returns the common column weight if every column has the same weight.
pub fn check_regular_gamma(m: &BinaryMatrix) -> Option<usize> {
    let weights = m.column_weights();
    let first = *weights.first()?;
    weights.iter().all(|&w| w == first).then_some(first)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entry_ids_are_row_major() {
        let m = BinaryMatrix::new(2, 3, [(1, 0), (0, 2), (0, 1)]).unwrap();
        assert_eq!(m.entries(), &[(0, 1), (0, 2), (1, 0)]);
        assert_eq!(m.entry_id(1, 0), Some(2));
        assert_eq!(m.entry_id(1, 1), None);
    }

    #[test]
    fn duplicates_are_rejected() {
        let err = BinaryMatrix::new(2, 2, [(0, 0), (1, 1), (0, 0)]).unwrap_err();
        assert!(matches!(err, Error::DuplicateEntry { row: 0, col: 0 }));
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(
            BinaryMatrix::new(2, 2, [(2, 0)]),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn gamma_of_small_matrices() {
        let ones = BinaryMatrix::from_dense(&[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(check_regular_gamma(&ones), Some(2));
        assert_eq!(check_regular_gamma(&BinaryMatrix::identity(3)), Some(1));
        let irregular = BinaryMatrix::from_dense(&[&[1, 1], &[0, 1]]).unwrap();
        assert_eq!(check_regular_gamma(&irregular), None);
        assert_eq!(check_regular_gamma(&BinaryMatrix::zeros(2, 0)), None);
    }
}
