//! Sparse binary matrices shared by protograph-scale and lifted-scale code.

use std::ops::Range;

use crate::error::{Error, Result};

/// A binary matrix stored as per-row and per-column sorted index lists.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparseBinaryMatrix {
    rows: usize,
    cols: usize,
    row_adj: Vec<Vec<usize>>,
    col_adj: Vec<Vec<usize>>,
}

impl SparseBinaryMatrix {
    /// An all-zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_adj: vec![Vec::new(); rows],
            col_adj: vec![Vec::new(); cols],
        }
    }

    /// Builds a matrix from the coordinates of its 1's. Duplicates and
    /// out-of-range coordinates are rejected.
    pub fn from_entries<I>(rows: usize, cols: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut m = Self::zeros(rows, cols);
        for (r, c) in entries {
            if r >= rows || c >= cols {
                return Err(Error::EntryOutOfRange {
                    row: r,
                    col: c,
                    rows,
                    cols,
                });
            }
            m.row_adj[r].push(c);
            m.col_adj[c].push(r);
        }
        for (r, list) in m.row_adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(Error::DuplicateEntry(r, w[0]));
            }
        }
        for list in m.col_adj.iter_mut() {
            list.sort_unstable();
        }
        Ok(m)
    }

    /// Dense 0/1 rows, mostly for tests and small protographs.
    pub fn from_dense(dense: &[Vec<u8>]) -> Result<Self> {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        if dense.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidParameters("ragged dense matrix".into()));
        }
        let entries = dense.iter().enumerate().flat_map(|(r, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &v)| v != 0)
                .map(move |(c, _)| (r, c))
        });
        Self::from_entries(rows, cols, entries)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_entries(n, n, (0..n).map(|i| (i, i))).expect("identity is valid")
    }

    pub fn ones(rows: usize, cols: usize) -> Self {
        Self::from_entries(
            rows,
            cols,
            (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))),
        )
        .expect("all-ones is valid")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Number of 1's.
    pub fn nnz(&self) -> usize {
        self.row_adj.iter().map(Vec::len).sum()
    }

    /// Sorted column indices of the 1's in `row`.
    pub fn row(&self, row: usize) -> &[usize] {
        &self.row_adj[row]
    }

    /// Sorted row indices of the 1's in `col`.
    pub fn col(&self, col: usize) -> &[usize] {
        &self.col_adj[col]
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        row < self.rows && self.row_adj[row].binary_search(&col).is_ok()
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.row_adj
            .iter()
            .enumerate()
            .flat_map(|(r, cols)| cols.iter().map(move |&c| (r, c)))
    }

    pub fn col_weights(&self) -> Vec<usize> {
        self.col_adj.iter().map(Vec::len).collect()
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.row_adj.iter().map(Vec::len).collect()
    }

    /// The submatrix on the given row and column ranges, re-indexed from 0.
    pub fn submatrix(&self, rows: Range<usize>, cols: Range<usize>) -> Result<Self> {
        if rows.end > self.rows
            || cols.end > self.cols
            || rows.start > rows.end
            || cols.start > cols.end
        {
            return Err(Error::InvalidParameters(format!(
                "submatrix {rows:?}x{cols:?} out of range for {}x{}",
                self.rows, self.cols
            )));
        }
        let entries = rows.clone().flat_map(|r| {
            let cs = &self.row_adj[r];
            let lo = cs.partition_point(|&c| c < cols.start);
            let hi = cs.partition_point(|&c| c < cols.end);
            let (r0, c0) = (rows.start, cols.start);
            cs[lo..hi].iter().map(move |&c| (r - r0, c - c0))
        });
        Self::from_entries(rows.len(), cols.len(), entries)
    }

    /// Dense row-major 0/1 copy.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut d = vec![vec![0u8; self.cols]; self.rows];
        for (r, c) in self.entries() {
            d[r][c] = 1;
        }
        d
    }
}

/// Intersection of two sorted index lists.
pub(crate) fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}
