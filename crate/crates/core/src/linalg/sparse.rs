use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::vec::{dot, norm2, scale_in_place};
use crate::error::{check_len, Error, Result};

/// Compressed sparse row matrix with validated structure.
///
/// Column indices are strictly increasing inside each row, so a matrix never
/// holds duplicate entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != rows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row offsets have length {}, expected {}",
                row_offsets.len(),
                rows + 1
            )));
        }
        if col_indices.len() != values.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} column indices for {} values",
                col_indices.len(),
                values.len()
            )));
        }
        if row_offsets[0] != 0 || row_offsets[rows] != values.len() {
            return Err(Error::InvalidMatrix(
                "row offsets must start at 0 and end at the number of stored values".into(),
            ));
        }
        for r in 0..rows {
            let (start, end) = (row_offsets[r], row_offsets[r + 1]);
            if start > end {
                return Err(Error::InvalidMatrix(format!(
                    "row offsets decrease at row {r}"
                )));
            }
            let idx = &col_indices[start..end];
            for (k, &c) in idx.iter().enumerate() {
                if c >= cols {
                    return Err(Error::InvalidMatrix(format!(
                        "column index {c} out of range in row {r}"
                    )));
                }
                if k > 0 && idx[k - 1] >= c {
                    return Err(Error::InvalidMatrix(format!(
                        "column indices not strictly increasing in row {r} (duplicate or unsorted entry)"
                    )));
                }
            }
        }
        Ok(Self {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets in any order.
    /// Duplicate coordinates are rejected. Explicit zeros are kept as stored
    /// entries, which matters for sparsity-driven neighbor sets.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        for &(r, c, _) in &sorted {
            if r >= rows || c >= cols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
        }
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_offsets = vec![0usize; rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values = Vec::with_capacity(sorted.len());
        for (k, &(r, c, v)) in sorted.iter().enumerate() {
            if k > 0 && sorted[k - 1].0 == r && sorted[k - 1].1 == c {
                return Err(Error::InvalidMatrix(format!("duplicate entry at ({r}, {c})")));
            }
            row_offsets[r + 1] += 1;
            col_indices.push(c);
            values.push(v);
        }
        for r in 0..rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        Self::new(rows, cols, row_offsets, col_indices, values)
    }

    /// Dense row-major input; exact zeros are not stored.
    pub fn from_dense(dense: &[Vec<f64>]) -> Result<Self> {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let mut triplets = Vec::new();
        for (r, row) in dense.iter().enumerate() {
            check_len("dense row", cols, row.len())?;
            for (c, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    triplets.push((r, c, v));
                }
            }
        }
        Self::from_triplets(rows, cols, &triplets)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_offsets: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_offsets: vec![0; rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let range = self.row_offsets[r]..self.row_offsets[r + 1];
        (&self.col_indices[range.clone()], &self.values[range])
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols]; self.rows];
        for (r, row) in out.iter_mut().enumerate() {
            let (idx, vals) = self.row(r);
            for (&c, &v) in idx.iter().zip(vals) {
                row[c] = v;
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let mut next = counts.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.rows {
            let (idx, vals) = self.row(r);
            for (&c, &v) in idx.iter().zip(vals) {
                let slot = next[c];
                col_indices[slot] = r;
                values[slot] = v;
                next[c] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_offsets: counts,
            col_indices,
            values,
        }
    }

    /// Returns `A x`.
    pub fn spmv(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("spmv input", self.cols, x.len())?;
        let mut out = vec![0.0; self.rows];
        self.spmv_into(x, &mut out);
        Ok(out)
    }

    /// Returns `Aᵀ y`.
    pub fn spmv_t(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("spmv_t input", self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        self.spmv_t_into(y, &mut out);
        Ok(out)
    }

    /// Unchecked-length variant of [`spmv`](Self::spmv) for solver loops.
    pub fn spmv_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(out.len(), self.rows);
        for (r, o) in out.iter_mut().enumerate() {
            let (idx, vals) = self.row(r);
            *o = idx.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn spmv_t_into(&self, y: &[f64], out: &mut [f64]) {
        debug_assert_eq!(y.len(), self.rows);
        debug_assert_eq!(out.len(), self.cols);
        out.iter_mut().for_each(|o| *o = 0.0);
        for (r, &yr) in y.iter().enumerate() {
            if yr == 0.0 {
                continue;
            }
            let (idx, vals) = self.row(r);
            for (&c, &v) in idx.iter().zip(vals) {
                out[c] += v * yr;
            }
        }
    }

    /// Euclidean norms of every row and every column.
    pub fn row_col_norms(&self) -> (Vec<f64>, Vec<f64>) {
        let mut row_sq = vec![0.0; self.rows];
        let mut col_sq = vec![0.0; self.cols];
        for (r, rs) in row_sq.iter_mut().enumerate() {
            let (idx, vals) = self.row(r);
            for (&c, &v) in idx.iter().zip(vals) {
                *rs += v * v;
                col_sq[c] += v * v;
            }
        }
        (
            row_sq.into_iter().map(f64::sqrt).collect(),
            col_sq.into_iter().map(f64::sqrt).collect(),
        )
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.values)
    }

    /// Largest singular value by power iteration on `AᵀA`, started from a
    /// seeded random vector. Converged when the relative change of the
    /// estimate between sweeps is at most `tol`.
    pub fn operator_norm(&self, tol: f64, max_iter: usize, seed: u64) -> Result<f64> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
        }
        if self.nnz() == 0 {
            return Ok(0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<f64> = (0..self.cols).map(|_| rng.random_range(-1.0..1.0)).collect();
        let nv = norm2(&v);
        scale_in_place(&mut v, 1.0 / nv);
        let mut av = vec![0.0; self.rows];
        let mut w = vec![0.0; self.cols];
        let mut estimate = 0.0f64;
        for _ in 0..max_iter {
            self.spmv_into(&v, &mut av);
            self.spmv_t_into(&av, &mut w);
            // Rayleigh quotient of AᵀA at the unit vector v.
            let lambda = dot(&v, &w).max(0.0);
            let nw = norm2(&w);
            if nw == 0.0 {
                return Ok(0.0);
            }
            let next = lambda.sqrt();
            let converged = (next - estimate).abs() <= tol * next;
            estimate = next;
            v.iter_mut().zip(&w).for_each(|(vi, wi)| *vi = wi / nw);
            if converged {
                return Ok(estimate);
            }
        }
        Err(Error::NotConverged {
            what: "operator norm power iteration",
            iterations: max_iter,
        })
    }

    /// Operator norm with the default tolerance, falling back to the Frobenius
    /// upper bound when power iteration does not settle.
    pub fn operator_norm_or_bound(&self) -> f64 {
        self.operator_norm(1e-9, 10_000, 0)
            .unwrap_or_else(|_| self.frobenius_norm())
    }

    /// Multiplies row `r` by `factors[r]`.
    pub fn scale_rows(&mut self, factors: &[f64]) -> Result<()> {
        check_len("row scaling", self.rows, factors.len())?;
        for (r, &f) in factors.iter().enumerate() {
            let range = self.row_offsets[r]..self.row_offsets[r + 1];
            self.values[range].iter_mut().for_each(|v| *v *= f);
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }
}
