//! Compressed sparse row storage for complex operators.
//!
//! Every matrix in the crate (adjacency, Hamiltonian, Lindblad operators and
//! the vectorized Liouvillian) is carried as a [`SparseMatrix`]. Instances are
//! always canonical: column indices strictly increase within a row and no
//! explicit zeros are stored.

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{QswError, Result};

/// Canonical CSR matrix with double precision complex entries.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_starts: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            row_starts: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_starts: (0..=n).collect(),
            col_indices: (0..n).collect(),
            values: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    /// Wraps raw CSR arrays, rejecting anything that is not already canonical.
    pub fn from_csr(
        n_rows: usize,
        n_cols: usize,
        row_starts: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<Complex64>,
    ) -> Result<Self> {
        if row_starts.len() != n_rows + 1 {
            return Err(QswError::InvalidMatrix(format!(
                "row_starts has length {}, expected {}",
                row_starts.len(),
                n_rows + 1
            )));
        }
        if row_starts[0] != 0 || row_starts[n_rows] != col_indices.len() {
            return Err(QswError::InvalidMatrix(
                "row_starts must begin at 0 and end at nnz".into(),
            ));
        }
        if col_indices.len() != values.len() {
            return Err(QswError::InvalidMatrix(
                "col_indices and values differ in length".into(),
            ));
        }
        for r in 0..n_rows {
            let (lo, hi) = (row_starts[r], row_starts[r + 1]);
            if lo > hi {
                return Err(QswError::InvalidMatrix("row_starts must be non-decreasing".into()));
            }
            let cols = &col_indices[lo..hi];
            if cols.iter().any(|&c| c >= n_cols) {
                return Err(QswError::InvalidMatrix(format!("column index out of range in row {r}")));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return Err(QswError::InvalidMatrix(format!(
                    "column indices of row {r} are not strictly increasing"
                )));
            }
        }
        if values.iter().any(|v| v.is_zero()) {
            return Err(QswError::InvalidMatrix("explicitly stored zero".into()));
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_starts,
            col_indices,
            values,
        })
    }

    /// Builds a matrix from coordinate triplets, summing duplicates in input
    /// order and dropping entries that end up exactly zero.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        Self::collect_triplets(n_rows, n_cols, triplets, true)
    }

    /// Like [`SparseMatrix::from_triplets`] but a repeated coordinate is an error.
    pub fn from_unique_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        Self::collect_triplets(n_rows, n_cols, triplets, false)
    }

    fn collect_triplets<I>(n_rows: usize, n_cols: usize, triplets: I, sum: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Complex64)>,
    {
        let mut rows: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); n_rows];
        for (r, c, v) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(QswError::InvalidMatrix(format!(
                    "entry ({r}, {c}) outside {n_rows}x{n_cols}"
                )));
            }
            rows[r].push((c, v));
        }
        let mut row_starts = Vec::with_capacity(n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_starts.push(0);
        for (r, mut entries) in rows.into_iter().enumerate() {
            entries.sort_by_key(|&(c, _)| c);
            let mut i = 0;
            while i < entries.len() {
                let (c, mut acc) = entries[i];
                let mut j = i + 1;
                while j < entries.len() && entries[j].0 == c {
                    if !sum {
                        return Err(QswError::InvalidMatrix(format!("duplicate entry at ({r}, {c})")));
                    }
                    acc += entries[j].1;
                    j += 1;
                }
                if !acc.is_zero() {
                    col_indices.push(c);
                    values.push(acc);
                }
                i = j;
            }
            row_starts.push(col_indices.len());
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_starts,
            col_indices,
            values,
        })
    }

    /// Row-major dense input, mostly for fixtures.
    pub fn from_dense(n_rows: usize, n_cols: usize, dense: &[Complex64]) -> Result<Self> {
        if dense.len() != n_rows * n_cols {
            return Err(QswError::DimensionMismatch {
                expected: n_rows * n_cols,
                found: dense.len(),
            });
        }
        Self::from_unique_triplets(
            n_rows,
            n_cols,
            dense.iter().enumerate().map(|(k, &v)| (k / n_cols, k % n_cols, v)),
        )
    }

    pub fn from_real_dense(n_rows: usize, n_cols: usize, dense: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = dense.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_dense(n_rows, n_cols, &c)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_starts(&self) -> &[usize] {
        &self.row_starts
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    #[inline]
    pub fn row(&self, r: usize) -> (&[usize], &[Complex64]) {
        let (lo, hi) = (self.row_starts[r], self.row_starts[r + 1]);
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => Complex64::zero(),
        }
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.n_rows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.n_cols + 1];
        for &c in &self.col_indices {
            counts[c + 1] += 1;
        }
        for c in 0..self.n_cols {
            counts[c + 1] += counts[c];
        }
        let row_starts = counts.clone();
        let mut next = counts;
        let mut col_indices = vec![0; self.nnz()];
        let mut values = vec![Complex64::zero(); self.nnz()];
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let dst = next[c];
                col_indices[dst] = r;
                values[dst] = v;
                next[c] += 1;
            }
        }
        SparseMatrix {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_starts,
            col_indices,
            values,
        }
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    /// Applies `f` to every stored entry; entries mapped to zero are dropped.
    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        let mut row_starts = Vec::with_capacity(self.n_rows + 1);
        let mut col_indices = Vec::with_capacity(self.nnz());
        let mut values = Vec::with_capacity(self.nnz());
        row_starts.push(0);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                let w = f(v);
                if !w.is_zero() {
                    col_indices.push(c);
                    values.push(w);
                }
            }
            row_starts.push(col_indices.len());
        }
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_starts,
            col_indices,
            values,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        self.map(|v| v * factor)
    }

    pub fn add(&self, other: &SparseMatrix) -> Result<Self> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(QswError::InvalidMatrix(format!(
                "cannot add {}x{} and {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        Self::from_triplets(self.n_rows, self.n_cols, self.iter().chain(other.iter()))
    }

    /// Sparse product `self * rhs` (row-wise Gustavson accumulation).
    pub fn matmul(&self, rhs: &SparseMatrix) -> Result<Self> {
        if self.n_cols != rhs.n_rows {
            return Err(QswError::DimensionMismatch {
                expected: self.n_cols,
                found: rhs.n_rows,
            });
        }
        let mut acc = vec![Complex64::zero(); rhs.n_cols];
        let mut marker = vec![usize::MAX; rhs.n_cols];
        let mut touched: Vec<usize> = Vec::new();
        let mut row_starts = Vec::with_capacity(self.n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_starts.push(0);
        for r in 0..self.n_rows {
            touched.clear();
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (rcols, rvals) = rhs.row(k);
                for (&c, &b) in rcols.iter().zip(rvals) {
                    if marker[c] != r {
                        marker[c] = r;
                        acc[c] = Complex64::zero();
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            touched.sort_unstable();
            for &c in &touched {
                if !acc[c].is_zero() {
                    col_indices.push(c);
                    values.push(acc[c]);
                }
            }
            row_starts.push(col_indices.len());
        }
        Ok(SparseMatrix {
            n_rows: self.n_rows,
            n_cols: rhs.n_cols,
            row_starts,
            col_indices,
            values,
        })
    }

    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n_cols {
            return Err(QswError::DimensionMismatch {
                expected: self.n_cols,
                found: x.len(),
            });
        }
        Ok((0..self.n_rows)
            .map(|r| {
                let (cols, vals) = self.row(r);
                cols.iter()
                    .zip(vals)
                    .fold(Complex64::zero(), |s, (&c, &v)| s + v * x[c])
            })
            .collect())
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); self.n_rows * self.n_cols];
        for (r, c, v) in self.iter() {
            out[r * self.n_cols + c] = v;
        }
        out
    }

    pub fn column_abs_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.n_cols];
        for (&c, v) in self.col_indices.iter().zip(&self.values) {
            sums[c] += v.norm();
        }
        sums
    }

    /// Induced 1-norm (largest absolute column sum).
    pub fn one_norm(&self) -> f64 {
        self.column_abs_sums().into_iter().fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermitian_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let adj = self.adjoint();
        self.max_abs_diff(&adj)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    /// Max entrywise |self - other|; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &SparseMatrix) -> f64 {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for r in 0..self.n_rows {
            let (ac, av) = self.row(r);
            let (bc, bv) = other.row(r);
            let (mut i, mut j) = (0, 0);
            while i < ac.len() || j < bc.len() {
                let d = if j >= bc.len() || (i < ac.len() && ac[i] < bc[j]) {
                    i += 1;
                    av[i - 1].norm()
                } else if i >= ac.len() || bc[j] < ac[i] {
                    j += 1;
                    bv[j - 1].norm()
                } else {
                    i += 1;
                    j += 1;
                    (av[i - 1] - bv[j - 1]).norm()
                };
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Embeds the matrix in the top-left corner of an `n x n` zero matrix.
    pub fn padded(&self, n: usize) -> Result<Self> {
        if n < self.n_rows || n < self.n_cols {
            return Err(QswError::DimensionMismatch {
                expected: self.n_rows.max(self.n_cols),
                found: n,
            });
        }
        let mut row_starts = self.row_starts.clone();
        row_starts.resize(n + 1, self.nnz());
        Ok(SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_starts,
            col_indices: self.col_indices.clone(),
            values: self.values.clone(),
        })
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n_rows.min(self.n_cols)).map(|i| self.get(i, i)).sum()
    }
}
