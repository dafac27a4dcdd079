//! Dense linear-algebra kernel.
//!
//! A small row-major [`DenseMatrix`] plus the handful of primitives the
//! recovery algorithms and guarantee checks need: spectral and Frobenius
//! norms, a column-pivoted Householder least-squares solver, and the smallest
//! eigenvalue of a Gram matrix. Every function here is pure.

use std::ops::{Index, IndexMut};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Relative tolerance below which a column is declared linearly dependent
/// during least-squares factorization.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Floor reported by [`min_eig_gram`] for numerically negative eigenvalues.
pub const MIN_EIG_FLOOR: f64 = -1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting length mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    /// Row-major entries.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows)
            .map(|i| self.data[i * self.cols + j].powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn row_norm(&self, i: usize) -> f64 {
        self.row(i).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Sub-matrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    pub fn select_rows(&self, rows: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        DenseMatrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// `self * rhs`.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in orow.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `selfᵀ * rhs` without forming the transpose.
    pub fn tmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply ({}x{})ᵀ by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.cols, rhs.cols);
        for r in 0..self.rows {
            let brow = rhs.row(r);
            for (i, &a) in self.row(r).iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                let orow = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> Result<DenseMatrix> {
        if self.shape() != rhs.shape() {
            return Err(Error::Dimension(format!(
                "shape mismatch {:?} vs {:?}",
                self.shape(),
                rhs.shape()
            )));
        }
        Ok(DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn scale(&self, c: f64) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<f64>) -> DenseMatrix {
        DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

fn require_nonempty(a: &DenseMatrix, what: &str) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Dimension(format!("{what} of an empty matrix")));
    }
    Ok(())
}

/// `AᵀA` (when `transpose_first`) or `AAᵀ`.
fn gram(a: &DenseMatrix, transpose_first: bool) -> DenseMatrix {
    if transpose_first {
        a.tmul(a).expect("shapes agree")
    } else {
        let at = a.transpose();
        at.tmul(&at).expect("shapes agree")
    }
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(s: &DenseMatrix) -> Vec<f64> {
    let mut vals: Vec<f64> = SymmetricEigen::new(s.to_nalgebra()).eigenvalues.iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Largest singular value, taken from the eigenvalues of the smaller Gram
/// matrix.
pub fn spectral_norm(a: &DenseMatrix) -> Result<f64> {
    require_nonempty(a, "spectral norm")?;
    if a.rows == 1 || a.cols == 1 {
        return Ok(frobenius_norm(a)?);
    }
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let scaled = a.scale(1.0 / scale);
    let g = gram(&scaled, a.cols <= a.rows);
    let top = symmetric_eigenvalues(&g).last().copied().unwrap_or(0.0);
    Ok(top.max(0.0).sqrt() * scale)
}

pub fn frobenius_norm(a: &DenseMatrix) -> Result<f64> {
    require_nonempty(a, "Frobenius norm")?;
    Ok(a.data.iter().map(|v| v * v).sum::<f64>().sqrt())
}

/// Smallest eigenvalue of `AᵀA`, floored at [`MIN_EIG_FLOOR`].
pub fn min_eig_gram(a: &DenseMatrix) -> Result<f64> {
    require_nonempty(a, "Gram eigenvalue")?;
    let g = gram(a, true);
    let low = symmetric_eigenvalues(&g)[0];
    Ok(low.max(MIN_EIG_FLOOR))
}

/// Householder QR with column pivoting of an `m×k` matrix (`k ≤ m`).
///
/// Column `j` is rejected as dependent when its norm after orthogonalization
/// against the already-factored columns drops to `RANK_TOLERANCE` times its
/// original norm.
#[derive(Debug, Clone)]
pub struct QrFactor {
    m: usize,
    k: usize,
    // column-major; reflector tails below the diagonal, R on and above it
    qr: Vec<f64>,
    tau: Vec<f64>,
    perm: Vec<usize>,
}

impl QrFactor {
    pub fn new(a: &DenseMatrix) -> Result<Self> {
        let (m, k) = a.shape();
        if k == 0 || m == 0 {
            return Err(Error::Dimension("QR of an empty matrix".into()));
        }
        if k > m {
            return Err(Error::Dimension(format!(
                "least squares needs at most as many columns as rows, got {m}x{k}"
            )));
        }
        let mut qr = vec![0.0; m * k];
        for j in 0..k {
            for i in 0..m {
                qr[j * m + i] = a[(i, j)];
            }
        }
        let orig: Vec<f64> = (0..k).map(|j| a.column_norm(j)).collect();
        let mut perm: Vec<usize> = (0..k).collect();
        let mut tau = vec![0.0; k];

        for step in 0..k {
            // remaining norms of the unfactored columns
            let mut best = step;
            let mut best_norm = -1.0;
            let mut dependent: Option<usize> = None;
            for pos in step..k {
                let col = &qr[pos * m + step..(pos + 1) * m];
                let rem = col.iter().map(|v| v * v).sum::<f64>().sqrt();
                let original = perm[pos];
                if rem <= RANK_TOLERANCE * orig[original] {
                    dependent = Some(dependent.map_or(original, |d: usize| d.min(original)));
                }
                if rem > best_norm {
                    best_norm = rem;
                    best = pos;
                }
            }
            if let Some(column) = dependent {
                return Err(Error::Singular { column });
            }
            if best != step {
                for i in 0..m {
                    qr.swap(step * m + i, best * m + i);
                }
                perm.swap(step, best);
            }

            // reflector for qr[step.., step]
            let col = &mut qr[step * m + step..(step + 1) * m];
            let alpha = col[0];
            let tail_sq: f64 = col[1..].iter().map(|v| v * v).sum();
            if tail_sq == 0.0 {
                tau[step] = 0.0;
            } else {
                let norm = (alpha * alpha + tail_sq).sqrt();
                let beta = if alpha >= 0.0 { -norm } else { norm };
                tau[step] = (beta - alpha) / beta;
                let inv = 1.0 / (alpha - beta);
                for v in col[1..].iter_mut() {
                    *v *= inv;
                }
                col[0] = beta;
            }

            // apply to the remaining columns
            if tau[step] != 0.0 {
                let (head, rest) = qr.split_at_mut((step + 1) * m);
                let v = &head[step * m + step..(step + 1) * m];
                for pos in (step + 1)..k {
                    let target = &mut rest[(pos - step - 1) * m + step..(pos - step) * m];
                    apply_reflector(v, tau[step], target);
                }
            }
        }
        Ok(Self { m, k, qr, tau, perm })
    }

    pub fn rank(&self) -> usize {
        self.k
    }

    /// Original column index of each factored position.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    fn reflector(&self, j: usize) -> &[f64] {
        &self.qr[j * self.m + j..(j + 1) * self.m]
    }

    /// Applies `Qᵀ` to a column-major `m×d` block in place.
    fn apply_qt(&self, block: &mut [f64], d: usize) {
        for j in 0..self.k {
            if self.tau[j] == 0.0 {
                continue;
            }
            let v = self.reflector(j);
            for c in 0..d {
                apply_reflector(v, self.tau[j], &mut block[c * self.m + j..(c + 1) * self.m]);
            }
        }
    }

    fn apply_q(&self, block: &mut [f64], d: usize) {
        for j in (0..self.k).rev() {
            if self.tau[j] == 0.0 {
                continue;
            }
            let v = self.reflector(j);
            for c in 0..d {
                apply_reflector(v, self.tau[j], &mut block[c * self.m + j..(c + 1) * self.m]);
            }
        }
    }

    fn to_col_major(&self, y: &DenseMatrix) -> Result<Vec<f64>> {
        if y.rows != self.m {
            return Err(Error::Dimension(format!(
                "right-hand side has {} rows, factor has {}",
                y.rows, self.m
            )));
        }
        let d = y.cols;
        let mut block = vec![0.0; self.m * d];
        for i in 0..self.m {
            for c in 0..d {
                block[c * self.m + i] = y[(i, c)];
            }
        }
        Ok(block)
    }

    /// `Y − A A† Y`: the component of `Y` orthogonal to the span of `A`.
    pub fn residual(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        let d = y.cols;
        let mut block = self.to_col_major(y)?;
        self.apply_qt(&mut block, d);
        for c in 0..d {
            for v in &mut block[c * self.m..c * self.m + self.k] {
                *v = 0.0;
            }
        }
        self.apply_q(&mut block, d);
        Ok(DenseMatrix::from_fn(self.m, d, |i, c| block[c * self.m + i]))
    }

    /// Least-squares coefficients `A† Y` (`k×d`), rows in original column order.
    pub fn solve(&self, y: &DenseMatrix) -> Result<DenseMatrix> {
        let d = y.cols;
        let mut block = self.to_col_major(y)?;
        self.apply_qt(&mut block, d);
        let mut out = DenseMatrix::zeros(self.k, d);
        for c in 0..d {
            let z = &block[c * self.m..c * self.m + self.k];
            let mut x = vec![0.0; self.k];
            for i in (0..self.k).rev() {
                let mut acc = z[i];
                for j in (i + 1)..self.k {
                    acc -= self.qr[j * self.m + i] * x[j];
                }
                x[i] = acc / self.qr[i * self.m + i];
            }
            for (pos, &xi) in x.iter().enumerate() {
                out[(self.perm[pos], c)] = xi;
            }
        }
        Ok(out)
    }
}

/// `x ← (I − τ v vᵀ) x` with `v[0] = 1` implied.
fn apply_reflector(v: &[f64], tau: f64, x: &mut [f64]) {
    let mut w = x[0];
    for (vi, xi) in v[1..].iter().zip(&x[1..]) {
        w += vi * xi;
    }
    w *= tau;
    x[0] -= w;
    for (vi, xi) in v[1..].iter().zip(x[1..].iter_mut()) {
        *xi -= w * vi;
    }
}

/// Residual of projecting `Y` onto the column span of `A`.
pub fn least_squares_residual(a: &DenseMatrix, y: &DenseMatrix) -> Result<DenseMatrix> {
    QrFactor::new(a)?.residual(y)
}
