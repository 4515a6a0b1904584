//! Small dense kernels: SVD, pseudoinverse, norms, products.
//!
//! The SVD is a one-sided cyclic Jacobi with a fixed sweep order, which gives
//! high relative accuracy on the small, often severely ill-conditioned
//! matrices this crate works with, and makes the factorization a pure
//! function of the input bytes.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

/// Errors from the dense kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix has zero rows or columns")]
    EmptyMatrix,
    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("data length {len} does not match {rows}x{cols}")]
    InvalidShape { rows: usize, cols: usize, len: usize },
    #[error("non-finite entry at flat index {index}")]
    NonFinite { index: usize },
    #[error("SVD did not converge within {sweeps} Jacobi sweeps")]
    SvdNotConverged { sweeps: usize },
    #[error("pseudoinverse tolerance {tol} outside (0, 1)")]
    InvalidTolerance { tol: f64 },
}

/// Row-major dense matrix of `f64` entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
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
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from row-major data, validating shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::InvalidShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite { index });
        }
        Ok(Self { rows, cols, data })
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

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col_vec(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                let src = other.row(k);
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += aik * s;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>, LinalgError> {
        if v.len() != self.cols {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: v.len(),
                right_cols: 1,
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }
}

/// Thin SVD plus the full right factor.
///
/// `u` is `m x r` and `sigma` has `r = min(m, n)` nonincreasing entries.
/// `v` is always the full `n x n` orthogonal factor; for wide inputs its
/// trailing columns span the kernel, which the TLS solvers need.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdFactors {
    /// `sigma[i]`, treating indices past the stored range as exact zeros.
    pub fn sigma_or_zero(&self, i: usize) -> f64 {
        self.sigma.get(i).copied().unwrap_or(0.0)
    }

    /// `U diag(sigma) V1^T`, with `V1` the leading `r` columns of `v`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let rows = self.u.rows();
        let cols = self.v.rows();
        let r = self.sigma.len();
        let mut out = DenseMatrix::zeros(rows, cols);
        for k in 0..r {
            let s = self.sigma[k];
            if s == 0.0 {
                continue;
            }
            for i in 0..rows {
                let uis = self.u.get(i, k) * s;
                for j in 0..cols {
                    out.set(i, j, out.get(i, j) + uis * self.v.get(j, k));
                }
            }
        }
        out
    }
}

const MAX_JACOBI_SWEEPS: usize = 64;

#[inline]
fn col_pair_mut(buf: &mut [f64], stride: usize, i: usize, j: usize) -> (&mut [f64], &mut [f64]) {
    debug_assert!(i < j);
    let (lo, hi) = buf.split_at_mut(j * stride);
    (&mut lo[i * stride..(i + 1) * stride], &mut hi[..stride])
}

#[inline]
fn rotate_pair(buf: &mut [f64], stride: usize, i: usize, j: usize, cs: f64, sn: f64) {
    let (ci, cj) = col_pair_mut(buf, stride, i, j);
    for (x, y) in ci.iter_mut().zip(cj.iter_mut()) {
        let xi = *x;
        let yj = *y;
        *x = cs * xi - sn * yj;
        *y = sn * xi + cs * yj;
    }
}

/// One-sided Jacobi SVD with deterministic sweep order and sign convention.
///
/// Post-conditions: `sigma` nonincreasing; `u`, `v` orthonormal columns; in
/// each column of `v` the entry of largest magnitude (lowest index on ties)
/// is nonnegative. Fails explicitly if the sweep cap is reached.
pub fn svd(m: &DenseMatrix) -> Result<SvdFactors, LinalgError> {
    let rows = m.rows();
    let cols = m.cols();
    if rows == 0 || cols == 0 {
        return Err(LinalgError::EmptyMatrix);
    }

    // Column-major working copy; Jacobi operates on whole columns.
    let mut b = vec![0.0f64; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            b[j * rows + i] = m.get(i, j);
        }
    }
    let mut v = vec![0.0f64; cols * cols];
    for j in 0..cols {
        v[j * cols + j] = 1.0;
    }

    let tol = (rows.max(cols) as f64).sqrt() * f64::EPSILON;
    let mut norms = vec![0.0f64; cols];
    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut max_norm = 0.0f64;
        for (j, norm) in norms.iter_mut().enumerate() {
            let col = &b[j * rows..(j + 1) * rows];
            *norm = col.iter().map(|x| x * x).sum::<f64>();
            max_norm = max_norm.max(*norm);
        }
        // Columns at rounding level relative to the largest are frozen. A
        // column only gets here after rotations have drained it against the
        // live directions, so it is orthogonal to them at its own scale;
        // polishing its remaining geometry is pure noise, and the relative
        // rotation criterion could otherwise churn on it indefinitely.
        let floor = max_norm * (f64::EPSILON * f64::EPSILON);
        let mut rotated = false;
        for i in 0..cols.saturating_sub(1) {
            for j in (i + 1)..cols {
                let ni = norms[i];
                let nj = norms[j];
                if ni <= floor || nj <= floor {
                    continue;
                }
                let dot = {
                    let ci = &b[i * rows..(i + 1) * rows];
                    let cj = &b[j * rows..(j + 1) * rows];
                    ci.iter().zip(cj).map(|(x, y)| x * y).sum::<f64>()
                };
                if dot.abs() <= tol * (ni * nj).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (nj - ni) / (2.0 * dot);
                let t = if zeta.abs() > 1e100 {
                    // asymptotic form; zeta^2 would overflow
                    0.5 / zeta
                } else if zeta >= 0.0 {
                    1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                } else {
                    -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                rotate_pair(&mut b, rows, i, j, cs, sn);
                rotate_pair(&mut v, cols, i, j, cs, sn);
                norms[i] = (ni - t * dot).max(0.0);
                norms[j] = nj + t * dot;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LinalgError::SvdNotConverged {
            sweeps: MAX_JACOBI_SWEEPS,
        });
    }

    // Exact final column norms, sorted descending with index tiebreak.
    let mut order: Vec<(f64, usize)> = (0..cols)
        .map(|j| {
            let col = &b[j * rows..(j + 1) * rows];
            (col.iter().map(|x| x * x).sum::<f64>().sqrt(), j)
        })
        .collect();
    order.sort_by(|a, c| c.0.partial_cmp(&a.0).expect("finite norms").then(a.1.cmp(&c.1)));

    let r = rows.min(cols);
    let sigma: Vec<f64> = order.iter().take(r).map(|&(s, _)| s).collect();

    let mut v_out = DenseMatrix::zeros(cols, cols);
    for (new_j, &(_, old_j)) in order.iter().enumerate() {
        for i in 0..cols {
            v_out.set(i, new_j, v[old_j * cols + i]);
        }
    }

    // Columns at or below the rotation floor may never have been
    // orthogonalized among themselves; their left vectors are completed
    // rather than normalized from rounding debris.
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let zero_tol = 2.0 * f64::EPSILON * sigma_max;
    let mut u_out = DenseMatrix::zeros(rows, r);
    let mut pending = Vec::new();
    for new_j in 0..r {
        let (s, old_j) = order[new_j];
        if s > zero_tol {
            let col = &b[old_j * rows..(old_j + 1) * rows];
            for (i, value) in col.iter().enumerate() {
                u_out.set(i, new_j, value / s);
            }
        } else {
            pending.push(new_j);
        }
    }
    complete_orthonormal(&mut u_out, &pending);

    // Sign convention on V, with U flipped in lockstep.
    for j in 0..cols {
        let mut pivot = 0;
        let mut best = -1.0;
        for i in 0..cols {
            let a = v_out.get(i, j).abs();
            if a > best {
                best = a;
                pivot = i;
            }
        }
        if v_out.get(pivot, j) < 0.0 {
            for i in 0..cols {
                v_out.set(i, j, -v_out.get(i, j));
            }
            if j < r {
                for i in 0..rows {
                    u_out.set(i, j, -u_out.get(i, j));
                }
            }
        }
    }

    Ok(SvdFactors {
        u: u_out,
        sigma,
        v: v_out,
    })
}

/// Fills the listed columns of `u` with an orthonormal completion built from
/// canonical basis vectors, re-orthogonalized twice. Deterministic.
///
/// Candidates are consumed with a persistent cursor: once a basis vector is
/// rejected its residual can only shrink as the span grows, so it is never
/// revisited. Rank-deficient sketch cores can require hundreds of fills, and
/// rescanning would be quadratic.
fn complete_orthonormal(u: &mut DenseMatrix, pending: &[usize]) {
    let rows = u.rows();
    let cols = u.cols();
    // Guaranteed attainable: some candidate always has residual >= 1/sqrt(rows).
    let accept = 0.5 / (rows as f64).sqrt();
    let mut cursor = 0usize;
    for &fill in pending {
        let mut placed = false;
        while cursor < rows {
            let k = cursor;
            cursor += 1;
            let mut w = vec![0.0; rows];
            w[k] = 1.0;
            for _ in 0..2 {
                for j in (0..cols).filter(|&j| j != fill) {
                    let proj: f64 = (0..rows).map(|i| w[i] * u.get(i, j)).sum();
                    for (i, wi) in w.iter_mut().enumerate() {
                        *wi -= proj * u.get(i, j);
                    }
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > accept {
                for (i, wi) in w.iter().enumerate() {
                    u.set(i, fill, wi / norm);
                }
                placed = true;
                break;
            }
        }
        if !placed {
            let w = best_basis_completion(u, |j| j != fill);
            for (i, wi) in w.iter().enumerate() {
                u.set(i, fill, *wi);
            }
        }
    }
}

/// Canonical basis vector with the largest residual against the columns of
/// `u` selected by `active`, re-orthogonalized twice and normalized.
fn best_basis_completion(u: &DenseMatrix, active: impl Fn(usize) -> bool) -> Vec<f64> {
    let rows = u.rows();
    let cols = u.cols();
    let mut best: Option<(f64, Vec<f64>)> = None;
    for k in 0..rows {
        let mut w = vec![0.0; rows];
        w[k] = 1.0;
        for _ in 0..2 {
            for j in (0..cols).filter(|&j| active(j)) {
                let proj: f64 = (0..rows).map(|i| w[i] * u.get(i, j)).sum();
                for (i, wi) in w.iter_mut().enumerate() {
                    *wi -= proj * u.get(i, j);
                }
            }
        }
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if best.as_ref().map_or(true, |(bn, _)| norm > *bn) {
            best = Some((norm, w));
        }
        if norm > 0.9 {
            break;
        }
    }
    let (norm, mut w) = best.expect("at least one candidate");
    debug_assert!(norm > 0.0, "no orthogonal complement available");
    for wi in &mut w {
        *wi /= norm;
    }
    w
}

/// Moore-Penrose pseudoinverse via SVD truncation.
///
/// Singular values at or below `rel_tol * sigma_max` are zeroed;
/// `rel_tol` defaults to `max(rows, cols) * machine epsilon`.
/// The zero matrix maps to the zero matrix.
pub fn pinv(m: &DenseMatrix, rel_tol: Option<f64>) -> Result<DenseMatrix, LinalgError> {
    if let Some(tol) = rel_tol {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(LinalgError::InvalidTolerance { tol });
        }
    }
    if m.rows() < m.cols() {
        return pinv(&m.transpose(), rel_tol).map(|p| p.transpose());
    }
    let rel = rel_tol.unwrap_or(m.rows().max(m.cols()) as f64 * f64::EPSILON);
    let f = svd(m)?;
    let smax = f.sigma.first().copied().unwrap_or(0.0);
    let mut out = DenseMatrix::zeros(m.cols(), m.rows());
    if smax == 0.0 {
        return Ok(out);
    }
    let cutoff = rel * smax;
    for (k, &s) in f.sigma.iter().enumerate() {
        if s <= cutoff {
            continue;
        }
        let inv = 1.0 / s;
        for j in 0..m.cols() {
            let vjk = f.v.get(j, k) * inv;
            for i in 0..m.rows() {
                out.set(j, i, out.get(j, i) + vjk * f.u.get(i, k));
            }
        }
    }
    Ok(out)
}

/// Largest singular value; 0 for the zero matrix.
pub fn spectral_norm(m: &DenseMatrix) -> Result<f64, LinalgError> {
    Ok(svd(m)?.sigma.first().copied().unwrap_or(0.0))
}

/// Infinity norm of a vector; 0 for the empty vector.
pub fn inf_norm_vec(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Euclidean norm of a vector.
pub fn norm2_vec(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Orthonormalizes the columns of `m` (modified Gram-Schmidt, two passes).
///
/// Columns that vanish under projection (numerically dependent on the
/// preceding ones, common when the input sketches a low-rank matrix) are
/// replaced by a deterministic basis completion, so the output always has
/// orthonormal columns. Requires `cols <= rows`.
pub fn orthonormalize_columns(m: &DenseMatrix) -> Result<DenseMatrix, LinalgError> {
    let rows = m.rows();
    let cols = m.cols();
    if cols > rows {
        return Err(LinalgError::DimensionMismatch {
            left_rows: rows,
            left_cols: cols,
            right_rows: rows,
            right_cols: rows,
        });
    }
    let mut q = m.clone();
    for j in 0..cols {
        for _ in 0..2 {
            for prev in 0..j {
                let proj: f64 = (0..rows).map(|i| q.get(i, j) * q.get(i, prev)).sum();
                for i in 0..rows {
                    q.set(i, j, q.get(i, j) - proj * q.get(i, prev));
                }
            }
        }
        let norm: f64 = (0..rows).map(|i| q.get(i, j) * q.get(i, j)).sum::<f64>().sqrt();
        let original: f64 = (0..rows).map(|i| m.get(i, j) * m.get(i, j)).sum::<f64>().sqrt();
        if norm <= 1e-12 * original.max(1e-300) {
            let w = best_basis_completion(&q, |c| c < j);
            for (i, wi) in w.iter().enumerate() {
                q.set(i, j, *wi);
            }
        } else {
            for i in 0..rows {
                q.set(i, j, q.get(i, j) / norm);
            }
        }
    }
    Ok(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::randutil::unit_uniform;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| 2.0 * unit_uniform(rng) - 1.0)
    }

    fn gram_deviation(m: &DenseMatrix) -> f64 {
        let g = m.transpose().matmul(m).unwrap();
        let mut acc = 0.0;
        for i in 0..g.rows() {
            for j in 0..g.cols() {
                let target = if i == j { 1.0 } else { 0.0 };
                acc += (g.get(i, j) - target).powi(2);
            }
        }
        acc.sqrt()
    }

    #[test]
    fn svd_identity() {
        let f = svd(&DenseMatrix::identity(3)).unwrap();
        for &s in &f.sigma {
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn svd_diagonal_is_sorted() {
        let m = DenseMatrix::from_vec(2, 2, vec![3.0, 0.0, 0.0, 4.0]).unwrap();
        let f = svd(&m).unwrap();
        assert!((f.sigma[0] - 4.0).abs() < 1e-14);
        assert!((f.sigma[1] - 3.0).abs() < 1e-14);
        // the leading right singular vector is e2, with positive pivot
        assert!((f.v.get(1, 0) - 1.0).abs() < 1e-14);
        assert!((f.v.get(0, 1) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn svd_reconstructs_random_8x5() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_matrix(8, 5, &mut rng);
        let f = svd(&m).unwrap();
        let err = f.reconstruct().sub(&m).unwrap().frob_norm();
        assert!(err <= 1e-9 * m.frob_norm(), "reconstruction error {err}");
        assert!(gram_deviation(&f.u) < 1e-10 * 8.0);
        assert!(gram_deviation(&f.v) < 1e-10 * 5.0);
    }

    #[test]
    fn svd_wide_matrix_keeps_full_v() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = random_matrix(3, 6, &mut rng);
        let f = svd(&m).unwrap();
        assert_eq!(f.sigma.len(), 3);
        assert_eq!(f.u.rows(), 3);
        assert_eq!(f.u.cols(), 3);
        assert_eq!(f.v.rows(), 6);
        assert_eq!(f.v.cols(), 6);
        let err = f.reconstruct().sub(&m).unwrap().frob_norm();
        assert!(err <= 1e-9 * m.frob_norm());
        assert!(gram_deviation(&f.v) < 1e-10 * 6.0);
        // trailing V columns: null directions
        for k in 3..6 {
            let mv = m.mul_vec(&f.v.col_vec(k)).unwrap();
            assert!(norm2_vec(&mv) <= 1e-10 * m.frob_norm());
        }
    }

    #[test]
    fn svd_rank_deficient_completes_u() {
        let m = DenseMatrix::from_vec(2, 2, vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        let f = svd(&m).unwrap();
        assert!((f.sigma[0] - 2.0).abs() < 1e-14);
        assert_eq!(f.sigma[1], 0.0);
        assert!(gram_deviation(&f.u) < 1e-12);
    }

    #[test]
    fn svd_zero_matrix() {
        let f = svd(&DenseMatrix::zeros(3, 2)).unwrap();
        assert_eq!(f.sigma, vec![0.0, 0.0]);
        assert!(gram_deviation(&f.u) < 1e-14);
        assert!(gram_deviation(&f.v) < 1e-14);
    }

    #[test]
    fn svd_deterministic_bytes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_matrix(7, 4, &mut rng);
        let f1 = svd(&m).unwrap();
        let f2 = svd(&m).unwrap();
        assert_eq!(f1.u.data(), f2.u.data());
        assert_eq!(f1.sigma, f2.sigma);
        assert_eq!(f1.v.data(), f2.v.data());
    }

    #[test]
    fn weyl_inequality_on_perturbation() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let m = random_matrix(6, 4, &mut rng);
            let e = random_matrix(6, 4, &mut rng).scaled(0.01);
            let perturbed = m.sub(&e.scaled(-1.0)).unwrap();
            let sm = svd(&m).unwrap().sigma;
            let sp = svd(&perturbed).unwrap().sigma;
            let bound = spectral_norm(&e).unwrap() + 1e-10;
            for (a, b) in sm.iter().zip(&sp) {
                assert!((a - b).abs() <= bound);
            }
        }
    }

    #[test]
    fn pinv_diagonal() {
        let m = DenseMatrix::from_vec(2, 2, vec![2.0, 0.0, 0.0, 0.0]).unwrap();
        let p = pinv(&m, None).unwrap();
        assert!((p.get(0, 0) - 0.5).abs() < 1e-14);
        assert_eq!(p.get(1, 1), 0.0);
    }

    #[test]
    fn pinv_orthonormal_columns_is_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let m = orthonormalize_columns(&random_matrix(7, 3, &mut rng)).unwrap();
        let p = pinv(&m, None).unwrap();
        let diff = p.sub(&m.transpose()).unwrap().frob_norm();
        assert!(diff < 1e-10, "pinv vs transpose deviation {diff}");
    }

    #[test]
    fn pinv_full_rank_left_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let m = random_matrix(5, 3, &mut rng);
        let p = pinv(&m, None).unwrap();
        let prod = p.matmul(&m).unwrap();
        let diff = prod.sub(&DenseMatrix::identity(3)).unwrap().frob_norm();
        assert!(diff < 1e-9, "M+ M deviation from identity: {diff}");
    }

    #[test]
    fn pinv_zero_matrix_is_zero() {
        let p = pinv(&DenseMatrix::zeros(3, 2), None).unwrap();
        assert_eq!(p.rows(), 2);
        assert_eq!(p.cols(), 3);
        assert!(p.data().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn pinv_rejects_bad_tolerance() {
        let m = DenseMatrix::identity(2);
        assert!(matches!(
            pinv(&m, Some(1.5)),
            Err(LinalgError::InvalidTolerance { .. })
        ));
        assert!(matches!(
            pinv(&m, Some(0.0)),
            Err(LinalgError::InvalidTolerance { .. })
        ));
    }

    #[test]
    fn penrose_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..10 {
            let m = random_matrix(10, 6, &mut rng);
            let p = pinv(&m, None).unwrap();
            let scale = m.frob_norm().max(p.frob_norm());
            let mpm = m.matmul(&p).unwrap().matmul(&m).unwrap();
            assert!(mpm.sub(&m).unwrap().frob_norm() < 1e-9 * scale);
            let pmp = p.matmul(&m).unwrap().matmul(&p).unwrap();
            assert!(pmp.sub(&p).unwrap().frob_norm() < 1e-9 * scale);
            let mp = m.matmul(&p).unwrap();
            assert!(mp.sub(&mp.transpose()).unwrap().frob_norm() < 1e-9 * scale);
            let pm = p.matmul(&m).unwrap();
            assert!(pm.sub(&pm.transpose()).unwrap().frob_norm() < 1e-9 * scale);
        }
    }

    #[test]
    fn norms_and_products() {
        assert!((DenseMatrix::identity(9).frob_norm() - 3.0).abs() < 1e-15);
        let d = DenseMatrix::from_vec(2, 2, vec![3.0, 0.0, 0.0, 4.0]).unwrap();
        assert!((spectral_norm(&d).unwrap() - 4.0).abs() < 1e-12);
        assert_eq!(inf_norm_vec(&[1.0, -5.0, 2.0]), 5.0);
        // hand-computed 2x2 product
        let a = DenseMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = DenseMatrix::from_vec(2, 2, vec![5.0, 6.0, 7.0, 8.0]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn from_vec_validates() {
        assert!(matches!(
            DenseMatrix::from_vec(2, 2, vec![1.0; 3]),
            Err(LinalgError::InvalidShape { .. })
        ));
        assert!(matches!(
            DenseMatrix::from_vec(1, 2, vec![1.0, f64::NAN]),
            Err(LinalgError::NonFinite { index: 1 })
        ));
    }
}
