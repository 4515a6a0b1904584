//! l2-norm sample models over vectors and matrices.
//!
//! A [`SampleVector`] keeps an implicit complete binary tree (padded to the
//! next power of two) whose leaves hold squared entries and whose internal
//! nodes hold the sum of their children, next to the raw signed values. That
//! gives O(log n) entry updates, O(1) squared-norm reads, and O(log n)
//! sampling of an index `i` with probability `v_i^2 / ||v||_2^2`.
//!
//! A [`SampleMatrix`] mirrors the structure both ways: per-row trees plus a
//! tree over row norms, and the same for columns, so rows can be drawn with
//! probability `||M_i||^2 / ||M||_F^2` and entries within a row with
//! probability `M_ij^2 / ||M_i||^2` (and the column-wise counterparts).
//!
//! Structures are immutable-for-sampling: concurrent readers (queries, norm
//! reads, sampling with caller-owned random streams) are safe through `&`,
//! mutation requires `&mut`. There is no internal locking or cached state.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec;
use alloc::vec::Vec;
use rand_core::RngCore;
use thiserror::Error;

use crate::randutil::unit_uniform;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SampleError {
    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteAt { row: usize, col: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("empty support: all weights are zero")]
    EmptySupport,
    #[error("length must be at least 1")]
    Empty,
}

/// Binary-tree sample model over a real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleVector {
    len: usize,
    cap: usize,
    /// Implicit tree, 1-indexed: `tree[1]` is the root, leaves start at `cap`.
    tree: Vec<f64>,
    values: Vec<f64>,
}

impl SampleVector {
    /// Builds the tree in O(n).
    pub fn build(values: &[f64]) -> Result<Self, SampleError> {
        if values.is_empty() {
            return Err(SampleError::Empty);
        }
        if let Some(index) = values.iter().position(|x| !x.is_finite()) {
            return Err(SampleError::NonFinite { index });
        }
        let mut sv = Self::from_weights_unchecked(values.len(), |i| values[i] * values[i]);
        sv.values.extend_from_slice(values);
        Ok(sv)
    }

    /// Internal: builds a tree whose leaf weights are given directly.
    /// `values` is left empty; callers that need it must fill it.
    fn from_weights_unchecked(len: usize, mut weight: impl FnMut(usize) -> f64) -> Self {
        let cap = len.next_power_of_two();
        let mut tree = vec![0.0; 2 * cap];
        for i in 0..len {
            tree[cap + i] = weight(i);
        }
        for k in (1..cap).rev() {
            tree[k] = tree[2 * k] + tree[2 * k + 1];
        }
        Self {
            len,
            cap,
            tree,
            values: Vec::with_capacity(len),
        }
    }

    /// Tree over externally maintained nonnegative weights (used for the
    /// row/column norm trees of [`SampleMatrix`], where the leaf weight is a
    /// squared norm copied verbatim rather than a value to be squared).
    fn from_weights(weights: &[f64]) -> Self {
        let mut sv = Self::from_weights_unchecked(weights.len(), |i| weights[i]);
        sv.values.extend(weights.iter().map(|w| w.sqrt()));
        sv
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Squared Euclidean norm, read off the root in O(1).
    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.tree[1]
    }

    /// Returns the stored entry.
    pub fn query(&self, i: usize) -> Result<f64, SampleError> {
        self.check(i)?;
        Ok(self.values[i])
    }

    /// Sets entry `i`, updating the leaf and all ancestors in O(log n).
    pub fn update(&mut self, i: usize, value: f64) -> Result<(), SampleError> {
        self.update_traced(i, value).map(|_| ())
    }

    /// As [`update`](Self::update), additionally reporting how many tree
    /// nodes were written (the complexity contract: at most
    /// `2 * (ceil(log2 n) + 1)`).
    pub fn update_traced(&mut self, i: usize, value: f64) -> Result<usize, SampleError> {
        self.check(i)?;
        if !value.is_finite() {
            return Err(SampleError::NonFinite { index: i });
        }
        self.values[i] = value;
        Ok(self.set_weight_traced(i, value * value))
    }

    /// Writes leaf weight `w` at position `i` and refreshes ancestors.
    fn set_weight_traced(&mut self, i: usize, w: f64) -> usize {
        let mut k = self.cap + i;
        self.tree[k] = w;
        let mut touched = 1;
        while k > 1 {
            k /= 2;
            self.tree[k] = self.tree[2 * k] + self.tree[2 * k + 1];
            touched += 1;
        }
        touched
    }

    /// Recomputes every node from the stored values.
    pub fn rebuild(&mut self) {
        for i in 0..self.len {
            self.tree[self.cap + i] = self.values[i] * self.values[i];
        }
        for i in self.len..self.cap {
            self.tree[self.cap + i] = 0.0;
        }
        for k in (1..self.cap).rev() {
            self.tree[k] = self.tree[2 * k] + self.tree[2 * k + 1];
        }
    }

    /// Draws index `i` with probability `v_i^2 / ||v||_2^2` in O(log n):
    /// one uniform draw scaled at the root, then a cumulative descent.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<usize, SampleError> {
        self.sample_traced(rng).map(|(i, _)| i)
    }

    /// As [`sample`](Self::sample), additionally reporting the number of
    /// tree nodes read during the descent.
    pub fn sample_traced<R: RngCore + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<(usize, usize), SampleError> {
        let root = self.tree[1];
        if !(root > 0.0) {
            return Err(SampleError::EmptySupport);
        }
        let mut target = unit_uniform(rng) * root;
        let mut k = 1usize;
        let mut touched = 1;
        while k < self.cap {
            let left = self.tree[2 * k];
            let right = self.tree[2 * k + 1];
            touched += 2;
            // Zero-sum subtrees are never entered, so the descent cannot land
            // on a padding leaf or a zero entry even at floating boundaries.
            if left <= 0.0 {
                k = 2 * k + 1;
            } else if right <= 0.0 {
                k = 2 * k;
            } else if target < left {
                k = 2 * k;
            } else {
                target -= left;
                k = 2 * k + 1;
            }
        }
        Ok((k - self.cap, touched))
    }

    /// Product of branch probabilities along the descent path to leaf `i`,
    /// i.e. the exact probability [`sample`](Self::sample) assigns to `i`.
    pub fn path_probability(&self, i: usize) -> Result<f64, SampleError> {
        self.check(i)?;
        let root = self.tree[1];
        if !(root > 0.0) {
            return Err(SampleError::EmptySupport);
        }
        let mut prob = 1.0;
        let mut k = self.cap + i;
        while k > 1 {
            let parent = self.tree[k / 2];
            if parent == 0.0 {
                return Ok(0.0);
            }
            prob *= self.tree[k] / parent;
            k /= 2;
        }
        Ok(prob)
    }

    /// Number of levels in the tree (root to leaf inclusive).
    pub fn height(&self) -> usize {
        self.cap.trailing_zeros() as usize + 1
    }

    fn check(&self, i: usize) -> Result<(), SampleError> {
        if i >= self.len {
            return Err(SampleError::IndexOutOfRange {
                index: i,
                len: self.len,
            });
        }
        Ok(())
    }
}

/// Row- and column-wise sample model over an `m x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    rows: usize,
    cols: usize,
    row_trees: Vec<SampleVector>,
    col_trees: Vec<SampleVector>,
    row_norms: SampleVector,
    col_norms: SampleVector,
}

impl SampleMatrix {
    /// Builds both mirrors from row-major data.
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self, SampleError> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(SampleError::Empty);
        }
        if let Some(index) = data.iter().position(|x| !x.is_finite()) {
            return Err(SampleError::NonFiniteAt {
                row: index / cols,
                col: index % cols,
            });
        }
        let row_trees: Vec<SampleVector> = (0..rows)
            .map(|i| SampleVector::build(&data[i * cols..(i + 1) * cols]).expect("validated"))
            .collect();
        let col_trees: Vec<SampleVector> = (0..cols)
            .map(|j| {
                let col: Vec<f64> = (0..rows).map(|i| data[i * cols + j]).collect();
                SampleVector::build(&col).expect("validated")
            })
            .collect();
        let row_weights: Vec<f64> = row_trees.iter().map(|t| t.norm_sq()).collect();
        let col_weights: Vec<f64> = col_trees.iter().map(|t| t.norm_sq()).collect();
        Ok(Self {
            rows,
            cols,
            row_trees,
            col_trees,
            row_norms: SampleVector::from_weights(&row_weights),
            col_norms: SampleVector::from_weights(&col_weights),
        })
    }

    pub fn from_dense(m: &crate::dense::DenseMatrix) -> Result<Self, SampleError> {
        Self::from_row_major(m.rows(), m.cols(), m.data())
    }

    pub fn to_dense(&self) -> crate::dense::DenseMatrix {
        crate::dense::DenseMatrix::from_fn(self.rows, self.cols, |i, j| {
            self.row_trees[i].values[j]
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Result<f64, SampleError> {
        self.check(i, j)?;
        self.row_trees[i].query(j)
    }

    /// Entry read through the column mirror; agrees with [`get`](Self::get)
    /// exactly.
    pub fn get_col_wise(&self, i: usize, j: usize) -> Result<f64, SampleError> {
        self.check(i, j)?;
        self.col_trees[j].query(i)
    }

    /// Updates one entry, touching O(log m + log n) nodes across both
    /// mirrors and both norm trees.
    pub fn set(&mut self, i: usize, j: usize, value: f64) -> Result<(), SampleError> {
        self.check(i, j)?;
        if !value.is_finite() {
            return Err(SampleError::NonFiniteAt { row: i, col: j });
        }
        self.row_trees[i].update(j, value)?;
        self.col_trees[j].update(i, value)?;
        // Norm-tree leaves copy the row/column roots verbatim, so the
        // invariant `row_tree(i).norm_sq == row_norms leaf i` holds exactly.
        let rw = self.row_trees[i].norm_sq();
        self.row_norms.values[i] = rw.sqrt();
        self.row_norms.set_weight_traced(i, rw);
        let cw = self.col_trees[j].norm_sq();
        self.col_norms.values[j] = cw.sqrt();
        self.col_norms.set_weight_traced(j, cw);
        Ok(())
    }

    /// Squared Frobenius norm in O(1).
    #[inline]
    pub fn frob_sq(&self) -> f64 {
        self.row_norms.norm_sq()
    }

    /// Squared Frobenius norm read from the column mirror.
    #[inline]
    pub fn frob_sq_col_wise(&self) -> f64 {
        self.col_norms.norm_sq()
    }

    pub fn row_norm_sq(&self, i: usize) -> Result<f64, SampleError> {
        if i >= self.rows {
            return Err(SampleError::IndexOutOfRange {
                index: i,
                len: self.rows,
            });
        }
        Ok(self.row_trees[i].norm_sq())
    }

    pub fn col_norm_sq(&self, j: usize) -> Result<f64, SampleError> {
        if j >= self.cols {
            return Err(SampleError::IndexOutOfRange {
                index: j,
                len: self.cols,
            });
        }
        Ok(self.col_trees[j].norm_sq())
    }

    /// Draws a row index with probability `||M_i||^2 / ||M||_F^2`.
    pub fn sample_row<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<usize, SampleError> {
        self.row_norms.sample(rng)
    }

    /// Draws a column index with probability `||M_:j||^2 / ||M||_F^2`.
    pub fn sample_col<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<usize, SampleError> {
        self.col_norms.sample(rng)
    }

    /// Draws a column index within row `i` with probability
    /// `M_ij^2 / ||M_i||^2`.
    pub fn sample_in_row<R: RngCore + ?Sized>(
        &self,
        i: usize,
        rng: &mut R,
    ) -> Result<usize, SampleError> {
        if i >= self.rows {
            return Err(SampleError::IndexOutOfRange {
                index: i,
                len: self.rows,
            });
        }
        self.row_trees[i].sample(rng)
    }

    /// Draws a row index within column `j` with probability
    /// `M_ij^2 / ||M_:j||^2`.
    pub fn sample_in_col<R: RngCore + ?Sized>(
        &self,
        j: usize,
        rng: &mut R,
    ) -> Result<usize, SampleError> {
        if j >= self.cols {
            return Err(SampleError::IndexOutOfRange {
                index: j,
                len: self.cols,
            });
        }
        self.col_trees[j].sample(rng)
    }

    pub fn row_tree(&self, i: usize) -> &SampleVector {
        &self.row_trees[i]
    }

    pub fn row_norm_tree(&self) -> &SampleVector {
        &self.row_norms
    }

    pub fn col_norm_tree(&self) -> &SampleVector {
        &self.col_norms
    }

    fn check(&self, i: usize, j: usize) -> Result<(), SampleError> {
        if i >= self.rows {
            return Err(SampleError::IndexOutOfRange {
                index: i,
                len: self.rows,
            });
        }
        if j >= self.cols {
            return Err(SampleError::IndexOutOfRange {
                index: j,
                len: self.cols,
            });
        }
        Ok(())
    }
}

/// Flat binary serialization of a [`SampleMatrix`].
///
/// Layout (little-endian throughout):
///
/// | offset | size | field                      |
/// |--------|------|----------------------------|
/// | 0      | 4    | magic `b"QSMX"`            |
/// | 4      | 4    | version, `u32` (currently 1) |
/// | 8      | 8    | `m`, `u64` row count       |
/// | 16     | 8    | `n`, `u64` column count    |
/// | 24     | 8mn  | entries, row-major `f64`   |
pub mod binary {
    use super::{SampleError, SampleMatrix};
    use alloc::vec::Vec;
    use thiserror::Error;

    pub const MAGIC: [u8; 4] = *b"QSMX";
    pub const VERSION: u32 = 1;
    pub const HEADER_LEN: usize = 24;

    #[derive(Debug, Error, Clone, PartialEq)]
    pub enum CodecError {
        #[error("input shorter than the {HEADER_LEN}-byte header")]
        Truncated,
        #[error("bad magic bytes")]
        BadMagic,
        #[error("unsupported version {0}")]
        BadVersion(u32),
        #[error("payload length {got} does not match {rows}x{cols} entries")]
        PayloadMismatch { rows: u64, cols: u64, got: usize },
        #[error("decoded matrix invalid: {0}")]
        Invalid(#[from] SampleError),
    }

    pub fn encode(m: &SampleMatrix) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 8 * m.rows() * m.cols());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(m.rows() as u64).to_le_bytes());
        out.extend_from_slice(&(m.cols() as u64).to_le_bytes());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                out.extend_from_slice(&m.get(i, j).expect("in range").to_le_bytes());
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<SampleMatrix, CodecError> {
        if bytes.len() < HEADER_LEN {
            return Err(CodecError::Truncated);
        }
        if bytes[0..4] != MAGIC {
            return Err(CodecError::BadMagic);
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
        if version != VERSION {
            return Err(CodecError::BadVersion(version));
        }
        let rows = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
        let cols = u64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
        let payload = &bytes[HEADER_LEN..];
        let expected = (rows as usize).checked_mul(cols as usize).map(|e| e * 8);
        if expected != Some(payload.len()) {
            return Err(CodecError::PayloadMismatch {
                rows,
                cols,
                got: payload.len(),
            });
        }
        let data: Vec<f64> = payload
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect();
        Ok(SampleMatrix::from_row_major(
            rows as usize,
            cols as usize,
            &data,
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::trial_stream;

    #[test]
    fn build_single_support() {
        let sv = SampleVector::build(&[0.0, 0.0, 3.0, 0.0]).unwrap();
        assert_eq!(sv.norm_sq(), 9.0);
        let mut rng = trial_stream(1, 0);
        for _ in 0..50 {
            assert_eq!(sv.sample(&mut rng).unwrap(), 2);
        }
    }

    #[test]
    fn build_distribution_by_path() {
        // (1, 2, 2): P = (1/9, 4/9, 4/9)
        let sv = SampleVector::build(&[1.0, 2.0, 2.0]).unwrap();
        assert_eq!(sv.norm_sq(), 9.0);
        let expected = [1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0];
        for (i, &p) in expected.iter().enumerate() {
            let got = sv.path_probability(i).unwrap();
            assert!((got - p).abs() <= 1e-12 * p, "index {i}: {got} vs {p}");
        }
    }

    #[test]
    fn uniform_vector_is_uniform() {
        let sv = SampleVector::build(&[1.0, 1.0, 1.0, 1.0]).unwrap();
        for i in 0..4 {
            assert!((sv.path_probability(i).unwrap() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn update_rescales_distribution() {
        let mut sv = SampleVector::build(&[1.0, 2.0, 2.0]).unwrap();
        sv.update(0, 0.0).unwrap();
        assert_eq!(sv.norm_sq(), 8.0);
        assert_eq!(sv.path_probability(0).unwrap(), 0.0);
        assert!((sv.path_probability(1).unwrap() - 0.5).abs() < 1e-15);
        assert!((sv.path_probability(2).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn update_to_same_value_is_identity() {
        let mut sv = SampleVector::build(&[1.0, 2.0, 2.0]).unwrap();
        let before = sv.clone();
        sv.update(1, 2.0).unwrap();
        assert_eq!(sv, before);
    }

    #[test]
    fn zeroing_sole_support_empties_distribution() {
        let mut sv = SampleVector::build(&[0.0, 7.0]).unwrap();
        sv.update(1, 0.0).unwrap();
        let mut rng = trial_stream(2, 0);
        assert_eq!(sv.sample(&mut rng), Err(SampleError::EmptySupport));
    }

    #[test]
    fn query_roundtrips_exactly() {
        let values = [0.1, -0.25, 0.0, 1e-7];
        let mut sv = SampleVector::build(&values).unwrap();
        for (i, &v) in values.iter().enumerate() {
            assert_eq!(sv.query(i).unwrap(), v);
        }
        sv.update(2, -3.5).unwrap();
        assert_eq!(sv.query(2).unwrap(), -3.5);
        assert!(matches!(
            sv.query(4),
            Err(SampleError::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn norm_examples() {
        assert_eq!(SampleVector::build(&[1.0, 2.0, 2.0]).unwrap().norm_sq(), 9.0);
        assert_eq!(SampleVector::build(&[0.0, 0.0]).unwrap().norm_sq(), 0.0);
        assert_eq!(SampleVector::build(&[1.0]).unwrap().norm_sq(), 1.0);
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            SampleVector::build(&[1.0, f64::INFINITY]),
            Err(SampleError::NonFinite { index: 1 })
        );
        let mut sv = SampleVector::build(&[1.0]).unwrap();
        assert_eq!(
            sv.update(0, f64::NAN),
            Err(SampleError::NonFinite { index: 0 })
        );
    }

    #[test]
    fn empirical_frequency_two_entries() {
        // (1, 1): frequency of index 0 within 3 standard errors of 0.5
        let sv = SampleVector::build(&[1.0, 1.0]).unwrap();
        let mut rng = trial_stream(3, 0);
        let n = 100_000;
        let mut hits = 0usize;
        for _ in 0..n {
            if sv.sample(&mut rng).unwrap() == 0 {
                hits += 1;
            }
        }
        let freq = hits as f64 / n as f64;
        let se = 0.5 / (n as f64).sqrt();
        assert!((freq - 0.5).abs() <= 3.0 * se, "freq {freq}");
    }

    #[test]
    fn touch_counts_logarithmic() {
        for n in [1usize, 2, 3, 5, 17, 100, 1000] {
            let values: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
            let mut sv = SampleVector::build(&values).unwrap();
            let bound = 2 * ((n as f64).log2().ceil() as usize + 1);
            let touched = sv.update_traced(n / 2, 2.5).unwrap();
            assert!(touched <= bound, "update touched {touched} > {bound} (n={n})");
            let mut rng = trial_stream(4, n as u64);
            let (_, touched) = sv.sample_traced(&mut rng).unwrap();
            assert!(touched <= bound, "sample touched {touched} > {bound} (n={n})");
        }
    }

    #[test]
    fn matrix_build_and_norms() {
        // [[1,2],[2,4]]: row norms (5, 20), ||M||_F^2 = 25
        let m = SampleMatrix::from_row_major(2, 2, &[1.0, 2.0, 2.0, 4.0]).unwrap();
        assert_eq!(m.frob_sq(), 25.0);
        assert_eq!(m.row_norm_sq(0).unwrap(), 5.0);
        assert_eq!(m.row_norm_sq(1).unwrap(), 20.0);
        assert_eq!(m.col_norm_sq(0).unwrap(), 5.0);
        assert_eq!(m.col_norm_sq(1).unwrap(), 20.0);
        let p0 = m.row_norm_tree().path_probability(0).unwrap();
        let p1 = m.row_norm_tree().path_probability(1).unwrap();
        assert!((p0 - 5.0 / 25.0).abs() < 1e-15);
        assert!((p1 - 20.0 / 25.0).abs() < 1e-15);
    }

    #[test]
    fn identity_matrix_examples() {
        let m = SampleMatrix::from_row_major(2, 2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert_eq!(m.frob_sq(), 2.0);
        assert_eq!(m.col_norm_sq(0).unwrap(), 1.0);
        assert_eq!(m.col_norm_sq(1).unwrap(), 1.0);
        for i in 0..2 {
            let p = m.row_norm_tree().path_probability(i).unwrap();
            assert!((p - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn single_nonzero_matrix_is_deterministic() {
        let m = SampleMatrix::from_row_major(3, 2, &[0.0, 0.0, 0.0, 4.0, 0.0, 0.0]).unwrap();
        let mut rng = trial_stream(5, 0);
        for _ in 0..20 {
            let i = m.sample_row(&mut rng).unwrap();
            assert_eq!(i, 1);
            assert_eq!(m.sample_in_row(i, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn in_row_distribution() {
        let m = SampleMatrix::from_row_major(1, 2, &[3.0, 4.0]).unwrap();
        let t = m.row_tree(0);
        assert!((t.path_probability(0).unwrap() - 9.0 / 25.0).abs() < 1e-15);
        assert!((t.path_probability(1).unwrap() - 16.0 / 25.0).abs() < 1e-15);
        // (0, 7): always column 1
        let m = SampleMatrix::from_row_major(1, 2, &[0.0, 7.0]).unwrap();
        let mut rng = trial_stream(6, 0);
        for _ in 0..20 {
            assert_eq!(m.sample_in_row(0, &mut rng).unwrap(), 1);
        }
    }

    #[test]
    fn zero_row_never_sampled() {
        let m = SampleMatrix::from_row_major(3, 2, &[1.0, 1.0, 0.0, 0.0, 2.0, 2.0]).unwrap();
        let mut rng = trial_stream(7, 0);
        for _ in 0..200 {
            assert_ne!(m.sample_row(&mut rng).unwrap(), 1);
        }
        assert_eq!(
            m.sample_in_row(1, &mut rng),
            Err(SampleError::EmptySupport)
        );
    }

    #[test]
    fn zero_matrix_sampling_errors() {
        let m = SampleMatrix::from_row_major(2, 2, &[0.0; 4]).unwrap();
        let mut rng = trial_stream(8, 0);
        assert_eq!(m.sample_row(&mut rng), Err(SampleError::EmptySupport));
        assert_eq!(m.sample_col(&mut rng), Err(SampleError::EmptySupport));
    }

    #[test]
    fn update_keeps_mirrors_consistent() {
        let mut m = SampleMatrix::from_row_major(2, 2, &[1.0, 0.0, 0.0, 1.0]).unwrap();
        m.set(0, 0, 0.0).unwrap();
        assert_eq!(m.frob_sq(), 1.0);
        assert_eq!(m.frob_sq_col_wise(), 1.0);
        assert_eq!(m.get(0, 0).unwrap(), 0.0);
        assert_eq!(m.get_col_wise(0, 0).unwrap(), 0.0);
        assert_eq!(m.row_norm_sq(0).unwrap(), 0.0);
        assert_eq!(m.col_norm_sq(0).unwrap(), 0.0);
    }

    #[test]
    fn norm_tree_leaves_match_row_roots_exactly() {
        let mut m =
            SampleMatrix::from_row_major(3, 3, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])
                .unwrap();
        m.set(1, 2, -2.75).unwrap();
        for i in 0..3 {
            let leaf = m.row_norm_tree().tree[m.row_norm_tree().cap + i];
            assert_eq!(leaf, m.row_tree(i).norm_sq());
        }
    }

    #[test]
    fn binary_roundtrip_is_exact() {
        let data = [1.5, -2.25, 0.0, 1e-17, 3.0, -4.0];
        let m = SampleMatrix::from_row_major(2, 3, &data).unwrap();
        let bytes = binary::encode(&m);
        assert_eq!(&bytes[0..4], b"QSMX");
        let back = binary::decode(&bytes).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn binary_rejects_corruption() {
        let m = SampleMatrix::from_row_major(1, 1, &[2.0]).unwrap();
        let bytes = binary::encode(&m);
        assert!(matches!(
            binary::decode(&bytes[..10]),
            Err(binary::CodecError::Truncated)
        ));
        let mut bad = bytes.clone();
        bad[0] = b'x';
        assert!(matches!(
            binary::decode(&bad),
            Err(binary::CodecError::BadMagic)
        ));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(
            binary::decode(&bad),
            Err(binary::CodecError::BadVersion(_))
        ));
        let mut bad = bytes;
        bad.pop();
        assert!(matches!(
            binary::decode(&bad),
            Err(binary::CodecError::PayloadMismatch { .. })
        ));
    }
}
