//! Two-stage importance-sampling sketch of the dominant right singular
//! subspace.
//!
//! Given the sample model of `C` (m x (n+1)), the sketch draws `p` rows with
//! probability proportional to squared row norms and rescales them into `S`,
//! then draws `p` columns of `S` through the row-mixture distribution and
//! rescales them into the p x p core `W`. The SVD of `W` supplies retained
//! singular values and left vectors, and `V_hat = S^T U_bar Sigma_bar^{-1}`
//! approximates the leading right singular vectors of `C`. Rescaling keeps
//! the Frobenius chain `||C||_F = ||S||_F = ||W||_F` exact up to rounding.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec::Vec;
use rand_core::RngCore;
use thiserror::Error;

use crate::dense::{svd, DenseMatrix, LinalgError};
use crate::randutil::uniform_index;
use crate::sample_model::{SampleError, SampleMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SketchError {
    #[error("accuracy target epsilon must be positive, got {0}")]
    BadEpsilon(f64),
    #[error("target rank k must be at least 1")]
    BadRank,
    #[error("failure probability delta must lie in (0, 1), got {0}")]
    BadDelta(f64),
    #[error("sketch size p must be at least 1")]
    BadSketchSize,
    #[error("input matrix has zero Frobenius norm")]
    ZeroMatrix,
    #[error("sampled index {index} out of range for {len}")]
    BadIndex { index: usize, len: usize },
    #[error("degenerate sketch: no singular value reaches the threshold {threshold}")]
    DegenerateSketch { threshold: f64 },
    #[error("retained singular value sigma_bar[{index}] is zero; cannot invert")]
    ZeroRetainedSigma { index: usize },
    #[error("sample model: {0}")]
    Sample(#[from] SampleError),
    #[error("dense kernel: {0}")]
    Linalg(#[from] LinalgError),
}

/// Which constant scales the truncation threshold `alpha = xi / (c k^4)`.
///
/// The algorithm statement uses `c = 100`; the accompanying analysis carries
/// `c = 16` through its estimates. Both are kept selectable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaConstant {
    /// `alpha = xi / (100 k^4)` (default).
    Algorithm,
    /// `alpha = xi / (16 k^4)`, matching the error analysis.
    Analysis,
}

impl AlphaConstant {
    fn coefficient(self) -> f64 {
        match self {
            AlphaConstant::Algorithm => 100.0,
            AlphaConstant::Analysis => 16.0,
        }
    }
}

/// Sketch sizes above this are refused without an explicit override; the
/// theoretical `p` is astronomically large for interesting accuracy targets.
pub const DEFAULT_FEASIBILITY_CAP: f64 = 1e7;

/// User inputs plus the derived parameter cascade:
/// `xi = eps/(2 eps + 4)`, `alpha = xi/(c k^4)`, `theta = alpha xi`,
/// `p = ceil(1/(theta^2 delta))`.
#[derive(Debug, Clone, PartialEq)]
pub struct QiSvdParams {
    pub epsilon: f64,
    pub k: usize,
    pub delta: f64,
    pub xi: f64,
    pub alpha: f64,
    pub theta: f64,
    /// Theoretical sketch size, kept as a float since it routinely exceeds
    /// any representable allocation.
    pub p_theory: f64,
    /// Sketch size actually used.
    pub p_used: usize,
    /// Set when `p_theory` exceeded the feasibility cap.
    pub feasibility_warning: Option<FeasibilityWarning>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityWarning {
    pub p_theory: f64,
    pub cap: f64,
}

/// Derives the parameter cascade with the default constant and cap.
pub fn derive_params(
    epsilon: f64,
    k: usize,
    delta: f64,
    p_override: Option<usize>,
) -> Result<QiSvdParams, SketchError> {
    derive_params_full(
        epsilon,
        k,
        delta,
        p_override,
        AlphaConstant::Algorithm,
        DEFAULT_FEASIBILITY_CAP,
    )
}

pub fn derive_params_full(
    epsilon: f64,
    k: usize,
    delta: f64,
    p_override: Option<usize>,
    alpha_constant: AlphaConstant,
    feasibility_cap: f64,
) -> Result<QiSvdParams, SketchError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(SketchError::BadEpsilon(epsilon));
    }
    if k == 0 {
        return Err(SketchError::BadRank);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(SketchError::BadDelta(delta));
    }
    let xi = epsilon / (2.0 * epsilon + 4.0);
    let kf = k as f64;
    let alpha = xi / (alpha_constant.coefficient() * kf * kf * kf * kf);
    let theta = alpha * xi;
    let p_theory = (1.0 / (theta * theta * delta)).ceil();
    let feasibility_warning = (p_theory > feasibility_cap).then_some(FeasibilityWarning {
        p_theory,
        cap: feasibility_cap,
    });
    let p_used = match p_override {
        Some(0) => return Err(SketchError::BadSketchSize),
        Some(p) => p,
        None => {
            if p_theory > feasibility_cap {
                return Err(SketchError::BadSketchSize);
            }
            p_theory as usize
        }
    };
    Ok(QiSvdParams {
        epsilon,
        k,
        delta,
        xi,
        alpha,
        theta,
        p_theory,
        p_used,
        feasibility_warning,
    })
}

/// Sampled rows: indices with their draw probabilities, and the rescaled
/// p x (n+1) matrix `S` with `S_t = C_{i_t} / sqrt(p P_{i_t})`.
#[derive(Debug, Clone)]
pub struct RowSample {
    pub indices: Vec<usize>,
    pub probs: Vec<f64>,
    pub s: DenseMatrix,
}

/// Sampled columns: indices with their (exact) mixture probabilities, and
/// the rescaled p x p core `W` with `W_{:,t} = S_{:,j_t} / sqrt(p P'_{j_t})`.
#[derive(Debug, Clone)]
pub struct ColSample {
    pub indices: Vec<usize>,
    pub probs: Vec<f64>,
    pub w: DenseMatrix,
}

#[derive(Debug, Clone)]
pub struct SketchState {
    pub rows: RowSample,
    pub cols: ColSample,
}

/// Draws `p` row indices independently from the row-norm distribution and
/// materializes `S`. Duplicates are kept; sampling is with replacement.
pub fn sample_rows<R: RngCore + ?Sized>(
    c: &SampleMatrix,
    p: usize,
    rng: &mut R,
) -> Result<RowSample, SketchError> {
    if p == 0 {
        return Err(SketchError::BadSketchSize);
    }
    let frob_sq = c.frob_sq();
    if !(frob_sq > 0.0) {
        return Err(SketchError::ZeroMatrix);
    }
    let indices: Vec<usize> = (0..p)
        .map(|_| c.sample_row(rng))
        .collect::<Result<_, _>>()?;
    build_row_sample(c, indices)
}

fn build_row_sample(c: &SampleMatrix, indices: Vec<usize>) -> Result<RowSample, SketchError> {
    let p = indices.len();
    let frob_sq = c.frob_sq();
    let mut probs = Vec::with_capacity(p);
    let mut s = DenseMatrix::zeros(p, c.cols());
    for (t, &i) in indices.iter().enumerate() {
        if i >= c.rows() {
            return Err(SketchError::BadIndex {
                index: i,
                len: c.rows(),
            });
        }
        let p_i = c.row_norm_sq(i)? / frob_sq;
        if !(p_i > 0.0) {
            return Err(SketchError::ZeroMatrix);
        }
        probs.push(p_i);
        let scale = 1.0 / (p as f64 * p_i).sqrt();
        for j in 0..c.cols() {
            s.set(t, j, c.get(i, j)? * scale);
        }
    }
    Ok(RowSample { indices, probs, s })
}

/// Draws `p` column indices from the mixture `P'_j = sum_t D_{C_{i_t}}(j)/p`
/// (realized as: pick `t` uniformly, then sample within row `i_t`), and
/// materializes `W`. The rescaling probability is evaluated exactly through
/// the identity `P'_j = ||S_{:,j}||^2 / ||S||_F^2`.
pub fn sample_cols<R: RngCore + ?Sized>(
    c: &SampleMatrix,
    rows: &RowSample,
    rng: &mut R,
) -> Result<ColSample, SketchError> {
    let p = rows.indices.len();
    let indices: Vec<usize> = (0..p)
        .map(|_| {
            let t = uniform_index(rng, p);
            c.sample_in_row(rows.indices[t], rng)
        })
        .collect::<Result<_, _>>()?;
    build_col_sample(rows, indices)
}

fn build_col_sample(rows: &RowSample, indices: Vec<usize>) -> Result<ColSample, SketchError> {
    let s = &rows.s;
    let p = rows.indices.len();
    let cols = s.cols();
    let mut col_norm_sq = alloc::vec![0.0f64; cols];
    let mut s_frob_sq = 0.0;
    for t in 0..p {
        for (j, acc) in col_norm_sq.iter_mut().enumerate() {
            let x = s.get(t, j);
            *acc += x * x;
            s_frob_sq += x * x;
        }
    }
    if !(s_frob_sq > 0.0) {
        return Err(SketchError::ZeroMatrix);
    }
    let mut probs = Vec::with_capacity(p);
    let mut w = DenseMatrix::zeros(p, p);
    for (t, &j) in indices.iter().enumerate() {
        if j >= cols {
            return Err(SketchError::BadIndex {
                index: j,
                len: cols,
            });
        }
        let p_j = col_norm_sq[j] / s_frob_sq;
        if !(p_j > 0.0) {
            return Err(SketchError::ZeroMatrix);
        }
        probs.push(p_j);
        let scale = 1.0 / (p as f64 * p_j).sqrt();
        for i in 0..p {
            w.set(i, t, s.get(i, j) * scale);
        }
    }
    Ok(ColSample { indices, probs, w })
}

/// Builds the sketch from caller-chosen indices. This is the deterministic
/// seam used by tests and audits to force exhaustive enumeration of rows and
/// columns; the rescaling is identical to the sampled path.
pub fn sketch_from_indices(
    c: &SampleMatrix,
    row_indices: &[usize],
    col_indices: &[usize],
) -> Result<SketchState, SketchError> {
    if row_indices.is_empty() || col_indices.len() != row_indices.len() {
        return Err(SketchError::BadSketchSize);
    }
    if !(c.frob_sq() > 0.0) {
        return Err(SketchError::ZeroMatrix);
    }
    let rows = build_row_sample(c, row_indices.to_vec())?;
    let cols = build_col_sample(&rows, col_indices.to_vec())?;
    Ok(SketchState { rows, cols })
}

/// Truncation rank `l = min(k, max{t : sigma_bar_t^2 >= alpha ||W||_F^2})`.
pub fn truncation_rank(
    sigma_bar: &[f64],
    k: usize,
    alpha: f64,
    frob_sq_w: f64,
) -> Result<usize, SketchError> {
    let threshold = alpha * frob_sq_w;
    debug_assert!(sigma_bar.windows(2).all(|w| w[0] >= w[1]));
    let t_max = sigma_bar
        .iter()
        .rposition(|&s| s * s >= threshold)
        .map(|t| t + 1);
    match t_max {
        Some(t) => Ok(t.min(k)),
        None => Err(SketchError::DegenerateSketch { threshold }),
    }
}

/// Sketch output: the approximate right singular matrix with diagnostics.
#[derive(Debug, Clone)]
pub struct ApproxRightSingular {
    /// `(n+1) x l` approximate right singular vectors.
    pub v_hat: DenseMatrix,
    /// Retained singular values of the core, nonincreasing, length `l`.
    pub sigma_bar: Vec<f64>,
    pub l: usize,
    /// `||V_hat^T V_hat - I||_F`.
    pub gram_dev_frob: f64,
    /// `xi` the sketch ran with, for bound checks downstream.
    pub xi: f64,
}

/// `V_hat = S^T U_bar Sigma_bar^{-1}` over the `l` retained triplets.
pub fn assemble_v_hat(
    s: &DenseMatrix,
    u_bar: &DenseMatrix,
    sigma_bar: &[f64],
    l: usize,
    xi: f64,
) -> Result<ApproxRightSingular, SketchError> {
    if l == 0 || l > sigma_bar.len() || l > u_bar.cols() {
        return Err(SketchError::BadSketchSize);
    }
    if let Some(index) = sigma_bar[..l].iter().position(|&s| !(s > 0.0)) {
        return Err(SketchError::ZeroRetainedSigma { index });
    }
    let n1 = s.cols();
    let p = s.rows();
    let mut v_hat = DenseMatrix::zeros(n1, l);
    for j in 0..n1 {
        for (t, &sig) in sigma_bar[..l].iter().enumerate() {
            let mut acc = 0.0;
            for i in 0..p {
                acc += s.get(i, j) * u_bar.get(i, t);
            }
            v_hat.set(j, t, acc / sig);
        }
    }
    let gram_dev_frob = gram_deviation_frob(&v_hat);
    Ok(ApproxRightSingular {
        v_hat,
        sigma_bar: sigma_bar[..l].to_vec(),
        l,
        gram_dev_frob,
        xi,
    })
}

fn gram_deviation_frob(m: &DenseMatrix) -> f64 {
    let g = m.transpose().matmul(m).expect("shapes agree");
    let mut acc = 0.0;
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { 1.0 } else { 0.0 };
            let d = g.get(i, j) - target;
            acc += d * d;
        }
    }
    acc.sqrt()
}

/// The full pipeline: sample rows, sample columns, SVD the core, select the
/// truncation rank, assemble `V_hat`. Deterministic given `(c, params, rng)`.
pub fn qisvd<R: RngCore + ?Sized>(
    c: &SampleMatrix,
    params: &QiSvdParams,
    rng: &mut R,
) -> Result<ApproxRightSingular, SketchError> {
    let rows = sample_rows(c, params.p_used, rng)?;
    let cols = sample_cols(c, &rows, rng)?;
    qisvd_from_sketch(&rows, &cols, params)
}

/// The deterministic tail of the pipeline, reusable with forced sketches.
pub fn qisvd_from_sketch(
    rows: &RowSample,
    cols: &ColSample,
    params: &QiSvdParams,
) -> Result<ApproxRightSingular, SketchError> {
    let w_frob = cols.w.frob_norm();
    let factors = svd(&cols.w)?;
    let l = truncation_rank(&factors.sigma, params.k, params.alpha, w_frob * w_frob)?;
    assemble_v_hat(&rows.s, &factors.u, &factors.sigma, l, params.xi)
}

/// Deviation report for the near-orthonormality bundle:
/// `||V^T V - I||` in spectral and Frobenius norms, `||V||_F^2`, `||V||_2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthoReport {
    pub gram_dev_spectral: f64,
    pub gram_dev_frob: f64,
    pub frob_sq: f64,
    pub spectral: f64,
}

pub fn vhat_orthogonality_report(v_hat: &DenseMatrix) -> Result<OrthoReport, SketchError> {
    let gram = v_hat.transpose().matmul(v_hat)?;
    let dev = gram.sub(&DenseMatrix::identity(gram.rows()))?;
    let gram_dev_spectral = crate::dense::spectral_norm(&dev)?;
    let gram_dev_frob = dev.frob_norm();
    let frob = v_hat.frob_norm();
    let spectral = crate::dense::spectral_norm(v_hat)?;
    Ok(OrthoReport {
        gram_dev_spectral,
        gram_dev_frob,
        frob_sq: frob * frob,
        spectral,
    })
}
