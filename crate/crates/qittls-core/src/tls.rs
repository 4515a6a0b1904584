//! Total least squares solvers and error-bound evaluators.
//!
//! All four solvers work off the right singular vectors of the augmented
//! matrix `C = [A, b]`. Classical TLS takes the last one; the truncated
//! family keeps the leading `d`, partitions them as `[V11; v21]`, and forms
//! `x = (V11^T)^+ v21^T`. The quantum-inspired variant feeds the sketched
//! `V_hat` through the same partition; the randomized comparator uses a
//! Gaussian range finder with one power iteration.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::vec::Vec;
use rand_core::RngCore;
use thiserror::Error;

use crate::dense::{
    norm2_vec, orthonormalize_columns, svd, DenseMatrix, LinalgError, SvdFactors,
};
use crate::qisvd::{qisvd, QiSvdParams, SketchError};
use crate::randutil::unit_uniform;
use crate::sample_model::{SampleError, SampleMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("system must have at least as many rows as unknowns ({rows} < {cols})")]
    Underdetermined { rows: usize, cols: usize },
    #[error("right-hand side length {got} does not match {rows} rows")]
    RhsMismatch { rows: usize, got: usize },
    #[error("truncation d = {d} outside [1, {max}]")]
    BadTruncation { d: usize, max: usize },
    #[error("nongeneric problem: sigma_n(A) = {sigma_a_n} <= sigma_{{n+1}}(C) = {sigma_c_last}")]
    NonGeneric { sigma_a_n: f64, sigma_c_last: f64 },
    #[error("last component of the trailing singular vector is numerically zero (v22 = {v22})")]
    VanishingLastComponent { v22: f64 },
    #[error("truncation d = {d} exceeds the sketch rank l = {l}")]
    TruncationExceedsSketchRank { d: usize, l: usize },
    #[error("V11 block numerically rank deficient: tau_d = {tau_d} at tolerance {tol}")]
    RankDeficientBlock { tau_d: f64, tol: f64 },
    #[error("sketch size {sketch_size} outside [d = {d}, n+1 = {max}]")]
    BadSketchSize {
        sketch_size: usize,
        d: usize,
        max: usize,
    },
    #[error("subspace parameter q = {q} outside [1, {max}]")]
    BadSubspaceIndex { q: usize, max: usize },
    #[error("dense kernel: {0}")]
    Linalg(#[from] LinalgError),
    #[error("sketch: {0}")]
    Sketch(#[from] SketchError),
    #[error("sample model: {0}")]
    Sample(#[from] SampleError),
}

/// Which solver produced a [`TtlsSolution`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Tls,
    Ttls,
    QiTtls,
    RTtls,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Tls => "TLS",
            Method::Ttls => "TTLS",
            Method::QiTtls => "QiTTLS",
            Method::RTtls => "RTTLS",
        }
    }
}

impl core::fmt::Display for Method {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// Solution vector plus provenance and diagnostics.
#[derive(Debug, Clone)]
pub struct TtlsSolution {
    pub x: Vec<f64>,
    pub method: Method,
    /// Truncation parameter used (`n` for classical TLS).
    pub d: usize,
    /// Smallest singular value of the `V11` block (truncated family).
    pub tau_d: Option<f64>,
    /// Last component of the trailing right singular vector (TLS only).
    pub v22: Option<f64>,
    /// Genericity verdict, recorded by classical TLS.
    pub generic: Option<bool>,
    /// Set when `V11` fell below the pseudoinverse tolerance but a solution
    /// was still formed.
    pub rank_warning: bool,
    /// Wall time of the solver call, filled in by harnesses; the solvers
    /// themselves never measure time.
    pub wall_time: Option<core::time::Duration>,
}

/// Builds `C = [A, b]`.
pub fn augmented(a: &DenseMatrix, b: &[f64]) -> Result<DenseMatrix, SolveError> {
    if b.len() != a.rows() {
        return Err(SolveError::RhsMismatch {
            rows: a.rows(),
            got: b.len(),
        });
    }
    Ok(DenseMatrix::from_fn(a.rows(), a.cols() + 1, |i, j| {
        if j < a.cols() {
            a.get(i, j)
        } else {
            b[i]
        }
    }))
}

/// Singular values of `C = [A, b]`, padded with the structural zeros to
/// n+1 entries. Truncation parameters are always caller-supplied; this is
/// the profile a caller inspects to pick one.
pub fn singular_profile(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>, SolveError> {
    let f = svd(&augmented(a, b)?)?;
    Ok((0..a.cols() + 1).map(|i| f.sigma_or_zero(i)).collect())
}

fn check_shape(a: &DenseMatrix, b: &[f64]) -> Result<(usize, usize), SolveError> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(SolveError::Underdetermined { rows: m, cols: n });
    }
    if b.len() != m {
        return Err(SolveError::RhsMismatch { rows: m, got: b.len() });
    }
    Ok((m, n))
}

/// Classical TLS through the full SVD of `C`: `x = -v12 / v22`.
///
/// Requires the genericity condition `sigma_n(A) > sigma_{n+1}(C)`.
pub fn tls_solve(a: &DenseMatrix, b: &[f64]) -> Result<TtlsSolution, SolveError> {
    let (_, n) = check_shape(a, b)?;
    let c = augmented(a, b)?;
    let cf = svd(&c)?;
    let af = svd(a)?;
    let sigma_a_n = af.sigma[n - 1];
    let sigma_c_last = cf.sigma_or_zero(n);
    if !(sigma_a_n > sigma_c_last) {
        return Err(SolveError::NonGeneric {
            sigma_a_n,
            sigma_c_last,
        });
    }
    let v22 = cf.v.get(n, n);
    if v22.abs() < 1e-12 {
        return Err(SolveError::VanishingLastComponent { v22 });
    }
    let x = (0..n).map(|i| -cf.v.get(i, n) / v22).collect();
    Ok(TtlsSolution {
        x,
        method: Method::Tls,
        d: n,
        tau_d: None,
        v22: Some(v22),
        generic: Some(true),
        rank_warning: false,
        wall_time: None,
    })
}

/// Shared partition step: `V11 = V[0..n, 0..d]`, `v21 = V[n, 0..d]`,
/// `x = (V11^T)^+ v21^T`. Returns `(x, tau_d, rank_warning)`.
///
/// `strict` turns a rank-deficient `V11` into an error instead of a warning.
fn partition_solve(
    v: &DenseMatrix,
    n: usize,
    d: usize,
    strict: bool,
) -> Result<(Vec<f64>, f64, bool), SolveError> {
    debug_assert!(v.rows() == n + 1 && d <= v.cols());
    let v11 = DenseMatrix::from_fn(n, d, |i, j| v.get(i, j));
    let v21: Vec<f64> = (0..d).map(|j| v.get(n, j)).collect();
    let f = svd(&v11)?;
    let tau_d = f.sigma.last().copied().unwrap_or(0.0);
    let sigma_max = f.sigma.first().copied().unwrap_or(0.0);
    let tol = n.max(d) as f64 * f64::EPSILON * sigma_max;
    let deficient = !(tau_d > tol);
    if deficient && strict {
        return Err(SolveError::RankDeficientBlock { tau_d, tol });
    }
    // x = (V11^T)^+ v21^T = U_f Sigma^+ V_f^T v21, truncated at tol
    let mut w = alloc::vec![0.0f64; d];
    for (k, wk) in w.iter_mut().enumerate() {
        let mut acc = 0.0;
        for t in 0..d {
            acc += f.v.get(t, k) * v21[t];
        }
        let s = f.sigma.get(k).copied().unwrap_or(0.0);
        *wk = if s > tol { acc / s } else { 0.0 };
    }
    let mut x = alloc::vec![0.0f64; n];
    for (i, xi) in x.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, wk) in w.iter().enumerate().take(f.u.cols()) {
            acc += f.u.get(i, k) * wk;
        }
        *xi = acc;
    }
    Ok((x, tau_d, deficient))
}

/// Truncated TLS from an already computed SVD of `C`.
pub fn ttls_from_svd(cf: &SvdFactors, n: usize, d: usize) -> Result<TtlsSolution, SolveError> {
    if d == 0 || d > n {
        return Err(SolveError::BadTruncation { d, max: n });
    }
    let (x, tau_d, warn) = partition_solve(&cf.v, n, d, false)?;
    Ok(TtlsSolution {
        x,
        method: Method::Ttls,
        d,
        tau_d: Some(tau_d),
        v22: None,
        generic: None,
        rank_warning: warn,
        wall_time: None,
    })
}

/// Truncated TLS: exact SVD of `C`, then the `d`-column partition.
pub fn ttls_solve(a: &DenseMatrix, b: &[f64], d: usize) -> Result<TtlsSolution, SolveError> {
    let (_, n) = check_shape(a, b)?;
    if d == 0 || d > n {
        return Err(SolveError::BadTruncation { d, max: n });
    }
    let cf = svd(&augmented(a, b)?)?;
    ttls_from_svd(&cf, n, d)
}

/// Quantum-inspired TTLS: sketch `C` through its sample model, then apply
/// the TTLS partition to the approximate right singular matrix.
pub fn qittls_solve<R: RngCore + ?Sized>(
    c_model: &SampleMatrix,
    params: &QiSvdParams,
    d: usize,
    rng: &mut R,
) -> Result<TtlsSolution, SolveError> {
    let n = c_model.cols() - 1;
    if d == 0 || d > n {
        return Err(SolveError::BadTruncation { d, max: n });
    }
    let approx = qisvd(c_model, params, rng)?;
    qittls_from_approx(&approx, n, d)
}

/// The deterministic tail of the quantum-inspired solver: partition an
/// already computed approximate right singular matrix. Lets audits drive the
/// solver with forced (e.g. exhaustive) sketches.
pub fn qittls_from_approx(
    approx: &crate::qisvd::ApproxRightSingular,
    n: usize,
    d: usize,
) -> Result<TtlsSolution, SolveError> {
    if d == 0 || d > n {
        return Err(SolveError::BadTruncation { d, max: n });
    }
    if d > approx.l {
        return Err(SolveError::TruncationExceedsSketchRank { d, l: approx.l });
    }
    let (x, tau_d, _) = partition_solve(&approx.v_hat, n, d, true)?;
    Ok(TtlsSolution {
        x,
        method: Method::QiTtls,
        d,
        tau_d: Some(tau_d),
        v22: None,
        generic: None,
        rank_warning: false,
        wall_time: None,
    })
}

/// Randomized-SVD TTLS comparator: Gaussian sketch of `C`, one power
/// iteration, orthonormalization, small SVD, then the same partition.
pub fn rttls_solve<R: RngCore + ?Sized>(
    a: &DenseMatrix,
    b: &[f64],
    d: usize,
    sketch_size: usize,
    rng: &mut R,
) -> Result<TtlsSolution, SolveError> {
    let (_, n) = check_shape(a, b)?;
    if d == 0 || d > n {
        return Err(SolveError::BadTruncation { d, max: n });
    }
    if sketch_size < d || sketch_size > n + 1 {
        return Err(SolveError::BadSketchSize {
            sketch_size,
            d,
            max: n + 1,
        });
    }
    let c = augmented(a, b)?;
    let omega = DenseMatrix::from_fn(n + 1, sketch_size, |_, _| standard_normal(rng));
    let q0 = orthonormalize_columns(&c.matmul(&omega)?)?;
    let z = c.transpose().matmul(&q0)?;
    let q = orthonormalize_columns(&c.matmul(&z)?)?;
    let small = q.transpose().matmul(&c)?;
    let f = svd(&small)?;
    let (x, tau_d, warn) = partition_solve(&f.v, n, d, false)?;
    Ok(TtlsSolution {
        x,
        method: Method::RTtls,
        d,
        tau_d: Some(tau_d),
        v22: None,
        generic: None,
        rank_warning: warn,
        wall_time: None,
    })
}

fn standard_normal<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller; kept dependency-free so the solver stays no_std.
    let mut u1 = unit_uniform(rng);
    while u1 == 0.0 {
        u1 = unit_uniform(rng);
    }
    let u2 = unit_uniform(rng);
    (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
}

/// Subspace error bound `eps_v = sqrt(40 k eps / eta) ||C||_F + xi` with
/// `eta` the minimum gap of consecutive squared singular values over the
/// leading `q` indices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceBound {
    pub epsilon_v: f64,
    /// `min_i (sigma_i^2 - sigma_{i+1}^2)` over `i in [q]`.
    pub eta: f64,
    /// Whether the hypothesis `eta >= 20 eps ||C||_F^2` holds.
    pub gap_ok: bool,
}

pub fn subspace_error_bound(
    c_svd: &SvdFactors,
    params: &QiSvdParams,
    q: usize,
) -> Result<SubspaceBound, SolveError> {
    let n = c_svd.v.rows() - 1;
    if q == 0 || q > n {
        return Err(SolveError::BadSubspaceIndex { q, max: n });
    }
    let frob_sq: f64 = c_svd.sigma.iter().map(|s| s * s).sum();
    let mut eta = f64::INFINITY;
    for i in 0..q {
        let gap = c_svd.sigma_or_zero(i).powi(2) - c_svd.sigma_or_zero(i + 1).powi(2);
        eta = eta.min(gap);
    }
    let gap_ok = eta >= 20.0 * params.epsilon * frob_sq && eta > 0.0;
    let epsilon_v = if eta > 0.0 {
        (40.0 * params.k as f64 * params.epsilon / eta).sqrt() * frob_sq.sqrt() + params.xi
    } else {
        f64::INFINITY
    };
    Ok(SubspaceBound {
        epsilon_v,
        eta,
        gap_ok,
    })
}

/// Evaluation of the relative solution-error bound
/// `((sqrt(2) eps_v + tau_d + 1) / (tau_d - eps_v)) * (2 sigma_1 / (||b|| - sigma_{d+1}))`
/// together with its hypothesis flags. Inapplicable bounds are reported as
/// infinite, never as errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub epsilon_v: f64,
    /// Minimum squared-singular-value gap, when a subspace bound was joined.
    pub eta: Option<f64>,
    pub gap_ok: Option<bool>,
    pub tau_d: f64,
    pub sigma_1: f64,
    pub sigma_d_plus_1: f64,
    pub b_norm: f64,
    /// `tau_d > eps_v`.
    pub tau_ok: bool,
    /// `||b||_2 > sigma_{d+1}`.
    pub b_ok: bool,
    pub rhs: f64,
    /// Measured `||x_TTLS - x_QiTTLS|| / ||x_TTLS||`, when joined.
    pub observed: Option<f64>,
}

impl BoundReport {
    /// All hypothesis flags that are known are true.
    pub fn hypothesis_ok(&self) -> bool {
        self.tau_ok && self.b_ok && self.gap_ok.unwrap_or(true)
    }

    pub fn with_gap(mut self, bound: &SubspaceBound) -> Self {
        self.eta = Some(bound.eta);
        self.gap_ok = Some(bound.gap_ok);
        self
    }

    pub fn with_observed(mut self, observed: f64) -> Self {
        self.observed = Some(observed);
        self
    }
}

pub fn solution_error_bound(
    c_svd: &SvdFactors,
    d: usize,
    epsilon_v: f64,
    tau_d: f64,
    b_norm: f64,
) -> BoundReport {
    let sigma_1 = c_svd.sigma_or_zero(0);
    let sigma_d_plus_1 = c_svd.sigma_or_zero(d);
    let tau_ok = tau_d > epsilon_v;
    let b_ok = b_norm > sigma_d_plus_1;
    let rhs = if tau_ok && b_ok && epsilon_v.is_finite() {
        (core::f64::consts::SQRT_2 * epsilon_v + tau_d + 1.0) / (tau_d - epsilon_v)
            * (2.0 * sigma_1 / (b_norm - sigma_d_plus_1))
    } else {
        f64::INFINITY
    };
    BoundReport {
        epsilon_v,
        eta: None,
        gap_ok: None,
        tau_d,
        sigma_1,
        sigma_d_plus_1,
        b_norm,
        tau_ok,
        b_ok,
        rhs,
        observed: None,
    }
}

/// Relative `l2` distance between two solutions; the standard observed
/// quantity joined against [`BoundReport::rhs`].
pub fn relative_l2_error(x: &[f64], x_ref: &[f64]) -> f64 {
    let diff: f64 = x
        .iter()
        .zip(x_ref)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    diff / norm2_vec(x_ref)
}
