//! Quantum-inspired truncated total least squares (QiTTLS).
//!
//! This crate implements the classical data structures and solvers behind a
//! sketch-based TTLS pipeline for discrete ill-posed problems `Ax ≈ b`:
//!
//! * [`sample_model`] — binary-tree l2-norm sample models over vectors and
//!   matrices: O(log) entry updates, O(1) norm reads, and index sampling
//!   proportional to squared magnitudes.
//! * [`dense`] — small dense kernels: one-sided Jacobi SVD, Moore-Penrose
//!   pseudoinverse, norms and products. No external numerical dependencies.
//! * [`qisvd`] — the two-stage row/column importance-sampling sketch that
//!   approximates the dominant right singular subspace of the augmented
//!   matrix `C = [A, b]`.
//! * [`tls`] — classical TLS, truncated TLS, the quantum-inspired TTLS
//!   solver built on the sketch, a randomized-SVD comparator, and
//!   evaluators for the subspace / solution error bounds.
//! * [`problems`] — generators for the benchmark inputs: six Fredholm
//!   test problems, the relative-noise model, and a Prony linear-prediction
//!   system.
//!
//! The crate is `no_std` compatible (requires `alloc`); disable the default
//! `std` feature to build against `libm`.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod dense;
pub mod problems;
pub mod qisvd;
pub mod sample_model;
pub mod stream;
pub mod tls;

pub(crate) mod randutil;

pub use dense::{pinv, spectral_norm, svd, DenseMatrix, LinalgError, SvdFactors};
pub use problems::{ProblemError, ProblemKind, PronySpec, TestProblem};
pub use qisvd::{ApproxRightSingular, QiSvdParams, SketchError};
pub use sample_model::{SampleError, SampleMatrix, SampleVector};
pub use tls::{BoundReport, Method, SolveError, SubspaceBound, TtlsSolution};

// Re-exported so downstream code can drive the samplers without pinning its
// own copy of the RNG crates.
pub use rand_chacha;
pub use rand_core;
