//! Benchmark problem generators.
//!
//! Six square discretizations of first-kind Fredholm integral equations
//! (midpoint quadrature in `t`, collocation at the same midpoints in `s`),
//! the relative-noise model used by the benchmark sweeps, and a Hankel
//! linear-prediction system built from damped complex exponentials.
//!
//! Each generator documents its kernel, interval, quadrature rule, and the
//! exact solution it discretizes. `quadrature_rtol` records how well
//! `A x_true ≈ b` is expected to hold: zero-residual generators compute
//! `b = A x_true` directly, the others use a closed form for the right-hand
//! side and inherit the midpoint rule's O(h^2) error at the smallest
//! supported size.

#[cfg(not(feature = "std"))]
use num_traits::Float;

use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;
use rand_core::RngCore;
use thiserror::Error;

use crate::dense::{norm2_vec, svd, DenseMatrix, LinalgError};
use crate::randutil::unit_uniform;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("unknown problem name: {0}")]
    UnknownProblem(String),
    #[error("size m = {m} below the minimum {min}")]
    TooSmall { m: usize, min: usize },
    #[error("noise level must be nonnegative, got {0}")]
    BadEta(f64),
    #[error("reference vector has zero infinity norm")]
    ZeroReference,
    #[error("pole set is not closed under conjugation (pole {index})")]
    NonConjugatePoles { index: usize },
    #[error("residue {index} is zero")]
    ZeroResidue { index: usize },
    #[error("poles {i} and {j} coincide after exponentiation")]
    DuplicatePoles { i: usize, j: usize },
    #[error("need m >= n and m >= pole count; got m = {m}, n = {n}, poles = {poles}")]
    BadPronyShape { m: usize, n: usize, poles: usize },
    #[error("synthesized signal has imaginary residue {max_imag}; pole set inconsistent")]
    ComplexSignal { max_imag: f64 },
    #[error("generated system has numerical rank {got}, expected {expected}")]
    RankMismatch { expected: usize, got: usize },
    #[error("dense kernel: {0}")]
    Linalg(#[from] LinalgError),
}

/// The six Fredholm test problems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    Foxgood,
    Gravity,
    Heat,
    Phillips,
    Baart,
    Deriv2,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 6] = [
        ProblemKind::Foxgood,
        ProblemKind::Gravity,
        ProblemKind::Heat,
        ProblemKind::Phillips,
        ProblemKind::Baart,
        ProblemKind::Deriv2,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ProblemKind::Foxgood => "foxgood",
            ProblemKind::Gravity => "gravity",
            ProblemKind::Heat => "heat",
            ProblemKind::Phillips => "phillips",
            ProblemKind::Baart => "baart",
            ProblemKind::Deriv2 => "deriv2",
        }
    }

    pub fn parse(name: &str) -> Result<Self, ProblemError> {
        Self::ALL
            .into_iter()
            .find(|k| k.label() == name)
            .ok_or_else(|| ProblemError::UnknownProblem(name.into()))
    }
}

impl core::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// An exact (noise-free) test instance.
#[derive(Debug, Clone, PartialEq)]
pub struct TestProblem {
    pub name: String,
    /// Exact operator, m x n.
    pub a: DenseMatrix,
    /// Exact right-hand side, length m.
    pub b: Vec<f64>,
    /// Exact solution when the generator defines one.
    pub x_true: Option<Vec<f64>>,
    /// Documented bound on `||A x_true - b|| / ||b||` for this generator.
    pub quadrature_rtol: f64,
}

const MIN_SIZE: usize = 8;

/// Generates one of the six square `m x m` test problems.
pub fn gen_problem(kind: ProblemKind, m: usize) -> Result<TestProblem, ProblemError> {
    if m < MIN_SIZE {
        return Err(ProblemError::TooSmall { m, min: MIN_SIZE });
    }
    Ok(match kind {
        ProblemKind::Foxgood => foxgood(m),
        ProblemKind::Gravity => gravity(m),
        ProblemKind::Heat => heat(m),
        ProblemKind::Phillips => phillips(m),
        ProblemKind::Baart => baart(m),
        ProblemKind::Deriv2 => deriv2(m),
    })
}

fn midpoints(m: usize, lo: f64, hi: f64) -> (f64, Vec<f64>) {
    let h = (hi - lo) / m as f64;
    let pts = (0..m).map(|i| lo + (i as f64 + 0.5) * h).collect();
    (h, pts)
}

/// Severely ill-posed test problem: kernel `K(s,t) = sqrt(s^2 + t^2)` on
/// `[0,1]^2`, exact solution `f(t) = t`, right-hand side
/// `g(s) = ((1 + s^2)^{3/2} - s^3) / 3`.
fn foxgood(m: usize) -> TestProblem {
    let (h, pts) = midpoints(m, 0.0, 1.0);
    let a = DenseMatrix::from_fn(m, m, |i, j| h * (pts[i] * pts[i] + pts[j] * pts[j]).sqrt());
    let x: Vec<f64> = pts.clone();
    let b: Vec<f64> = pts
        .iter()
        .map(|&s| ((1.0 + s * s).powf(1.5) - s * s * s) / 3.0)
        .collect();
    TestProblem {
        name: "foxgood".into(),
        a,
        b,
        x_true: Some(x),
        quadrature_rtol: 1.5e-3,
    }
}

/// One-dimensional gravity surveying: kernel
/// `K(s,t) = d (d^2 + (s-t)^2)^{-3/2}` with depth `d = 0.25` on `[0,1]^2`,
/// exact solution `f(t) = sin(pi t) + 0.5 sin(2 pi t)`, `b = A x`.
fn gravity(m: usize) -> TestProblem {
    let depth = 0.25;
    let (h, pts) = midpoints(m, 0.0, 1.0);
    let a = DenseMatrix::from_fn(m, m, |i, j| {
        let dst = pts[i] - pts[j];
        h * depth / (depth * depth + dst * dst).powf(1.5)
    });
    let pi = core::f64::consts::PI;
    let x: Vec<f64> = pts
        .iter()
        .map(|&t| (pi * t).sin() + 0.5 * (2.0 * pi * t).sin())
        .collect();
    let b = a.mul_vec(&x).expect("shape");
    TestProblem {
        name: "gravity".into(),
        a,
        b,
        x_true: Some(x),
        quadrature_rtol: 1e-12,
    }
}

/// Inverse heat equation (Volterra first kind): convolution kernel
/// `k(t) = t^{-3/2} exp(-1/(4t)) / (2 sqrt(pi))` (unit conductivity) on
/// `[0,1]`, lower-triangular Toeplitz discretization, pulse-shaped exact
/// solution on the first half of the interval, `b = A x`.
fn heat(m: usize) -> TestProblem {
    let (h, pts) = midpoints(m, 0.0, 1.0);
    let c = h / (2.0 * core::f64::consts::PI.sqrt());
    let kernel: Vec<f64> = pts
        .iter()
        .map(|&t| c * t.powf(-1.5) * (-1.0 / (4.0 * t)).exp())
        .collect();
    let a = DenseMatrix::from_fn(m, m, |i, j| if i >= j { kernel[i - j] } else { 0.0 });
    let mut x = alloc::vec![0.0f64; m];
    for (i, xi) in x.iter_mut().enumerate().take(m / 2) {
        let ti = (i + 1) as f64 * 20.0 / m as f64;
        *xi = if ti < 2.0 {
            0.75 * ti * ti / 4.0
        } else if ti < 3.0 {
            0.75 + (ti - 2.0) * (3.0 - ti)
        } else {
            0.75 * (-(ti - 3.0) * 2.0).exp()
        };
    }
    let b = a.mul_vec(&x).expect("shape");
    TestProblem {
        name: "heat".into(),
        a,
        b,
        x_true: Some(x),
        quadrature_rtol: 1e-12,
    }
}

/// Phillips' famous test problem on `[-6, 6]`: kernel `K(s,t) = phi(s-t)`
/// with `phi(z) = 1 + cos(pi z / 3)` for `|z| < 3` (0 outside), exact
/// solution `f = phi`, right-hand side
/// `g(s) = (6 - |s|)(1 + cos(pi s/3)/2) + 9 sin(pi |s|/3) / (2 pi)`.
fn phillips(m: usize) -> TestProblem {
    let pi = core::f64::consts::PI;
    let phi = |z: f64| {
        if z.abs() < 3.0 {
            1.0 + (pi * z / 3.0).cos()
        } else {
            0.0
        }
    };
    let (h, pts) = midpoints(m, -6.0, 6.0);
    let a = DenseMatrix::from_fn(m, m, |i, j| h * phi(pts[i] - pts[j]));
    let x: Vec<f64> = pts.iter().map(|&t| phi(t)).collect();
    let b: Vec<f64> = pts
        .iter()
        .map(|&s| {
            (6.0 - s.abs()) * (1.0 + 0.5 * (pi * s / 3.0).cos())
                + 9.0 / (2.0 * pi) * (pi * s.abs() / 3.0).sin()
        })
        .collect();
    TestProblem {
        name: "phillips".into(),
        a,
        b,
        x_true: Some(x),
        quadrature_rtol: 1e-4,
    }
}

/// First-kind Fredholm equation with kernel `K(s,t) = exp(s cos t)`,
/// `s in [0, pi/2]`, `t in [0, pi]`, exact solution `f(t) = sin t`,
/// right-hand side `g(s) = 2 sinh(s) / s`.
fn baart(m: usize) -> TestProblem {
    let pi = core::f64::consts::PI;
    let (_, s_pts) = midpoints(m, 0.0, pi / 2.0);
    let (ht, t_pts) = midpoints(m, 0.0, pi);
    let a = DenseMatrix::from_fn(m, m, |i, j| ht * (s_pts[i] * t_pts[j].cos()).exp());
    let x: Vec<f64> = t_pts.iter().map(|&t| t.sin()).collect();
    let b: Vec<f64> = s_pts.iter().map(|&s| 2.0 * s.sinh() / s).collect();
    TestProblem {
        name: "baart".into(),
        a,
        b,
        x_true: Some(x),
        quadrature_rtol: 6e-3,
    }
}

/// Computation of the second derivative: Green's function kernel
/// `K(s,t) = s(t-1)` for `s < t`, `t(s-1)` otherwise, on `[0,1]^2`
/// (symmetric), exact solution `f(t) = t`, `g(s) = (s^3 - s) / 6`.
fn deriv2(m: usize) -> TestProblem {
    let (h, pts) = midpoints(m, 0.0, 1.0);
    let green = |s: f64, t: f64| if s < t { s * (t - 1.0) } else { t * (s - 1.0) };
    let a = DenseMatrix::from_fn(m, m, |i, j| h * green(pts[i], pts[j]));
    let x: Vec<f64> = pts.clone();
    let b: Vec<f64> = pts.iter().map(|&s| (s * s * s - s) / 6.0).collect();
    TestProblem {
        name: "deriv2".into(),
        a,
        b,
        x_true: Some(x),
        quadrature_rtol: 1.6e-2,
    }
}

/// Applies the relative noise model: `A = A~ + eta ||A~||_F G / ||G||_F`
/// and `b = b~ + eta ||b~||_2 z / ||z||_2`, with `G` and `z` filled with
/// i.i.d. uniform `[-1, 1]` draws (matrix first, row-major, then the
/// vector). `eta = 0` returns the exact data bit-identically.
pub fn add_noise<R: RngCore + ?Sized>(
    problem: &TestProblem,
    eta: f64,
    rng: &mut R,
) -> Result<(DenseMatrix, Vec<f64>), ProblemError> {
    if !(eta >= 0.0) || !eta.is_finite() {
        return Err(ProblemError::BadEta(eta));
    }
    if eta == 0.0 {
        return Ok((problem.a.clone(), problem.b.clone()));
    }
    let (m, n) = (problem.a.rows(), problem.a.cols());
    let g = DenseMatrix::from_fn(m, n, |_, _| 2.0 * unit_uniform(rng) - 1.0);
    let zeta: Vec<f64> = (0..m).map(|_| 2.0 * unit_uniform(rng) - 1.0).collect();
    let a_scale = eta * problem.a.frob_norm() / g.frob_norm();
    let noisy_a = DenseMatrix::from_fn(m, n, |i, j| problem.a.get(i, j) + a_scale * g.get(i, j));
    let b_scale = eta * norm2_vec(&problem.b) / norm2_vec(&zeta);
    let noisy_b = problem
        .b
        .iter()
        .zip(&zeta)
        .map(|(b, z)| b + b_scale * z)
        .collect();
    Ok((noisy_a, noisy_b))
}

/// Parameters of a Prony linear-prediction system.
///
/// The signal is `y_l = sum_j gamma_j z_j^l` with `z_j = exp(lambda_j t)`;
/// the system is the Hankel matrix `A[i][j] = y[i+j]` (m x n) with
/// right-hand side `b[i] = -y[n+i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PronySpec {
    pub poles: Vec<Complex64>,
    pub residues: Vec<Complex64>,
    pub t_step: f64,
    pub m: usize,
    pub n: usize,
}

impl PronySpec {
    /// The six damped-oscillator pole pairs (all residues 1) used by the
    /// frequency-estimation benchmark.
    pub fn six_pair_bank(m: usize, n: usize, t_step: f64) -> Self {
        let pairs = [
            (-0.082, 0.926),
            (-0.147, 2.874),
            (-0.188, 4.835),
            (-0.220, 6.800),
            (-0.247, 8.767),
            (-0.270, 10.733),
        ];
        let mut poles = Vec::with_capacity(12);
        for (re, im) in pairs {
            poles.push(Complex64::new(re, im));
            poles.push(Complex64::new(re, -im));
        }
        let residues = alloc::vec![Complex64::new(1.0, 0.0); 12];
        Self {
            poles,
            residues,
            t_step,
            m,
            n,
        }
    }
}

/// Generates the real Hankel system from a conjugate-closed pole set and
/// verifies `rank(A) = min(n, poles)` at the 1e-8 relative threshold.
///
/// The rank certificate works on the leading `min(n, poles + 8)` columns:
/// every column of the Hankel matrix lies in the span of the `p` exponential
/// mode vectors, so the global rank never exceeds `p`, and the leading
/// columns witness that it reaches `min(n, p)`.
pub fn gen_prony(spec: &PronySpec) -> Result<TestProblem, ProblemError> {
    let p = spec.poles.len();
    if spec.m < spec.n || spec.m < p || p == 0 || spec.n == 0 {
        return Err(ProblemError::BadPronyShape {
            m: spec.m,
            n: spec.n,
            poles: p,
        });
    }
    if p != spec.residues.len() {
        return Err(ProblemError::BadPronyShape {
            m: spec.m,
            n: spec.n,
            poles: p,
        });
    }
    if let Some(index) = spec.residues.iter().position(|g| g.norm() == 0.0) {
        return Err(ProblemError::ZeroResidue { index });
    }
    check_conjugate_closed(&spec.poles, &spec.residues)?;
    let z: Vec<Complex64> = spec.poles.iter().map(|l| (l * spec.t_step).exp()).collect();
    for i in 0..p {
        for j in (i + 1)..p {
            let scale = z[i].norm().max(z[j].norm()).max(1e-300);
            if (z[i] - z[j]).norm() <= 1e-12 * scale {
                return Err(ProblemError::DuplicatePoles { i, j });
            }
        }
    }

    // y_l for l in 0 .. n + m; each term evaluated as exp(lambda t l)
    // directly, avoiding power-chain drift.
    let count = spec.n + spec.m;
    let mut y = Vec::with_capacity(count);
    let mut max_imag = 0.0f64;
    let mut max_real = 0.0f64;
    for l in 0..count {
        let mut acc = Complex64::new(0.0, 0.0);
        for (lambda, gamma) in spec.poles.iter().zip(&spec.residues) {
            acc += gamma * (lambda * (spec.t_step * l as f64)).exp();
        }
        max_imag = max_imag.max(acc.im.abs());
        max_real = max_real.max(acc.re.abs());
        y.push(acc.re);
    }
    if max_imag > 1e-10 * max_real.max(1.0) {
        return Err(ProblemError::ComplexSignal { max_imag });
    }

    let a = DenseMatrix::from_fn(spec.m, spec.n, |i, j| y[i + j]);
    let b: Vec<f64> = (0..spec.m).map(|i| -y[spec.n + i]).collect();

    let expected = spec.n.min(p);
    let witness_cols = spec.n.min(p + 8);
    let witness = DenseMatrix::from_fn(spec.m, witness_cols, |i, j| y[i + j]);
    let sig = svd(&witness)?.sigma;
    let smax = sig.first().copied().unwrap_or(0.0);
    let got = sig.iter().filter(|&&s| s > 1e-8 * smax).count();
    if got != expected {
        return Err(ProblemError::RankMismatch { expected, got });
    }

    Ok(TestProblem {
        name: "prony".into(),
        a,
        b,
        x_true: None,
        quadrature_rtol: 1e-8,
    })
}

fn check_conjugate_closed(
    poles: &[Complex64],
    residues: &[Complex64],
) -> Result<(), ProblemError> {
    let tol = 1e-12;
    for (index, (pole, residue)) in poles.iter().zip(residues).enumerate() {
        if pole.im.abs() <= tol {
            if residue.im.abs() > tol * residue.norm().max(1.0) {
                return Err(ProblemError::NonConjugatePoles { index });
            }
            continue;
        }
        let scale = pole.norm().max(1.0);
        let found = poles.iter().zip(residues).any(|(other, other_res)| {
            (other - pole.conj()).norm() <= tol * scale
                && (other_res - residue.conj()).norm() <= tol * residue.norm().max(1.0)
        });
        if !found {
            return Err(ProblemError::NonConjugatePoles { index });
        }
    }
    Ok(())
}

/// Infinity-norm relative error `||x - x_ref||_inf / ||x_ref||_inf`.
pub fn rel_err_inf(x: &[f64], x_ref: &[f64]) -> Result<f64, ProblemError> {
    let denom = crate::dense::inf_norm_vec(x_ref);
    if denom == 0.0 {
        return Err(ProblemError::ZeroReference);
    }
    let num = x
        .iter()
        .zip(x_ref)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    Ok(num / denom)
}
