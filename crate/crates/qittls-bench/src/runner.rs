//! Trial sweeps over problems and methods.
//!
//! Trials run in a parallel pool; record ordering is by `(trial, method)`
//! regardless of completion order, and every trial derives its own random
//! streams from the master seed (lane 0 noise, lane 1 the quantum-inspired
//! sketch, lane 2 the randomized comparator), so the records are independent
//! of thread scheduling.

use anyhow::{Context, Result};
use qittls_core::dense::{svd, DenseMatrix, SvdFactors};
use qittls_core::problems::{add_noise, gen_problem, gen_prony, rel_err_inf, PronySpec, TestProblem};
use qittls_core::qisvd::{derive_params, QiSvdParams};
use qittls_core::sample_model::SampleMatrix;
use qittls_core::stream::substream;
use qittls_core::tls::{
    augmented, qittls_solve, rttls_solve, ttls_from_svd, Method, SolveError, TtlsSolution,
};
use rayon::prelude::*;
use std::time::{Duration, Instant};

use crate::config::{BenchConfig, PronyConfig};

/// Which reference the relative error compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrKind {
    /// Exact solution known from the generator.
    VsTrue,
    /// Classical TTLS solution (used when no exact solution exists).
    VsTtls,
}

impl ErrKind {
    pub fn label(self) -> &'static str {
        match self {
            ErrKind::VsTrue => "vs_true",
            ErrKind::VsTtls => "vs_ttls",
        }
    }
}

/// One `(trial, method)` outcome.
#[derive(Debug, Clone)]
pub struct TrialRecord {
    pub problem: String,
    pub m: usize,
    pub d: usize,
    pub method: Method,
    pub trial: usize,
    pub err_kind: ErrKind,
    /// Infinity-norm relative error, or the solver's error tag.
    pub rel_err: Result<f64, String>,
    pub seed: u64,
    /// Wall time of the solver call alone; diagnostics only, never part of
    /// the deterministic outputs.
    pub wall: Duration,
}

/// Solutions of trial 0, for the overlay plot files.
#[derive(Debug, Clone)]
pub struct SolutionOverlay {
    /// `x_true` when the generator defines one, otherwise the TTLS
    /// reference solution.
    pub reference: Vec<f64>,
    pub reference_label: &'static str,
    pub columns: Vec<(Method, Vec<f64>)>,
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub records: Vec<TrialRecord>,
    pub overlay: SolutionOverlay,
    /// Singular values of the trial-0 augmented matrix, padded with exact
    /// zeros to n+1 entries.
    pub decay: Vec<f64>,
}

fn error_tag(err: &SolveError) -> String {
    match err {
        SolveError::Underdetermined { .. } => "underdetermined".into(),
        SolveError::RhsMismatch { .. } => "rhs-mismatch".into(),
        SolveError::BadTruncation { .. } => "bad-truncation".into(),
        SolveError::NonGeneric { .. } => "nongeneric".into(),
        SolveError::VanishingLastComponent { .. } => "vanishing-v22".into(),
        SolveError::TruncationExceedsSketchRank { d, l } => {
            format!("d-exceeds-sketch-rank(d={d};l={l})")
        }
        SolveError::RankDeficientBlock { .. } => "rank-deficient-block".into(),
        SolveError::BadSketchSize { .. } => "bad-sketch-size".into(),
        SolveError::BadSubspaceIndex { .. } => "bad-subspace-index".into(),
        SolveError::Linalg(_) => "linalg".into(),
        SolveError::Sketch(_) => "sketch".into(),
        SolveError::Sample(_) => "sample-model".into(),
    }
}

fn timed<T>(f: impl FnOnce() -> Result<T, SolveError>) -> (Result<T, SolveError>, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

struct TrialInput<'a> {
    a: &'a DenseMatrix,
    b: &'a [f64],
    c_svd_hint: Option<&'a SvdFactors>,
}

/// Runs the requested methods on one `(A, b)` instance, timing each solver
/// call. Returns the per-method outcomes and the TTLS reference (computed
/// whenever TTLS is requested or needed as the error reference).
fn solve_methods(
    input: &TrialInput<'_>,
    methods: &[Method],
    d: usize,
    params: &QiSvdParams,
    rttls_sketch: usize,
    need_ttls_reference: bool,
    seed: u64,
    trial: u64,
) -> (
    Vec<(Method, Result<TtlsSolution, SolveError>, Duration)>,
    Option<TtlsSolution>,
) {
    let n = input.a.cols();
    let want_ttls = methods.contains(&Method::Ttls) || need_ttls_reference;
    let mut ttls_ref: Option<TtlsSolution> = None;
    let mut ttls_time = Duration::ZERO;
    if want_ttls {
        let (res, wall) = timed(|| match input.c_svd_hint {
            Some(cf) => ttls_from_svd(cf, n, d),
            None => {
                let cf = svd(&augmented(input.a, input.b)?)?;
                ttls_from_svd(&cf, n, d)
            }
        });
        ttls_time = wall;
        ttls_ref = res.ok();
    }
    let mut out = Vec::with_capacity(methods.len());
    for &method in methods {
        match method {
            Method::Ttls => {
                let res = ttls_ref
                    .clone()
                    .ok_or(SolveError::BadTruncation { d, max: n });
                out.push((method, res, ttls_time));
            }
            Method::QiTtls => {
                let (res, wall) = timed(|| {
                    let c = SampleMatrix::from_dense(&augmented(input.a, input.b)?)?;
                    let mut rng = substream(seed, trial, 1);
                    qittls_solve(&c, params, d, &mut rng)
                });
                out.push((method, res, wall));
            }
            Method::RTtls => {
                let (res, wall) = timed(|| {
                    let mut rng = substream(seed, trial, 2);
                    rttls_solve(input.a, input.b, d, rttls_sketch, &mut rng)
                });
                out.push((method, res, wall));
            }
            Method::Tls => unreachable!("TLS is not a benchmark method"),
        }
    }
    (out, ttls_ref)
}

fn record_from(
    solution: Result<TtlsSolution, SolveError>,
    wall: Duration,
    reference: Option<&[f64]>,
    err_kind: ErrKind,
    base: (&str, usize, usize, usize, u64),
    method: Method,
) -> TrialRecord {
    let (problem, m, d, trial, seed) = base;
    let rel_err = solution
        .map_err(|e| error_tag(&e))
        .and_then(|sol| match reference {
            Some(r) => rel_err_inf(&sol.x, r).map_err(|e| format!("{e}")),
            None => Err("no-reference".to_string()),
        });
    TrialRecord {
        problem: problem.to_string(),
        m,
        d,
        method,
        trial,
        err_kind,
        rel_err,
        seed,
        wall,
    }
}

/// Runs the noisy Fredholm benchmark: each trial draws a fresh noise
/// realization, solves every requested method, and records the infinity-norm
/// relative error against the exact solution.
pub fn run_bench(cfg: &BenchConfig) -> Result<BenchOutcome> {
    cfg.validate().map_err(|e| e.context("invalid config"))?;
    let problem = gen_problem(cfg.problem, cfg.m)?;
    let x_true = problem
        .x_true
        .clone()
        .context("benchmark problems define an exact solution")?;
    let params = derive_params(cfg.epsilon, cfg.k, cfg.delta, Some(cfg.p))?;

    let trial_outputs: Vec<(Vec<TrialRecord>, Option<TrialArtifacts>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_noise_trial(cfg, &problem, &x_true, &params, trial))
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(cfg.trials * cfg.methods.len());
    let mut artifacts = None;
    for (trial_records, art) in trial_outputs {
        records.extend(trial_records);
        if artifacts.is_none() {
            artifacts = art;
        }
    }
    let artifacts = artifacts.context("trial 0 produced no artifacts")?;
    Ok(BenchOutcome {
        records,
        overlay: SolutionOverlay {
            reference: x_true,
            reference_label: "x_true",
            columns: artifacts.solutions,
        },
        decay: artifacts.decay,
    })
}

struct TrialArtifacts {
    solutions: Vec<(Method, Vec<f64>)>,
    decay: Vec<f64>,
}

fn run_noise_trial(
    cfg: &BenchConfig,
    problem: &TestProblem,
    x_true: &[f64],
    params: &QiSvdParams,
    trial: usize,
) -> Result<(Vec<TrialRecord>, Option<TrialArtifacts>)> {
    let mut noise_rng = substream(cfg.seed, trial as u64, 0);
    let (a, b) = add_noise(problem, cfg.eta, &mut noise_rng)?;
    let input = TrialInput {
        a: &a,
        b: &b,
        c_svd_hint: None,
    };
    let (solved, _) = solve_methods(
        &input,
        &cfg.methods,
        cfg.d,
        params,
        cfg.rttls_sketch,
        false,
        cfg.seed,
        trial as u64,
    );
    let base = (problem.name.as_str(), cfg.m, cfg.d, trial, cfg.seed);
    let mut records = Vec::with_capacity(solved.len());
    let mut artifacts = None;
    if trial == 0 {
        let cf = svd(&augmented(&a, &b)?)?;
        let n1 = a.cols() + 1;
        let mut decay: Vec<f64> = (0..n1).map(|i| cf.sigma_or_zero(i)).collect();
        // structural zeros for the wide case
        for s in decay.iter_mut().skip(cf.sigma.len()) {
            *s = 0.0;
        }
        let solutions = solved
            .iter()
            .filter_map(|(m, res, _)| res.as_ref().ok().map(|sol| (*m, sol.x.clone())))
            .collect();
        artifacts = Some(TrialArtifacts { solutions, decay });
    }
    for (method, res, wall) in solved {
        records.push(record_from(
            res,
            wall,
            Some(x_true),
            ErrKind::VsTrue,
            base,
            method,
        ));
    }
    Ok((records, artifacts))
}

/// Runs the noiseless Prony experiment. The system is fixed across trials
/// (only the sketches re-randomize) and errors are measured against the
/// classical TTLS solution, which is computed once and reused.
pub fn run_prony(cfg: &PronyConfig) -> Result<BenchOutcome> {
    if cfg.trials == 0 {
        anyhow::bail!("trials must be at least 1");
    }
    if cfg.methods.is_empty() {
        anyhow::bail!("method set must be nonempty");
    }
    let spec = match &cfg.poles {
        Some(path) => {
            let (poles, residues) = crate::config::load_poles(path)?;
            PronySpec {
                poles,
                residues,
                t_step: cfg.t_step,
                m: cfg.m,
                n: cfg.n,
            }
        }
        None => PronySpec::six_pair_bank(cfg.m, cfg.n, cfg.t_step),
    };
    let problem = gen_prony(&spec)?;
    let params = derive_params(cfg.epsilon, cfg.k, cfg.delta, Some(cfg.p))?;

    // One exact SVD of C, shared by the TTLS reference and the decay export.
    let c = augmented(&problem.a, &problem.b)?;
    let (cf_res, ttls_wall) = {
        let start = Instant::now();
        let cf = svd(&c)?;
        (cf, start.elapsed())
    };
    let ttls = ttls_from_svd(&cf_res, cfg.n, cfg.d)?;
    let n1 = cfg.n + 1;
    let mut decay: Vec<f64> = (0..n1).map(|i| cf_res.sigma_or_zero(i)).collect();
    for s in decay.iter_mut().skip(cf_res.sigma.len()) {
        *s = 0.0;
    }

    let records: Vec<Vec<TrialRecord>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let base = ("prony", cfg.m, cfg.d, trial, cfg.seed);
            let mut out = Vec::new();
            for &method in &cfg.methods {
                let (res, wall) = match method {
                    Method::Ttls => (Ok(ttls.clone()), ttls_wall),
                    Method::QiTtls => timed(|| {
                        let cm = SampleMatrix::from_dense(&c)?;
                        let mut rng = substream(cfg.seed, trial as u64, 1);
                        qittls_solve(&cm, &params, cfg.d, &mut rng)
                    }),
                    Method::RTtls => timed(|| {
                        let mut rng = substream(cfg.seed, trial as u64, 2);
                        rttls_solve(&problem.a, &problem.b, cfg.d, cfg.rttls_sketch, &mut rng)
                    }),
                    Method::Tls => unreachable!("TLS is not a benchmark method"),
                };
                out.push(record_from(
                    res,
                    wall,
                    Some(&ttls.x),
                    ErrKind::VsTtls,
                    base,
                    method,
                ));
            }
            out
        })
        .collect();

    // overlay from trial 0
    let mut solutions = Vec::new();
    for &method in &cfg.methods {
        let sol = match method {
            Method::Ttls => Some(ttls.x.clone()),
            Method::QiTtls => {
                let cm = SampleMatrix::from_dense(&c)?;
                let mut rng = substream(cfg.seed, 0, 1);
                qittls_solve(&cm, &params, cfg.d, &mut rng).ok().map(|s| s.x)
            }
            Method::RTtls => {
                let mut rng = substream(cfg.seed, 0, 2);
                rttls_solve(&problem.a, &problem.b, cfg.d, cfg.rttls_sketch, &mut rng)
                    .ok()
                    .map(|s| s.x)
            }
            Method::Tls => None,
        };
        if let Some(x) = sol {
            solutions.push((method, x));
        }
    }

    Ok(BenchOutcome {
        records: records.into_iter().flatten().collect(),
        overlay: SolutionOverlay {
            reference: ttls.x.clone(),
            reference_label: "x_ttls",
            columns: solutions,
        },
        decay,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{DEFAULT_RTTLS_SKETCH, DEFAULT_P};
    use qittls_core::problems::ProblemKind;

    fn small_config() -> BenchConfig {
        BenchConfig {
            problem: ProblemKind::Heat,
            m: 48,
            d: 6,
            eta: 1e-3,
            methods: vec![Method::Ttls, Method::RTtls, Method::QiTtls],
            epsilon: 1e-3,
            k: 12,
            delta: 0.1,
            p: DEFAULT_P,
            rttls_sketch: DEFAULT_RTTLS_SKETCH,
            trials: 3,
            seed: 9,
            out: std::path::PathBuf::from("unused.csv"),
        }
    }

    #[test]
    fn bench_produces_trial_times_method_records() {
        let out = run_bench(&small_config()).unwrap();
        assert_eq!(out.records.len(), 9);
        // ordering by (trial, method)
        for (i, rec) in out.records.iter().enumerate() {
            assert_eq!(rec.trial, i / 3);
        }
        assert_eq!(out.decay.len(), 49);
        assert!(out.decay.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn bench_is_seed_deterministic() {
        let a = run_bench(&small_config()).unwrap();
        let b = run_bench(&small_config()).unwrap();
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.rel_err.as_ref().ok(), y.rel_err.as_ref().ok());
            assert_eq!(x.rel_err.as_ref().err(), y.rel_err.as_ref().err());
        }
    }

    #[test]
    fn recorded_errors_match_recomputation_from_stored_solutions() {
        let mut cfg = small_config();
        cfg.trials = 1;
        let out = run_bench(&cfg).unwrap();
        for (method, x) in &out.overlay.columns {
            let recomputed = rel_err_inf(x, &out.overlay.reference).unwrap();
            let recorded = out
                .records
                .iter()
                .find(|r| r.trial == 0 && r.method == *method)
                .and_then(|r| r.rel_err.clone().ok())
                .unwrap();
            assert_eq!(recomputed, recorded, "{method}");
        }
    }

    #[test]
    fn prony_ttls_error_is_zero_against_itself() {
        let cfg = PronyConfig {
            m: 40,
            n: 24,
            t_step: 0.2,
            d: 12,
            poles: None,
            methods: vec![Method::Ttls],
            epsilon: 1e-3,
            k: 24,
            delta: 0.1,
            p: 100,
            rttls_sketch: DEFAULT_RTTLS_SKETCH,
            trials: 2,
            seed: 3,
            out: std::path::PathBuf::from("unused.csv"),
        };
        let out = run_prony(&cfg).unwrap();
        assert_eq!(out.records.len(), 2);
        for rec in &out.records {
            assert_eq!(rec.err_kind, ErrKind::VsTtls);
            assert_eq!(*rec.rel_err.as_ref().unwrap(), 0.0);
        }
    }
}
