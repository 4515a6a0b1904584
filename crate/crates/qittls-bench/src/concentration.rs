//! Monte Carlo check of the sampled-product concentration inequalities.
//!
//! For a fixed matrix `M`, row sampling builds `N` with
//! `N_t = M_{i_t} / sqrt(p P_{i_t})` and the row form asserts
//! `Pr(||M^T M - N^T N||_F >= theta ||M||_F^2) <= 1 / (theta^2 p)`;
//! the column form mirrors it with `||M M^T - N N^T||_F`.

use anyhow::Result;
use qittls_core::dense::DenseMatrix;
use qittls_core::sample_model::SampleMatrix;
use qittls_core::stream::substream;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy)]
pub struct ConcentrationConfig {
    pub rows: usize,
    pub cols: usize,
    pub p: usize,
    pub theta: f64,
    pub trials: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationSummary {
    pub trials: usize,
    pub row_violations: usize,
    pub col_violations: usize,
    /// The inequality's right-hand side `1 / (theta^2 p)`.
    pub bound: f64,
}

impl ConcentrationSummary {
    pub fn row_fraction(&self) -> f64 {
        self.row_violations as f64 / self.trials as f64
    }

    pub fn col_fraction(&self) -> f64 {
        self.col_violations as f64 / self.trials as f64
    }

    pub fn render(&self, cfg: &ConcentrationConfig) -> String {
        format!(
            "trials = {}\nbound = {}\nrow_violation_fraction = {}\ncol_violation_fraction = {}\np = {}\ntheta = {}\n",
            self.trials,
            crate::output::sci6(self.bound),
            crate::output::sci6(self.row_fraction()),
            crate::output::sci6(self.col_fraction()),
            cfg.p,
            crate::output::sci6(cfg.theta),
        )
    }
}

fn gram_row(m: &DenseMatrix) -> DenseMatrix {
    m.transpose().matmul(m).expect("shapes agree")
}

fn gram_col(m: &DenseMatrix) -> DenseMatrix {
    m.matmul(&m.transpose()).expect("shapes agree")
}

/// Runs both forms over `trials` independent sample draws of a fixed matrix
/// generated from the master seed.
pub fn concentration_suite(cfg: &ConcentrationConfig) -> Result<ConcentrationSummary> {
    anyhow::ensure!(cfg.theta > 0.0, "theta must be positive");
    anyhow::ensure!(cfg.p > 0 && cfg.trials > 0, "p and trials must be positive");
    let mut gen_rng = substream(cfg.seed, 0, 3);
    let m = DenseMatrix::from_fn(cfg.rows, cfg.cols, |_, _| {
        2.0 * uniform(&mut gen_rng) - 1.0
    });
    let model = SampleMatrix::from_dense(&m)?;
    let frob_sq = model.frob_sq();
    let threshold = cfg.theta * frob_sq;
    let mtm = gram_row(&m);
    let mmt = gram_col(&m);

    let results: Vec<(bool, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = substream(cfg.seed, trial as u64, 4);
            // row form
            let mut n = DenseMatrix::zeros(cfg.p, cfg.cols);
            for t in 0..cfg.p {
                let i = model.sample_row(&mut rng).expect("nonzero matrix");
                let prob = model.row_norm_sq(i).expect("in range") / frob_sq;
                let scale = 1.0 / (cfg.p as f64 * prob).sqrt();
                for j in 0..cfg.cols {
                    n.set(t, j, m.get(i, j) * scale);
                }
            }
            let row_dev = gram_row(&n).sub(&mtm).expect("shape").frob_norm();
            // column form
            let mut nc = DenseMatrix::zeros(cfg.rows, cfg.p);
            for t in 0..cfg.p {
                let j = model.sample_col(&mut rng).expect("nonzero matrix");
                let prob = model.col_norm_sq(j).expect("in range") / frob_sq;
                let scale = 1.0 / (cfg.p as f64 * prob).sqrt();
                for i in 0..cfg.rows {
                    nc.set(i, t, m.get(i, j) * scale);
                }
            }
            let col_dev = gram_col(&nc).sub(&mmt).expect("shape").frob_norm();
            (row_dev >= threshold, col_dev >= threshold)
        })
        .collect();

    let row_violations = results.iter().filter(|r| r.0).count();
    let col_violations = results.iter().filter(|r| r.1).count();
    Ok(ConcentrationSummary {
        trials: cfg.trials,
        row_violations,
        col_violations,
        bound: 1.0 / (cfg.theta * cfg.theta * cfg.p as f64),
    })
}

fn uniform(rng: &mut impl qittls_core::rand_core::RngCore) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    (rng.next_u64() >> 11) as f64 * SCALE
}
