//! Benchmark configuration, including the plain key-value config file.

use anyhow::{bail, Context, Result};
use qittls_core::problems::ProblemKind;
use qittls_core::tls::Method;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Default sketch size for the randomized comparator.
pub const DEFAULT_RTTLS_SKETCH: usize = 20;
/// Default sketch size for the quantum-inspired solver.
pub const DEFAULT_P: usize = 200;
/// Default accuracy target. The sketch distributions do not depend on
/// epsilon, so the benchmark keeps it small to stop the truncation
/// threshold from cutting below the requested d on steeply decaying spectra.
pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_DELTA: f64 = 0.1;
pub const DEFAULT_ETA: f64 = 1e-3;

/// Configuration for a `bench` sweep over one test problem.
#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub problem: ProblemKind,
    pub m: usize,
    pub d: usize,
    pub eta: f64,
    pub methods: Vec<Method>,
    pub epsilon: f64,
    /// Sketch target rank; defaults to `2 d`.
    pub k: usize,
    pub delta: f64,
    pub p: usize,
    pub rttls_sketch: usize,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.methods.is_empty() {
            bail!("method set must be nonempty");
        }
        if self.d == 0 || self.d >= self.m {
            bail!("d = {} outside [1, m)", self.d);
        }
        Ok(())
    }
}

/// Configuration for the Prony linear-prediction experiment.
#[derive(Debug, Clone)]
pub struct PronyConfig {
    pub m: usize,
    pub n: usize,
    pub t_step: f64,
    pub d: usize,
    /// Pole file; the six-pair bank is used when absent.
    pub poles: Option<PathBuf>,
    pub methods: Vec<Method>,
    pub epsilon: f64,
    pub k: usize,
    pub delta: f64,
    pub p: usize,
    pub rttls_sketch: usize,
    pub trials: usize,
    pub seed: u64,
    pub out: PathBuf,
}

/// Parses the comma-separated method list (`TTLS,RTTLS,QiTTLS`).
pub fn parse_methods(spec: &str) -> Result<Vec<Method>> {
    let mut out = Vec::new();
    for name in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let method = match name.to_ascii_uppercase().as_str() {
            "TTLS" => Method::Ttls,
            "RTTLS" => Method::RTtls,
            "QITTLS" => Method::QiTtls,
            other => bail!("unknown method {other:?} (expected TTLS, RTTLS, QiTTLS)"),
        };
        if !out.contains(&method) {
            out.push(method);
        }
    }
    if out.is_empty() {
        bail!("method set must be nonempty");
    }
    Ok(out)
}

/// Loads a plain `key = value` file (one pair per line, `#` comments).
pub fn load_key_values(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!("{}:{}: expected key = value", path.display(), lineno + 1);
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

/// Reads a pole file: one pole per line, whitespace-separated
/// `lambda_re lambda_im gamma_re gamma_im` (the residue imaginary part may
/// be omitted and defaults to 0). Conjugates must be listed explicitly.
pub fn load_poles(path: &Path) -> Result<(Vec<num_complex::Complex64>, Vec<num_complex::Complex64>)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading poles {}", path.display()))?;
    let mut poles = Vec::new();
    let mut residues = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|f| {
                f.parse::<f64>()
                    .with_context(|| format!("{}:{}: bad number {f:?}", path.display(), lineno + 1))
            })
            .collect::<Result<_>>()?;
        match fields.as_slice() {
            [re, im, gre] => {
                poles.push(num_complex::Complex64::new(*re, *im));
                residues.push(num_complex::Complex64::new(*gre, 0.0));
            }
            [re, im, gre, gim] => {
                poles.push(num_complex::Complex64::new(*re, *im));
                residues.push(num_complex::Complex64::new(*gre, *gim));
            }
            _ => bail!(
                "{}:{}: expected 3 or 4 fields, got {}",
                path.display(),
                lineno + 1,
                fields.len()
            ),
        }
    }
    if poles.is_empty() {
        bail!("{}: no poles", path.display());
    }
    Ok((poles, residues))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn methods_parse_and_dedup() {
        let m = parse_methods("TTLS, qittls,TTLS").unwrap();
        assert_eq!(m, vec![Method::Ttls, Method::QiTtls]);
        assert!(parse_methods("TLSX").is_err());
        assert!(parse_methods("").is_err());
    }

    #[test]
    fn key_value_file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg");
        std::fs::write(&path, "# comment\nproblem = foxgood\n m=256 \n\n").unwrap();
        let map = load_key_values(&path).unwrap();
        assert_eq!(map["problem"], "foxgood");
        assert_eq!(map["m"], "256");
    }

    #[test]
    fn pole_file_parses() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("poles");
        std::fs::write(&path, "-0.1 1.0 1.0\n-0.1 -1.0 1.0\n").unwrap();
        let (poles, residues) = load_poles(&path).unwrap();
        assert_eq!(poles.len(), 2);
        assert_eq!(residues[0], num_complex::Complex64::new(1.0, 0.0));
        assert_eq!(poles[1].im, -1.0);
    }
}
