//! Benchmark harness for the quantum-inspired TTLS pipeline.
//!
//! The harness reruns the library's solvers over the Fredholm test problems
//! and the Prony linear-prediction system, emitting deterministic CSV and
//! plot files. Every output byte is a pure function of the configuration and
//! the master seed; wall-clock timings are reported on stderr only, since
//! they are the one quantity that cannot be reproducible.

pub mod bounds;
pub mod concentration;
pub mod config;
pub mod output;
pub mod runner;

pub use config::{BenchConfig, PronyConfig};
pub use runner::{run_bench, run_prony, BenchOutcome, ErrKind, SolutionOverlay, TrialRecord};
