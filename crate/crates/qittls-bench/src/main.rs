//! Command-line harness for the quantum-inspired TTLS pipeline.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use qittls_bench::bounds::{bound_audit, render_audit, BoundsConfig};
use qittls_bench::concentration::{concentration_suite, ConcentrationConfig};
use qittls_bench::config::{
    load_key_values, parse_methods, BenchConfig, PronyConfig, DEFAULT_DELTA, DEFAULT_EPSILON,
    DEFAULT_ETA, DEFAULT_P, DEFAULT_RTTLS_SKETCH,
};
use qittls_bench::output::{emit_csv, emit_manifest, emit_plot_data, write_time_summary};
use qittls_bench::runner::{run_bench, run_prony};
use qittls_core::problems::{add_noise, gen_problem, ProblemKind};
use qittls_core::sample_model::{binary, SampleMatrix};
use qittls_core::stream::substream;
use qittls_core::tls::augmented;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "qittls-bench",
    about = "Benchmarks for sketch-based truncated total least squares",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Noisy Fredholm benchmark sweep (errors vs the exact solution).
    Bench(BenchArgs),
    /// Noiseless Prony linear-prediction run (errors vs classical TTLS).
    Prony(PronyArgs),
    /// Monte Carlo check of the sampled-product concentration inequalities.
    Concentration(ConcentrationArgs),
    /// Toy-scale audit of the subspace / solution error bounds.
    Bounds(BoundsArgs),
    /// Export the singular-value decay of a test problem.
    Decay(DecayArgs),
    /// Export a problem instance in the sample-matrix binary format.
    Export(ExportArgs),
}

#[derive(Args)]
struct BenchArgs {
    /// Plain key-value config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// foxgood | gravity | heat | phillips | baart | deriv2
    #[arg(long)]
    problem: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    /// Truncation parameter.
    #[arg(long)]
    d: Option<usize>,
    /// Relative noise level.
    #[arg(long)]
    eta: Option<f64>,
    /// Comma-separated subset of TTLS,RTTLS,QiTTLS.
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Sketch target rank (defaults to 2d).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Sketch size override.
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    rttls_sketch: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; plot files land next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PronyArgs {
    #[arg(long, default_value_t = 1000)]
    m: usize,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Sampling interval of the exponential signal.
    #[arg(long, default_value_t = 0.2)]
    t: f64,
    #[arg(long, default_value_t = 12)]
    d: usize,
    /// Pole file (lambda_re lambda_im gamma_re [gamma_im] per line);
    /// the built-in six-pair bank is used when absent.
    #[arg(long)]
    poles: Option<PathBuf>,
    #[arg(long, default_value = "TTLS,RTTLS,QiTTLS")]
    methods: String,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Sketch target rank (defaults to 2d).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = DEFAULT_P)]
    p: usize,
    #[arg(long, default_value_t = DEFAULT_RTTLS_SKETCH)]
    rttls_sketch: usize,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConcentrationArgs {
    #[arg(long, default_value_t = 20)]
    rows: usize,
    #[arg(long, default_value_t = 10)]
    cols: usize,
    #[arg(long, default_value_t = 200)]
    p: usize,
    #[arg(long, default_value_t = 0.3)]
    theta: f64,
    #[arg(long, default_value_t = 500)]
    trials: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write the summary to a file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 240)]
    p: usize,
    #[arg(long, default_value_t = 2e-3)]
    epsilon: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecayArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    m: usize,
    /// Noise level applied before the decomposition (0 = exact data).
    #[arg(long, default_value_t = 0.0)]
    eta: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long)]
    problem: String,
    #[arg(long)]
    m: usize,
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Output stem: writes <stem>.smx and <stem>.manifest.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Bench(args) => cmd_bench(args),
        Command::Prony(args) => cmd_prony(args),
        Command::Concentration(args) => cmd_concentration(args),
        Command::Bounds(args) => cmd_bounds(args),
        Command::Decay(args) => cmd_decay(args),
        Command::Export(args) => cmd_export(args),
    }
}

fn pick<T>(flag: Option<T>, map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match map.get(key) {
        Some(raw) => raw
            .parse()
            .map(Some)
            .map_err(|e| anyhow::anyhow!("config key {key} = {raw:?}: {e}")),
        None => Ok(None),
    }
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let map = match &args.config {
        Some(path) => load_key_values(path)?,
        None => BTreeMap::new(),
    };
    let problem_name: String = pick(args.problem, &map, "problem")?
        .context("missing --problem (or a `problem` config key)")?;
    let problem = ProblemKind::parse(&problem_name)?;
    let m = pick(args.m, &map, "m")?.context("missing --m")?;
    let d = pick(args.d, &map, "d")?.context("missing --d")?;
    let eta = pick(args.eta, &map, "eta")?.unwrap_or(DEFAULT_ETA);
    let methods_spec: String =
        pick(args.methods, &map, "methods")?.unwrap_or_else(|| "TTLS,RTTLS,QiTTLS".into());
    let methods = parse_methods(&methods_spec)?;
    let epsilon = pick(args.epsilon, &map, "epsilon")?.unwrap_or(DEFAULT_EPSILON);
    let k = pick(args.k, &map, "k")?.unwrap_or(2 * d);
    let delta = pick(args.delta, &map, "delta")?.unwrap_or(DEFAULT_DELTA);
    let p = pick(args.p, &map, "p")?.unwrap_or(DEFAULT_P);
    let rttls_sketch = pick(args.rttls_sketch, &map, "rttls_sketch")?.unwrap_or(DEFAULT_RTTLS_SKETCH);
    let trials = pick(args.trials, &map, "trials")?.unwrap_or(10);
    let seed = pick(args.seed, &map, "seed")?.unwrap_or(42);
    let out: PathBuf = pick(args.out, &map, "out")?.context("missing --out")?;

    let cfg = BenchConfig {
        problem,
        m,
        d,
        eta,
        methods,
        epsilon,
        k,
        delta,
        p,
        rttls_sketch,
        trials,
        seed,
        out,
    };
    let outcome = run_bench(&cfg)?;
    emit_csv(&outcome.records, &cfg.out)?;
    emit_plot_data(&outcome, &cfg.out)?;
    write_time_summary(&outcome.records, std::io::stderr().lock())?;
    println!("wrote {}", cfg.out.display());
    Ok(())
}

fn cmd_prony(args: PronyArgs) -> Result<()> {
    let cfg = PronyConfig {
        m: args.m,
        n: args.n,
        t_step: args.t,
        d: args.d,
        poles: args.poles,
        methods: parse_methods(&args.methods)?,
        epsilon: args.epsilon,
        k: args.k.unwrap_or(2 * args.d),
        delta: args.delta,
        p: args.p,
        rttls_sketch: args.rttls_sketch,
        trials: args.trials,
        seed: args.seed,
        out: args.out,
    };
    let outcome = run_prony(&cfg)?;
    emit_csv(&outcome.records, &cfg.out)?;
    emit_plot_data(&outcome, &cfg.out)?;
    write_time_summary(&outcome.records, std::io::stderr().lock())?;
    println!("wrote {}", cfg.out.display());
    Ok(())
}

fn cmd_concentration(args: ConcentrationArgs) -> Result<()> {
    let cfg = ConcentrationConfig {
        rows: args.rows,
        cols: args.cols,
        p: args.p,
        theta: args.theta,
        trials: args.trials,
        seed: args.seed,
    };
    let summary = concentration_suite(&cfg)?;
    let text = summary.render(&cfg);
    if let Some(path) = &args.out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{text}");
    Ok(())
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    let cfg = BoundsConfig {
        trials: args.trials,
        seed: args.seed,
        p: args.p,
        epsilon: args.epsilon,
    };
    let text = render_audit(&bound_audit(&cfg)?);
    if let Some(path) = &args.out {
        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{text}");
    Ok(())
}

fn cmd_decay(args: DecayArgs) -> Result<()> {
    let kind = ProblemKind::parse(&args.problem)?;
    let problem = gen_problem(kind, args.m)?;
    let mut rng = substream(args.seed, 0, 0);
    let (a, b) = add_noise(&problem, args.eta, &mut rng)?;
    let c = augmented(&a, &b)?;
    let f = qittls_core::dense::svd(&c)?;
    let n1 = a.cols() + 1;
    let mut text = String::from("# index sigma\n");
    for i in 0..n1 {
        text.push_str(&format!(
            "{} {}\n",
            i + 1,
            qittls_bench::output::sci6(f.sigma_or_zero(i))
        ));
    }
    std::fs::write(&args.out, text).with_context(|| format!("writing {}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(())
}

fn cmd_export(args: ExportArgs) -> Result<()> {
    let kind = ProblemKind::parse(&args.problem)?;
    let problem = gen_problem(kind, args.m)?;
    let mut rng = substream(args.seed, 0, 0);
    let (a, b) = add_noise(&problem, args.eta, &mut rng)?;
    let c = augmented(&a, &b)?;
    let model = SampleMatrix::from_dense(&c)?;
    let smx = args.out.with_extension("smx");
    std::fs::write(&smx, binary::encode(&model))
        .with_context(|| format!("writing {}", smx.display()))?;
    let manifest = args.out.with_extension("manifest");
    emit_manifest(&manifest, kind.label(), args.m, a.cols(), args.eta, args.seed)?;
    println!("wrote {} and {}", smx.display(), manifest.display());
    Ok(())
}
