//! End-to-end checks of the CLI surface: golden output, config-file
//! handling, plot-file shape contracts, and error exits.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qittls-bench"))
}

fn run_in(dir: &Path, args: &[&str]) -> std::process::Output {
    let mut cmd = bin();
    cmd.args(args).current_dir(dir);
    cmd.output().expect("spawn qittls-bench")
}

#[test]
fn bench_matches_golden_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "bench", "--problem", "heat", "--m", "32", "--d", "3", "--eta", "1e-3", "--p", "100",
            "--trials", "3", "--seed", "11", "--out", "golden.csv",
        ],
    );
    assert!(out.status.success());
    let got = std::fs::read_to_string(dir.path().join("golden.csv")).unwrap();
    let want = include_str!("fixtures/bench_heat_m32_seed11.csv");
    assert_eq!(got, want, "CSV drifted from the pinned fixture");
}

#[test]
fn emitted_csv_parses_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "bench", "--problem", "deriv2", "--m", "24", "--d", "2", "--p", "60", "--trials", "2",
            "--seed", "3", "--out", "r.csv",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let parsed = qittls_bench::output::parse_csv(&text).unwrap();
    assert_eq!(parsed.len(), 6);
    for rec in &parsed {
        assert_eq!(rec.problem, "deriv2");
        assert_eq!(rec.err_kind, "vs_true");
        assert_eq!(rec.seed, 3);
    }
}

#[test]
fn solution_overlay_width_is_reference_plus_methods() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "bench", "--problem", "heat", "--m", "24", "--d", "3", "--methods", "TTLS,QiTTLS",
            "--p", "80", "--trials", "1", "--seed", "2", "--out", "w.csv",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("w_solution.txt")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "# index x_true TTLS QiTTLS");
    for line in lines {
        let width = line.split_whitespace().count();
        assert_eq!(width, qittls_bench::output::overlay_width(2));
    }
    // decay rows: n + 1 singular values
    let decay = std::fs::read_to_string(dir.path().join("w_decay.txt")).unwrap();
    assert_eq!(decay.lines().count(), 1 + 25);
}

#[test]
fn decay_row_count_contract() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["decay", "--problem", "foxgood", "--m", "64", "--out", "d.txt"],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("d.txt")).unwrap();
    // header plus n+1 = 65 singular values
    assert_eq!(text.lines().count(), 66);
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("65 "));
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("sweep.cfg"),
        "problem = heat\nm = 24\nd = 3\ntrials = 2\nseed = 11\np = 80\nout = from_config.csv\n",
    )
    .unwrap();
    let out = run_in(dir.path(), &["bench", "--config", "sweep.cfg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("from_config.csv").exists());
    // the --trials flag overrides the config value
    let out = run_in(
        dir.path(),
        &[
            "bench", "--config", "sweep.cfg", "--trials", "1", "--out", "override.csv",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("override.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3, "one trial, three methods");
}

#[test]
fn export_roundtrips_through_binary_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "export", "--problem", "baart", "--m", "16", "--eta", "0", "--seed", "9", "--out",
            "inst",
        ],
    );
    assert!(out.status.success());
    let bytes = std::fs::read(dir.path().join("inst.smx")).unwrap();
    let matrix = qittls_core::sample_model::binary::decode(&bytes).unwrap();
    assert_eq!(matrix.rows(), 16);
    assert_eq!(matrix.cols(), 17);
    // eta = 0: the exported C equals the exact augmented matrix bit for bit
    let problem = qittls_core::problems::gen_problem(
        qittls_core::problems::ProblemKind::Baart,
        16,
    )
    .unwrap();
    let c = qittls_core::tls::augmented(&problem.a, &problem.b).unwrap();
    assert_eq!(matrix.to_dense(), c);
    let manifest = std::fs::read_to_string(dir.path().join("inst.manifest")).unwrap();
    assert!(manifest.contains("name = baart"));
    assert!(manifest.contains("seed = 9"));
}

#[test]
fn bad_inputs_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["decay", "--problem", "nonesuch", "--m", "32", "--out", "x.txt"],
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unknown problem"), "stderr: {stderr}");

    let out = run_in(
        dir.path(),
        &[
            "bench", "--problem", "heat", "--m", "24", "--d", "0", "--trials", "1", "--seed",
            "1", "--out", "x.csv",
        ],
    );
    assert!(!out.status.success());
}

#[test]
fn solver_error_recorded_without_losing_other_records() {
    // baart at m=64, d=4, tiny p: the sketch frequently cannot support d, so
    // QiTTLS rows carry error tags while TTLS rows stay intact.
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "bench", "--problem", "baart", "--m", "64", "--d", "4", "--p", "12", "--trials",
            "4", "--seed", "1", "--out", "p.csv",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("p.csv")).unwrap();
    let parsed = qittls_bench::output::parse_csv(&text).unwrap();
    assert_eq!(parsed.len(), 12);
    for rec in parsed.iter().filter(|r| r.method == "TTLS") {
        assert_eq!(rec.status, "ok");
        assert!(rec.rel_err.is_some());
    }
    let failed = parsed
        .iter()
        .filter(|r| r.method == "QiTTLS" && r.rel_err.is_none())
        .count();
    assert!(failed > 0, "expected at least one sketch-rank failure");
    for rec in parsed.iter().filter(|r| r.rel_err.is_none()) {
        assert_ne!(rec.status, "ok");
    }
}
