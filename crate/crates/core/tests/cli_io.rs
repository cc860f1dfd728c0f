//! End-to-end runs of the binary: file outputs, manifest integrity, exit
//! codes, and configuration precedence.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use collatz_rotation::report::{sha256_file, DiscrepancyReport, RunManifest};
use collatz_rotation::survey::RangeReport;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_collatz-rotation"));
    c.env_remove("COLLATZ_ROTATION_OUT");
    c.env_remove("COLLATZ_ROTATION_WORKERS");
    c
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn manifest_checks_out(dir: &Path) -> RunManifest {
    let m = RunManifest::load(&dir.join("manifest.json")).unwrap();
    assert!(!m.outputs.is_empty());
    for rec in &m.outputs {
        let sha = sha256_file(&dir.join(&rec.path)).unwrap();
        assert_eq!(sha, rec.sha256, "checksum drift for {}", rec.path);
    }
    m
}

#[test]
fn cycles_writes_feasibility_table_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["--out", dir.path().to_str().unwrap(), "cycles", "--p-max", "8"]);

    let csv = fs::read_to_string(dir.path().join("cycles.csv")).unwrap();
    let mut lines = csv.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("p,"), "header: {header}");
    assert_eq!(lines.count(), 8);

    let m = manifest_checks_out(dir.path());
    assert_eq!(m.command, "cycles");
    assert!(m.checksums().contains_key("cycles.json"));
}

#[test]
fn verify_json_roundtrips() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "--out",
        dir.path().to_str().unwrap(),
        "verify",
        "--range",
        "1,20000",
    ]);
    let text = fs::read_to_string(dir.path().join("verify.json")).unwrap();
    let rep: RangeReport = serde_json::from_str(&text).unwrap();
    assert_eq!(rep.range, (1, 20_000));
    assert_eq!(rep.count, 20_000);
    assert_eq!(rep.argmax_x, 1);
    assert!((rep.max_abs_eps - 0.086033132501691839).abs() < 1e-12);
    manifest_checks_out(dir.path());
}

#[test]
fn trajectory_emits_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&[
        "--out",
        dir.path().to_str().unwrap(),
        "trajectory",
        "--start",
        "27",
    ]);
    let dat = fs::read_to_string(dir.path().join("trajectory_phase.dat")).unwrap();
    // comment preamble, then one row per orbit step
    assert!(dat.starts_with('#'));
    let rows = dat.lines().filter(|l| !l.starts_with('#')).count();
    assert_eq!(rows, 112);
    manifest_checks_out(dir.path());
}

#[test]
fn compare_paper_reports_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(&["--out", dir.path().to_str().unwrap(), "compare-paper"]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("total across"));

    let rep: DiscrepancyReport =
        serde_json::from_str(&fs::read_to_string(dir.path().join("compare_paper.json")).unwrap())
            .unwrap();
    let (matched, differed, skipped) = rep.totals();
    // every dataset cell is consumed exactly once
    assert_eq!(matched + differed + skipped, 594);
    assert!(differed > 0, "the published tables are not all reproducible");
    manifest_checks_out(dir.path());
}

#[test]
fn usage_errors_exit_two() {
    let out = bin().args(["scan", "--objective", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "execution error path");
    let out = bin().arg("no-such-command").output().unwrap();
    assert_eq!(out.status.code(), Some(2), "clap usage error");
    let out = bin().args(["verify", "--range"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "missing flag value");
}

#[test]
fn config_precedence_flag_file_env() {
    let dir = tempfile::tempdir().unwrap();
    let from_env = dir.path().join("from_env");
    let from_file = dir.path().join("from_file");
    let from_flag = dir.path().join("from_flag");
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, format!("out = {:?}\nworkers = 1\n", from_file)).unwrap();

    // env only
    let st = bin()
        .env("COLLATZ_ROTATION_OUT", &from_env)
        .args(["cycles"])
        .output()
        .unwrap();
    assert!(st.status.success());
    assert!(from_env.join("cycles.json").exists());

    // file beats env
    let st = bin()
        .env("COLLATZ_ROTATION_OUT", &from_env)
        .args(["--config", cfg.to_str().unwrap(), "cycles"])
        .output()
        .unwrap();
    assert!(st.status.success());
    assert!(from_file.join("cycles.json").exists());

    // flag beats file
    let st = bin()
        .args([
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            from_flag.to_str().unwrap(),
            "cycles",
        ])
        .output()
        .unwrap();
    assert!(st.status.success());
    assert!(from_flag.join("cycles.json").exists());

    // unknown keys in the config file are rejected
    fs::write(&cfg, "outt = \"typo\"\n").unwrap();
    let st = bin()
        .args(["--config", cfg.to_str().unwrap(), "cycles"])
        .output()
        .unwrap();
    assert_eq!(st.status.code(), Some(1));
}
