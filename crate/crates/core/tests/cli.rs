use std::path::Path;
use std::process::{Command, Output};

fn driftbench(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftbench"))
        .args(args)
        .current_dir(dir)
        .env_remove("DRIFTBENCH_SEED")
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) {
    let out = driftbench(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    driftbench(dir, args).status.code().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn hd20_synth_writes_header_plus_rows() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["--seed", "1", "synth", "--scenario", "hd20:8", "--n", "500", "--out", "s.csv"]);
    let text = read(dir.path(), "s.csv");
    assert_eq!(text.lines().count(), 1001);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 21);
}

#[test]
fn bad_input_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["synth", "--scenario", "a0", "--n", "50", "--out", "s.csv"]);
    assert_eq!(code(p, &["synth", "--scenario", "z9", "--n", "50", "--out", "t.csv"]), 2);
    assert_eq!(code(p, &["synth", "--scenario", "a0", "--n", "50", "--out", "s.csv"]), 2);
    assert_eq!(code(p, &["induce", "--in", "s.csv", "--out", "i.csv", "--fraction", "0"]), 2);
    assert_eq!(code(p, &["run", "--in", "s.csv", "--detector", "adwin", "--chunk", "20"]), 2);
    assert_eq!(code(p, &["run", "--in", "missing.csv", "--chunk", "20"]), 3);
    assert_eq!(code(p, &["synth", "--scenario"]), 2);
}

#[test]
fn force_overwrites() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["--seed", "1", "synth", "--scenario", "b0", "--n", "40", "--out", "s.csv"]);
    let first = read(p, "s.csv");
    ok(p, &["--seed", "2", "--force", "synth", "--scenario", "b0", "--n", "40", "--out", "s.csv"]);
    assert_ne!(read(p, "s.csv"), first);
}

#[test]
fn seed_env_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["--seed", "42", "synth", "--scenario", "c1", "--n", "30", "--out", "flag.csv"]);
    let out = Command::new(env!("CARGO_BIN_EXE_driftbench"))
        .args(["synth", "--scenario", "c1", "--n", "30", "--out", "env.csv"])
        .current_dir(p)
        .env("DRIFTBENCH_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(read(p, "flag.csv"), read(p, "env.csv"));
}

#[test]
fn saved_plan_replays_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["--seed", "3", "synth", "--scenario", "hd20:0", "--n", "100", "--out", "s.csv"]);
    ok(p, &["induce", "--mode", "bottom", "--in", "s.csv", "--out", "a.csv"]);
    ok(p, &["induce", "--plan", "a.csv.plan.json", "--in", "s.csv", "--out", "b.csv"]);
    assert_eq!(read(p, "a.csv"), read(p, "b.csv"));
    assert_ne!(read(p, "a.csv"), read(p, "s.csv"));
}

#[test]
fn run_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["--seed", "4", "synth", "--scenario", "a0", "--n", "200", "--out", "s.csv"]);
    ok(p, &["--seed", "4", "run", "--detector", "hdddm", "--chunk", "40", "--in", "s.csv", "--out-dir", "r"]);
    let trace = read(p, "r/trace.csv");
    // 15% of 400 rows go to the warm-up; the rest get one trace row each.
    assert_eq!(trace.lines().count(), 1 + 400 - 60);
    let report: serde_json::Value = serde_json::from_str(&read(p, "r/report.json")).unwrap();
    assert_eq!(report["detector"], "hdddm");
    assert_eq!(report["stream_length"], 400);
}

#[test]
fn table8_sweep_has_one_row_per_drift_level() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["--seed", "5", "sweep", "--kind", "table8", "--n", "100", "--repeats", "1"]);
    assert_eq!(read(p, "summary.csv").lines().count(), 17);
}

#[test]
fn margin_width_sweep_has_one_row_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(p, &["--seed", "6", "synth", "--scenario", "c0", "--n", "200", "--out", "s.csv"]);
    ok(p, &["--seed", "6", "sweep", "--kind", "margin-width", "--values", "0.1,0.25,0.5,0.75", "--chunk", "40", "--in", "s.csv"]);
    let text = read(p, "summary.csv");
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().skip(1).all(|l| l.starts_with("theta_margin,")));
}
