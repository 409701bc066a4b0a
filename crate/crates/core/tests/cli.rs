use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use morphid::io::load_trajectory;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn morphid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morphid")).args(args).output().unwrap()
}

fn run_ok(args: &[&str]) -> String {
    let out = morphid(args);
    assert!(
        out.status.success(),
        "morphid {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn report(dir: &Path, name: &str) -> toml::Table {
    fs::read_to_string(dir.join(name)).unwrap().parse().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(morphid(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(morphid(&["detect", "--window", "3"]).status.code(), Some(2));
    assert_eq!(morphid(&[]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_1_with_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = morphid(&["detect", "--input", "/nonexistent/trace.csv", "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/trace.csv"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "time_s,roll_deg,pitch_deg,yaw_deg\n0,0,0,0\n0,1,1,1\n").unwrap();
    let out = morphid(&["detect", "--input", s(&bad), "--out", s(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn detect_on_bundled_trace() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["detect", "--config", s(&fixtures().join("damage-event.toml")), "--out", s(dir.path())]);
    let r = report(dir.path(), "detection.toml");
    assert_eq!(r["damaged"].as_bool(), Some(true));
    let t = r["damage_time_s"].as_float().unwrap();
    assert!((19.0..=21.1).contains(&t), "{t}");
    assert_eq!(r["run"]["config_hash"].as_str().unwrap().len(), 64);
    let series = fs::read_to_string(dir.path().join("fluctuation.csv")).unwrap();
    assert!(series.starts_with("time_s,fluctuation_deg\n"));
}

#[test]
fn identify_on_bundled_recording_names_legs_1_and_4() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixtures().join("legs-1-4-missed.csv");
    let before = fs::read(&input).unwrap();
    run_ok(&["identify", "--config", s(&fixtures().join("legs-1-4-missed.toml")), "--out", s(dir.path())]);
    assert_eq!(fs::read(&input).unwrap(), before, "input file was modified");

    let r = report(dir.path(), "identification.toml");
    let legs: Vec<i64> = r["damaged_legs"].as_array().unwrap().iter().map(|v| v.as_integer().unwrap()).collect();
    assert_eq!(legs, vec![1, 4]);
    let generations = fs::read_to_string(dir.path().join("generations.csv")).unwrap();
    assert_eq!(generations.lines().count(), 1 + 20);
}

#[test]
fn oracle_table_has_every_feasible_morphology() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&["oracle", "--out", s(dir.path())]);
    let table = fs::read_to_string(dir.path().join("oracle_table.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("morphology,cost"));
    assert_eq!(lines.count(), 4096);
    let r = report(dir.path(), "oracle.toml");
    assert_eq!(r["best"].as_str(), Some("[111][111][111][111][111][111]"));
    assert_eq!(r["best_cost"].as_float(), Some(0.0));
}

#[test]
fn simulate_corrupt_filter_chain() {
    let dir = tempfile::tempdir().unwrap();
    let out = s(dir.path());
    run_ok(&["simulate", "--morphology", "[111][111][000][000][111][111]", "--out", out]);
    let clean = load_trajectory(&dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(clean.len(), 205 + 1229);

    run_ok(&["corrupt", "--input", s(&dir.path().join("trajectory.csv")), "--seed", "5", "--out", out]);
    let noisy = load_trajectory(&dir.path().join("corrupted.csv")).unwrap();
    assert_eq!(noisy.len(), clean.len());
    assert!((noisy.times[0] - 0.3).abs() < 1e-9);

    run_ok(&["filter", "--input", s(&dir.path().join("trajectory.csv")), "--out", out]);
    let filtered = load_trajectory(&dir.path().join("filtered.csv")).unwrap();
    assert_eq!(filtered.len(), 1024);
    for ch in ["roll", "pitch", "yaw"] {
        for kind in ["original", "filtered"] {
            let table = fs::read_to_string(dir.path().join(format!("ps_{ch}_{kind}.csv"))).unwrap();
            assert!(table.starts_with("freq_hz,power\n"));
            assert_eq!(table.lines().count(), 1 + 513);
        }
    }
}

#[test]
fn scenario_config_runs_end_to_end_and_reproducibly() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("scenarios/legs-3-4-missed.toml");
    for dir in [&a, &b] {
        run_ok(&["scenario", "--config", s(&cfg), "--seed", "2", "--out", s(dir.path())]);
    }
    let ra = report(a.path(), "scenario.toml");
    let rb = report(b.path(), "scenario.toml");
    assert_eq!(ra["scenario"].as_str(), Some("Legs 3 & 4 missed"));
    assert_eq!(ra["truth_damaged_legs"], toml::Value::Array(vec![3.into(), 4.into()]));
    for key in ["identified", "final_cost", "legs_match"] {
        assert_eq!(ra[key], rb[key], "{key}");
    }
    assert_eq!(ra["run"]["config_hash"], rb["run"]["config_hash"]);
    assert_eq!(
        fs::read(a.path().join("generations.csv")).unwrap(),
        fs::read(b.path().join("generations.csv")).unwrap()
    );
}

#[test]
fn seed_flag_changes_the_hash() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = fixtures().join("damage-event.toml");
    run_ok(&["detect", "--config", s(&cfg), "--out", s(a.path())]);
    run_ok(&["detect", "--config", s(&cfg), "--seed", "9", "--out", s(b.path())]);
    let ha = report(a.path(), "detection.toml")["run"]["config_hash"].clone();
    let hb = report(b.path(), "detection.toml")["run"]["config_hash"].clone();
    assert_ne!(ha, hb);
}
