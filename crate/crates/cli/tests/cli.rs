use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supineq")).args(args).output().expect("binary runs")
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> (i32, Vec<u8>) {
    let out = dir.join(name);
    let mut all = args.to_vec();
    all.extend(["--out", out.to_str().unwrap()]);
    let status = run(&all).status.code().unwrap();
    (status, std::fs::read(&out).unwrap())
}

#[test]
fn battery_is_consistent_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let battery = config("battery.json");
    let args = ["--config", battery.to_str().unwrap(), "--seed", "7"];
    let (code, first) = run_to_file(dir.path(), "a.json", &args);
    assert_eq!(code, 0);
    let (_, second) = run_to_file(dir.path(), "b.json", &[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(first, second);

    let report: serde_json::Value = serde_json::from_slice(&first).unwrap();
    let summary = &report["summary"];
    assert_eq!(summary["scenarios"], summary["consistent"]);
    assert!(summary["scenarios"].as_u64().unwrap() >= 50);
}

#[test]
fn text_report_goes_to_stdout() {
    let out = run(&["--config", config("discriminating.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("1 scenarios, 1 consistent"), "{text}");
}

#[test]
fn printed_display_is_flagged_where_it_fails() {
    let path = config("discriminating.json");
    let out = run(&["--config", path.to_str().unwrap(), "--verbatim-paper", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &report["scenarios"][0];
    assert_eq!(row["verdict"], "inconsistent_finiteness");
    assert_eq!(row["form"], "verbatim");
    assert_eq!(row["divergence_flag"], true);
}

#[test]
fn oracle_resolution_limits_exit_one() {
    let out = run(&["--config", config("limits.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    let text = r#"{
  "scenarios": [
    {"id": "x", "kind": "S", "cone": "non_increasing",
     "u": {"form": "power", "c": 1, "alpha": 1},
     "v": {"form": "power", "c": 1, "alpha": 0},
     "w": {"form": "powerexp", "c": 1, "alpha": 0, "lambda": 1},
     "p": 0, "q": 1}
  ]
}"#;
    std::fs::write(&bad, text).unwrap();
    let out = run(&["--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");

    let out = run(&["--config", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["--config", config("battery.json").to_str().unwrap(), "--grid-n", "4"]);
    assert_eq!(out.status.code(), Some(2));
}
