use std::process::Command;

use boundrec::harness::report::{EXIT_BUDGET, EXIT_CONFIG, EXIT_DISAGREEMENT, EXIT_OK};
use boundrec::harness::{run_cli, Report};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(
        std::iter::once("boundrec").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write_config(dir: &tempfile::TempDir, name: &str, json: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, json).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn oracle_queries() {
    let (code, out, _) = cli(&["oracle", "--language", "UPOWER64", "n=64", "n=65"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "0^64\ttrue\n0^65\tfalse\n");
    let (code, _, err) = cli(&["oracle", "--language", "POWER_EQ_I", "a b a^7 b"]);
    assert_eq!(code, EXIT_CONFIG, "{err}");
}

#[test]
fn run_with_overrides_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "upower.json",
        r#"{"kind": "recognize", "recognizer": "upower64-i-ptm1", "inputs": ["n=64", "n=63"], "trials": 50}"#,
    );
    let args = [
        "run", "--config", &cfg, "--prefix", "1", "--seed", "5", "--trials", "300",
    ];
    let (code, a, err) = cli(&args);
    assert_eq!(code, EXIT_OK, "{err}");
    let (_, b, _) = cli(&args);
    assert_eq!(a, b);
    let report: Report = serde_json::from_str(&a).unwrap();
    assert_eq!(report.config.trials, 300);
    assert_eq!(report.rows.len(), 2);
    assert!(report.rows[0].oracle && !report.rows[1].oracle);

    let (code, csv, _) = cli(&["run", "--config", &cfg, "--prefix", "1", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().next().unwrap().contains("budget_check"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "zero.json",
        r#"{"kind": "recognize", "recognizer": "dima-i-pca2", "inputs": ["0"], "prefix": "1", "trials": 0}"#,
    );
    assert_eq!(cli(&["run", "--config", &cfg]).0, EXIT_CONFIG);
    assert_eq!(cli(&["run"]).0, EXIT_CONFIG);
    assert_eq!(cli(&["run", "--format", "xml"]).0, EXIT_CONFIG);
    let beyond = write_config(
        &dir,
        "beyond.json",
        r#"{"kind": "recognize", "recognizer": "upower64-i-ptm1", "inputs": ["n=4096"], "prefix": "1"}"#,
    );
    let (code, _, err) = cli(&["run", "--config", &beyond]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("outside the oracle prefix"), "{err}");
}

#[test]
fn step_cap_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "dima.json",
        r#"{"kind": "recognize", "recognizer": "dima-dca2", "inputs": ["0 1 0^2 11 0^4"]}"#,
    );
    assert_eq!(cli(&["run", "--config", &cfg]).0, EXIT_OK);
    assert_eq!(
        cli(&["run", "--config", &cfg, "--max-steps", "2"]).0,
        EXIT_BUDGET
    );
}

#[test]
fn disagreement_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, out, _) = cli(&["exact", "lemma1", "--k", "1", "--prefix", "1"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["error_f64"].as_f64().unwrap() < 0.25);

    let cfg = write_config(
        &dir,
        "ok.json",
        r#"{"kind": "recognize", "recognizer": "dima-dca2", "inputs": ["0 1 0^2", "1"]}"#,
    );
    let (code, json, _) = cli(&["run", "--config", &cfg]);
    assert_eq!(code, EXIT_OK);
    let mut report: Report = serde_json::from_str(&json).unwrap();
    report.rows[0].agrees = false;
    report.summary.disagreements = 1;
    std::fs::write(&path, serde_json::to_string(&report).unwrap()).unwrap();
    let (code, csv, _) = cli(&["report", path.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, EXIT_DISAGREEMENT);
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn exact_enumerate_and_mutate() {
    let (code, out, _) = cli(&["exact", "adh", "--j", "2", "--prefix", "011"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v["correct"].as_f64().unwrap() > 0.98);

    let (_, out, _) = cli(&["exact", "freivalds", "--len-a", "1", "--len-b", "2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["win_a"], serde_json::json!([[1, [3]], [1, [4]]]));

    let (_, out, _) = cli(&["exact", "rtqcfa", "a b a^7 b a^56 b"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(
        v["overall"]["accept"],
        serde_json::json!([[1, [1]], [1, [1]]])
    );

    let (code, out, _) = cli(&["enumerate", "--language", "POWER_EQ", "--bound", "1"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "a b a^7 b\na b a^7 b a^56 b\n");

    let (code, out, _) = cli(&[
        "mutate",
        "--language",
        "DIMA",
        "--budget",
        "5",
        "0 11 0^2 1 0^4",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!(!out.trim().is_empty());
}

#[test]
fn binary_writes_reports_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        "lemma.json",
        r#"{"kind": "lemma1", "k": 1, "prefix": "0", "trials": 1000, "seed": 3}"#,
    );
    let out = dir.path().join("r.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_boundrec"))
        .args(["run", "--config", &cfg, "--format", "csv", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(EXIT_OK));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
}
