use std::process::{Command, Output};

use serde_json::Value;

fn loopforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loopforge")).args(args).env_remove("LOOPFORGE_SEED").output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn weights_suite_passes_with_a_json_report() {
    let out = loopforge(&["verify", "weights"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["suite"], "weights");
    assert_eq!(r["config"]["N"], 16);
    let checks = r["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    for c in checks {
        assert_eq!(c["status"], "pass");
        assert_eq!(c["runtime_ms"], 0.0);
        assert!(c["name"].as_str().unwrap().starts_with("weights."));
        assert!(c.get("witness").is_none());
    }
}

#[test]
fn seed_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_loopforge"))
        .args(["verify", "loops"])
        .env("LOOPFORGE_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(report(&out)["config"]["seed"], 7);
}

#[test]
fn csv_report_has_one_row_per_check() {
    let json = report(&loopforge(&["verify", "lie"]));
    let csv = loopforge(&["verify", "lie", "--report", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().count(), json["checks"].as_array().unwrap().len() + 1);
}

#[test]
fn out_writes_the_report_to_a_file() {
    let dir = std::env::temp_dir().join(format!("loopforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = loopforge(&["verify", "loops", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(serde_json::from_str::<Value>(&text).unwrap()["suite"], "loops");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn small_window_skips_the_quotient_check() {
    let r = report(&loopforge(&["verify", "paths", "--modes", "2"]));
    let quotient = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "paths.quotient_polynomial").unwrap();
    assert_eq!(quotient["status"], "skip");
}

#[test]
fn unknown_suite_exits_with_usage_error() {
    let out = loopforge(&["verify", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
}

#[test]
fn timings_are_recorded_on_request() {
    let r = report(&loopforge(&["verify", "weights", "--timings"]));
    assert!(r["checks"].as_array().unwrap().iter().any(|c| c["runtime_ms"].as_f64().unwrap() > 0.0));
}
