use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rofsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rofsim"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    v.sort();
    v
}

#[test]
fn budget_defaults_to_the_sample_topology() {
    let dir = tempfile::tempdir().unwrap();
    let o = rofsim(&["budget", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("LATENCY") && text.contains("FRONTHAUL"));
    assert_eq!(
        files(dir.path()),
        ["budget.json", "budget_fronthaul.csv", "budget_latency.csv"]
    );
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("budget.json")).unwrap()).unwrap();
    assert!(json["fronthaul"].as_array().unwrap().len() >= 4);
}

#[test]
fn budget_rejects_a_forest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "links = []\n\n[[nodes]]\nid = \"co\"\nkind = \"central_office\"\n\n[[nodes]]\nid = \"x\"\nkind = \"onu\"\n",
    )
    .unwrap();
    let o = rofsim(&["budget", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not connected"));
}

#[test]
fn short_run_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let o = rofsim(&[
        "sweep",
        "--config",
        "scenario_b",
        "--points",
        "-8,-6",
        "--blocks",
        "1",
        "--seed",
        "5",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let names = files(&out);
    assert!(names.contains(&"scenario_b.json".to_string()));
    assert_eq!(names.iter().filter(|n| n.starts_with("waterfall_")).count(), 6);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("scenario_b.json")).unwrap()).unwrap();
    assert_eq!(json["manifest"]["seed"], 5);
    assert_eq!(json["rx_power_dbm"], serde_json::json!([-8.0, -6.0]));
}

#[test]
fn json_only_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = rofsim(&[
        "run",
        "--config",
        "b",
        "--blocks",
        "1",
        "--format",
        "json",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(files(dir.path()), ["scenario_b.json"]);
}

#[test]
fn devices_export_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = rofsim(&["devices", "--points", "101", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let names = files(dir.path());
    assert!(names.len() >= 5);
    let text = fs::read_to_string(dir.path().join("device_onu_mrr1.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "freq_hz,through_db,drop_db");
    assert_eq!(text.lines().count(), 102);
}

#[test]
fn validation_failures_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.toml");
    fs::write(&empty, "").unwrap();
    let o = rofsim(&["run", "--config", empty.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing sections"));

    let o = rofsim(&["run", "--config", "no_such_scenario"]);
    assert_eq!(code(&o), 2);

    let o = rofsim(&["sweep", "--start", "-6", "--stop", "-10", "--step", "1"]);
    assert_eq!(code(&o), 2);

    let o = rofsim(&["run", "--format", "xml"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = rofsim(&["devices", "--points", "11", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}
