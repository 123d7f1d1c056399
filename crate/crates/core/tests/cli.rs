use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_spacs");

fn spacs(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn spacs")
}

fn quick(out: &Path) -> Vec<String> {
    ["--gamma", "1.5", "--samples", "2048", "--theta-step-deg", "10", "--grid", "41,3", "--out"]
        .iter()
        .map(|s| s.to_string())
        .chain([out.display().to_string()])
        .collect()
}

fn args(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[test]
fn negative_threshold_is_a_usage_error_naming_the_flag() {
    let out = spacs(&["--gamma", "-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--gamma"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = spacs(&["--frobnicate", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--frobnicate"));
}

#[test]
fn help_exits_cleanly() {
    let out = spacs(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("--alpha-re"));
}

#[test]
fn run_then_reanalyze() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = quick(dir.path());
    a.extend(["--format".into(), "json".into()]);
    let out = spacs(&args(&a));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["wigner_min"].is_number());
    assert!(dir.path().join("report.json").is_file());

    let again = spacs(&["reanalyze", &dir.path().display().to_string()]);
    assert_eq!(again.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&again.stdout).contains("wigner min"));
}

#[test]
fn exhausted_trial_budget_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut a = quick(dir.path());
    a.extend(["--max-trials".into(), "100".into()]);
    let out = spacs(&args(&a));
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("FAILED").is_file());
}

#[test]
fn config_file_then_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("f.cfg");
    std::fs::write(&cfg, "gamma = 1.2\nr = 0.3\nsamples = 1024\ntheta_step_deg = 15\ngrid_points = 21\n").unwrap();
    let out_dir = dir.path().join("run");
    let out = spacs(&[
        "--config",
        &cfg.display().to_string(),
        "--r",
        "0.8",
        "--out",
        &out_dir.display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let saved = std::fs::read_to_string(out_dir.join("config.cfg")).unwrap();
    let has = |line: &str| saved.lines().any(|l| l.replace(' ', "") == line);
    assert!(has("r=0.8"), "{saved}");
    assert!(has("gamma=1.2"), "{saved}");
}

#[test]
fn campaign_subcommand_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = spacs(&[
        "campaign",
        "--vary",
        "gamma=1.0,1.5",
        "--samples",
        "1024",
        "--theta-step-deg",
        "15",
        "--grid",
        "21",
        "--out",
        &dir.path().display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("campaign.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}
