use std::process::{Command, Output};

fn diamag(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_diamag")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bulk_pressure_prints_both_statistics() {
    let o = diamag(&["pressure", "--z", "0.5", "--z", "0.3,0.2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.lines().filter(|l| l.starts_with("bose")).count(), 2);
    assert_eq!(s.lines().filter(|l| l.starts_with("fermi")).count(), 2);
}

#[test]
fn finite_chi_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = diamag(&["--out", out, "chi", "--side", "3", "--n", "6", "--order", "1", "--method", "hellmann", "--stats", "fermi"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = diamag::finite_gas::read_chi_csv(std::fs::File::open(dir.path().join("chi.csv")).unwrap()).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].method, "hellmann");
}

#[test]
fn json_output_is_valid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = diamag(&["--out", out, "--format", "json", "pressure", "--side", "3", "--n", "6", "--contour"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("pressure.json")).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn exit_codes() {
    // configuration problems
    assert_eq!(diamag(&["verify", "not_a_check"]).status.code(), Some(2));
    assert_eq!(diamag(&["--config", "/nonexistent/study.toml", "converge"]).status.code(), Some(2));
    assert_eq!(diamag(&["chi", "--order", "0"]).status.code(), Some(2));
    // a domain error in the inputs
    assert_eq!(diamag(&["pressure", "--beta", "-1"]).status.code(), Some(2));
    // checks that pass
    assert_eq!(diamag(&["verify", "hermiticity", "fermi_log"]).status.code(), Some(0));
}

#[test]
fn failing_study_check_exits_one() {
    // a max/min ratio is never below 1
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.toml");
    std::fs::write(&cfg, "sides = [3.0, 4.0]\nspacing = 0.5\nlab_sides = []\nbound_ratio = 0.5\nmax_order = 0\n").unwrap();
    let out = dir.path().join("out");
    let o = diamag(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "bounds"]);
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("bounds_sups.csv").exists());
}

#[test]
fn config_command_round_trips() {
    let o = diamag(&["config"]);
    assert_eq!(o.status.code(), Some(0));
    let parsed = diamag::harness::StudyConfig::parse(&stdout(&o)).unwrap();
    assert_eq!(parsed, diamag::harness::StudyConfig::default());
    let o = diamag(&["--seed", "42", "config", "--json"]);
    let parsed = diamag::harness::StudyConfig::parse(&stdout(&o)).unwrap();
    assert_eq!(parsed.seed, 42);
    let o = diamag(&["config", "--reference"]);
    assert_eq!(stdout(&o), diamag::harness::config::reference_page());
}

#[test]
fn verify_list_names_every_check() {
    let o = diamag(&["verify", "--list"]);
    let names: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(names, diamag::harness::check_names());
}
