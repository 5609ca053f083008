use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fwlab"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.ini"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn data_rows(stdout: &[u8]) -> Vec<Vec<String>> {
    let text = String::from_utf8(stdout.to_vec()).unwrap();
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("run_id,"))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn non_involution_beta_is_a_config_error() {
    let out = run(&["verify", "--set", "model.beta_scale=2"]);
    assert_eq!(out.status.code(), Some(2));
    let rows = data_rows(&out.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][5], "config_error");
    assert_eq!(rows[0][7], "fail");
}

#[test]
fn gap_violation_exits_three_with_a_row() {
    // Constant unit potential shifts the p = 0 negative level of m = 1 onto zero.
    let out = run(&["verify", "--set", "model.potential=1", "--set", "model.amplitude=1", "--set", "model.points=8"]);
    assert_eq!(out.status.code(), Some(3));
    let rows = data_rows(&out.stdout);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][5], "precondition_error");
}

#[test]
fn non_monotone_scan_values_exit_two() {
    let out = run(&["scan", "--set", "run.scan=amplitude", "--set", "run.values=0.01, 0.03, 0.02"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_without_section_exits_two() {
    let out = run(&["scan"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn symbolic_order_below_two_exits_two() {
    assert_eq!(run(&["symbolic", "--order", "1"]).status.code(), Some(2));
    assert_eq!(run(&["symbolic", "--order", "2"]).status.code(), Some(0));
}

#[test]
fn unknown_key_exits_two() {
    let out = run(&["verify", "--set", "model.colour=blue"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn single_point_scan_reports_nan_slopes() {
    let out = run(&["scan", "--set", "run.scan=amplitude", "--set", "run.values=0.01", "--set", "model.points=16"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = data_rows(&out.stdout);
    let slopes: Vec<_> = rows.iter().filter(|r| r[5].starts_with("slope.")).collect();
    assert_eq!(slopes.len(), 4);
    assert!(slopes.iter().all(|r| r[6] == "NaN" && r[7] == "info"));
}

#[test]
fn free_config_passes_verify() {
    let out = run(&["verify", "--config", config("free-1d").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let rows = data_rows(&out.stdout);
    let even = rows.iter().find(|r| r[5] == "evenness_res").unwrap();
    assert!(even[6].parse::<f64>().unwrap() <= 1e-13);
}

#[test]
fn output_file_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&["symbolic", "--format", "json", "--seed", "3", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["provenance"]["seed"], "3");
    assert!(doc["rows"].as_array().unwrap().iter().all(|r| r["verdict"] != "fail"));
}

#[test]
fn seed_changes_run_id_only() {
    let a = run(&["symbolic", "--seed", "1"]);
    let b = run(&["symbolic", "--seed", "2"]);
    let (ra, rb) = (data_rows(&a.stdout), data_rows(&b.stdout));
    assert_ne!(ra[0][0], rb[0][0]);
    assert_eq!(ra[0][2], rb[0][2]);
    assert_eq!(ra.len(), rb.len());
}

/// Frozen standard-scenario table. Names, parameters and verdicts must match
/// exactly. Values must agree to 1e-6 relative, or sit below 1e-11 when both
/// are rounding-level.
#[test]
fn standard_verify_matches_golden() {
    let golden = std::fs::read(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/verify-standard-1d.csv")).unwrap();
    let out = run(&["verify", "--config", config("standard-1d").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let (want, got) = (data_rows(&golden), data_rows(&out.stdout));
    assert_eq!(want.len(), got.len());
    for (w, g) in want.iter().zip(&got) {
        assert_eq!(w[..6], g[..6]);
        assert_eq!(w[7], g[7], "{}", w[5]);
        let (a, b): (f64, f64) = (w[6].parse().unwrap(), g[6].parse().unwrap());
        let close = (a - b).abs() <= 1e-6 * a.abs().max(b.abs()) || (a.abs() < 1e-11 && b.abs() < 1e-11);
        assert!(close, "{}: golden {a:e}, got {b:e}", w[5]);
    }
}
