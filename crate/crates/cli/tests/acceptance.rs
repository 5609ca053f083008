//! Acceptance criteria 1–11, one test each. Every test prints a single
//! `criterion N: PASS|FAIL ...` line (visible with `--nocapture`).

use std::path::PathBuf;
use std::process::Command;

use fwlab_cli::config::ScenarioConfig;
use fwlab_cli::report::{Report, Verdict};
use fwlab_cli::suites::{self, Suite};
use fwlab_core::approx::spin_darwin_decomposition_check;

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(format!("{name}.ini"))
}

fn load(name: &str, overrides: &[&str]) -> ScenarioConfig {
    let text = std::fs::read_to_string(config_path(name)).expect("shipped config");
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    ScenarioConfig::load(Some(&text), &overrides).expect("valid config")
}

fn run(name: &str, suite: Suite, overrides: &[&str]) -> (Report, i32) {
    suites::run(suite, &load(name, overrides))
}

/// Checks that every row whose metric matches one of `metrics` (exactly, or as
/// `metric.*`) passes; at least one row per metric must exist.
fn judge(criterion: u32, report: &Report, metrics: &[&str]) {
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in metrics {
        let rows: Vec<_> = report
            .rows()
            .iter()
            .filter(|r| r.metric == *m || r.metric.starts_with(&format!("{m}.")))
            .collect();
        if rows.is_empty() {
            failures.push(format!("{m}: missing"));
        }
        for r in rows {
            checked += 1;
            if r.verdict != Verdict::Pass {
                failures.push(format!("{} [{}={}] = {:.6e}", r.metric, r.param_name, r.param_value, r.value));
            }
        }
    }
    if failures.is_empty() {
        println!("criterion {criterion}: PASS ({checked} rows)");
    } else {
        println!("criterion {criterion}: FAIL ({} of {checked} rows): {}", failures.len(), failures.join("; "));
        panic!("criterion {criterion} failed: {}", failures.join("; "));
    }
}

#[test]
fn criterion_01_exact_transform() {
    let cfg = load("standard-1d", &[]);
    assert_eq!(cfg.model.spec.build().unwrap().dim(), 128);
    let (report, _) = suites::run(Suite::Verify, &cfg);
    judge(1, &report, &["unitarity_res", "pseudo_herm_res", "evenness_res", "lambda_sq_res", "spectrum_res", "sandwich_res"]);
}

#[test]
fn criterion_02_free_particle_reduction() {
    let (report, code) = run("free-1d", Suite::Verify, &[]);
    judge(2, &report, &["free_limit", "free_truncation_ratio", "evenness_res"]);
    assert_eq!(code, 0);
}

#[test]
fn criterion_03_channel_agreement() {
    let (report, _) = run("symbolic", Suite::Symbolic, &[]);
    judge(3, &report, &["channel_match", "c3_isolated", "word_difference_is_c3"]);
    let c3 = report.row("channel_difference").expect("single C3 monomial");
    assert_eq!(c3.value, 11.0 / 1024.0);
}

#[test]
fn criterion_04_coefficient_expansions() {
    let (report, _) = run("symbolic", Suite::Symbolic, &[]);
    let pinned: Vec<&str> = ["spin[0]", "spin[1]", "spin[2]", "darwin2[0]", "darwin2[1]"].to_vec();
    judge(4, &report, &pinned);
}

#[test]
fn criterion_05_rational_identity() {
    let (report, _) = run("symbolic", Suite::Symbolic, &[]);
    judge(5, &report, &["rational_identity", "rational_identity_probe"]);
}

#[test]
fn criterion_06_linear_response_improvement() {
    let (report, _) = run("wavenumber-scan-1d", Suite::Scan, &[]);
    judge(6, &report, &["slope_gain", "max_ratio"]);
}

#[test]
fn criterion_07_amplitude_scaling() {
    let (report, _) = run("amplitude-scan-1d", Suite::Scan, &[]);
    judge(7, &report, &["slope_check", "chain_ratio.LAMBDA", "chain_ratio.GRAM"]);
}

#[test]
fn criterion_08_series_with_a24() {
    let (report, _) = run("mass-scan-1d", Suite::Scan, &[]);
    judge(8, &report, &["monotone_violations", "decay_exponent", "a24_removal_increase"]);
}

#[test]
fn criterion_09_electrostatic_identities_3d() {
    let cfg = load("standard-3d", &[]);
    let model = cfg.model.spec.build().unwrap();
    assert_eq!(model.dim(), 864);
    let (r1, r2) = spin_darwin_decomposition_check(&model).unwrap();
    let ok = r1 <= 1e-10 && r2 <= 1e-10;
    println!("criterion 9: {} (r1 = {r1:.3e}, r2 = {r2:.3e})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "r1 = {r1:e}, r2 = {r2:e}");
}

#[test]
fn criterion_10_feshbach_villars() {
    let (report, _) = run("fv-1d", Suite::Fv, &[]);
    judge(
        10,
        &report,
        &[
            "similarity_residual",
            "scale_dependence_bound",
            "ratio.scale_dependence",
            "ratio.formula_residual",
            "corrected_below_bare",
            "second_order_slope.CORRECTED",
        ],
    );
}

#[test]
fn criterion_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_fwlab");
    let cases = [
        ("verify", "standard-1d", "csv"),
        ("scan", "amplitude-scan-1d", "json"),
        ("symbolic", "symbolic", "csv"),
        ("fv", "fv-1d", "csv"),
    ];
    let mut mismatched = Vec::new();
    for (sub, cfg, format) in cases {
        let mut outputs = Vec::new();
        for attempt in 0..2 {
            let out = dir.path().join(format!("{sub}-{attempt}.{format}"));
            let status = Command::new(bin)
                .arg(sub)
                .arg("--config")
                .arg(config_path(cfg))
                .args(["--seed", "7", "--format", format, "--output"])
                .arg(&out)
                .stderr(std::process::Stdio::null())
                .status()
                .unwrap();
            assert!(matches!(status.code(), Some(0 | 1)), "{sub} exited {status}");
            outputs.push(std::fs::read(&out).unwrap());
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            mismatched.push(sub);
        }
    }
    let ok = mismatched.is_empty();
    println!("criterion 11: {} (4 suites, 2 runs each){}", if ok { "PASS" } else { "FAIL" }, if ok { String::new() } else { format!(": {mismatched:?}") });
    assert!(ok);
}
