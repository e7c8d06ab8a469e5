//! End-to-end runs of the `pkgamma` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn pkgamma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pkgamma"))
        .args(args)
        .output()
        .expect("run pkgamma")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
}

#[test]
fn eval_classical_factorial() {
    let o = pkgamma(&["eval", "gamma", "--p", "1", "--k", "1", "--x", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(field(&text, "value"), "24");
    assert_eq!(field(&text, "method"), "closed");
}

#[test]
fn eval_gamma_at_k_is_p_over_k() {
    let o = pkgamma(&["eval", "gamma", "--p", "2", "--k", "3", "--x", "3"]);
    let v: f64 = field(&stdout(&o), "value").parse().unwrap();
    assert!((v - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn eval_at_pole_exits_with_domain_code() {
    let o = pkgamma(&["eval", "gamma", "--k", "1", "--x", "-2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pole at index 2"));

    let o = pkgamma(&["eval", "gamma", "--x", "-2", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"], "pole");
    assert_eq!(v["reason"], "pole at index 2");
}

#[test]
fn eval_json_carries_inputs() {
    let o = pkgamma(&[
        "eval", "poch", "--p", "2", "--k", "2", "--x", "3", "--n", "2", "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"].as_f64(), Some(15.0));
    assert!(v["inputs"].is_object());
}

#[test]
fn table_gamma_rows() {
    let o = pkgamma(&["table", "gamma", "--x", "1:3:1"]);
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["x", "value", "abs_err"]);
    let pairs: Vec<(&str, &str)> = rows[1..].iter().map(|r| (r[0], r[1])).collect();
    assert_eq!(pairs, [("1", "1"), ("2", "1"), ("3", "2")]);
}

#[test]
fn table_beta_half_at_x_two() {
    let o = pkgamma(&["table", "beta", "--k", "2", "--x", "1:3:1", "--y", "2"]);
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("2,")).unwrap();
    assert_eq!(row.split(',').nth(1), Some("0.5"));
}

#[test]
fn table_psi_json() {
    let o = pkgamma(&["table", "psi", "--x", "1:2:1", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let values: Vec<f64> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert!((values[0] + 0.577_215_664_901_532_9).abs() < 1e-15);
    assert!((values[1] - 0.422_784_335_098_467_1).abs() < 1e-15);
}

#[test]
fn empty_grid_is_a_usage_error() {
    let o = pkgamma(&["audit", "all", "--grid", ""]);
    assert_eq!(o.status.code(), Some(1));
}

fn audit_json(suite: &str) -> Value {
    let o = pkgamma(&["audit", suite, "--format", "json"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).unwrap()
}

fn records<'a>(report: &'a Value, id: &str) -> Vec<&'a Value> {
    report["records"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["identity_id"] == id && r["skipped"] == false)
        .collect()
}

#[test]
fn pochhammer_audit_flags_printed_difference_away_from_p_one() {
    let report = audit_json("pochhammer");
    assert_eq!(report["summary"]["all_corrected_pass"], true);
    let rs = records(&report, "2.33");
    assert!(!rs.is_empty());
    for r in rs {
        let p = r["grid_point"]["p"].as_f64().unwrap();
        assert_eq!(r["printed_pass"], p == 1.0, "{r}");
        assert_eq!(r["corrected_pass"], true);
    }
}

#[test]
fn gamma_audit_rejects_printed_reflection_sign() {
    let report = audit_json("gamma");
    assert_eq!(report["summary"]["all_corrected_pass"], true);
    let summary = report["summary"]["identities"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["identity_id"] == "2.30")
        .unwrap();
    assert_eq!(summary["pass_rate_printed"].as_f64(), Some(0.0));
    assert_eq!(summary["pass_rate_corrected"].as_f64(), Some(1.0));
}

#[test]
fn audit_text_summary_and_report_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.json");
    let o = pkgamma(&[
        "audit",
        "psi",
        "--grid",
        "p=1;k=2;x=2;m=2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3.8"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["suite"], "psi");
}

#[test]
fn oversized_table_is_rejected() {
    let o = pkgamma(&["table", "gamma", "--x", "1:1e7:1"]);
    assert_eq!(o.status.code(), Some(1));
}
