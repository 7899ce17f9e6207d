use std::path::Path;
use std::process::{Command, Output};

use kflow_core::exact_oracles::nil_solution;
use serde_json::Value;

fn kflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let o = kflow(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).expect("utf-8")
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).expect("valid JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().expect("header").split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().expect("float")).collect())
        .collect();
    (header, rows)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1e-300) || a == b
}

#[test]
fn su2_round_k_is_one_over_32() {
    let v = json(&["curvature", "--class", "su2", "--metric", "1,1,1"]);
    for k in v["frame"]["k"].as_array().unwrap() {
        assert!(close(f(k), 1.0 / 32.0, 1e-14), "{k}");
    }
    assert_eq!(v["class"], "su2");
}

#[test]
fn flat_curvature_is_zero() {
    let v = json(&["curvature", "--class", "r3", "--metric", "2,3,5"]);
    for key in ["ricci", "schouten", "cotton_star", "j", "h", "k"] {
        for x in v["frame"][key].as_array().unwrap() {
            assert_eq!(f(x), 0.0, "{key}");
        }
    }
}

#[test]
fn sol_unit_k() {
    let v = json(&["curvature", "--class", "sol", "--metric", "1,1,1"]);
    let k: Vec<f64> = v["frame"]["k"].as_array().unwrap().iter().map(f).collect();
    for (got, want) in k.iter().zip([2.5, -7.5, 2.5]) {
        assert!(close(*got, want, 1e-14), "{k:?}");
    }
}

#[test]
fn curvature_csv_is_flattened() {
    let text = ok(&["curvature", "--class", "nil", "--metric", "1,1,1", "--format", "csv"]);
    assert!(text.starts_with("key,value\n"));
    assert!(text.lines().any(|l| l.starts_with("frame.k.0,")));
}

#[test]
fn su2_flow_collapses() {
    let o = kflow(&["flow", "--class", "su2", "--metric", "1,2,3", "--samples", "10"]);
    assert!(o.status.success());
    let meta: Value = serde_json::from_slice(&o.stderr).expect("sidecar JSON on stderr");
    assert_eq!(meta["stop_reason"], "Collapse");
    assert!(f(&meta["t_final"]) > 0.0);
    let (header, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    assert_eq!(header[..4], ["t", "a", "b", "c"]);
    assert_eq!(rows.len(), 10);
}

#[test]
fn normalized_su2_equilibrates() {
    let o = kflow(&["flow", "--class", "su2", "--metric", "1,2,3", "--normalized"]);
    assert!(o.status.success());
    let meta: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(meta["stop_reason"], "Equilibrated");
    assert_eq!(meta["normalized"], true);
}

#[test]
fn nil_trajectory_matches_closed_form() {
    let text = ok(&[
        "flow", "--class", "nil", "--metric", "2,1,3", "--t-max", "5", "--samples", "50",
    ]);
    let (_, rows) = csv_rows(&text);
    assert_eq!(rows.len(), 50);
    for r in &rows {
        let want = nil_solution(2.0, 1.0, 3.0, r[0]).unwrap();
        for i in 0..3 {
            assert!(close(r[i + 1], want[i], 1e-6), "t={} {r:?} {want:?}", r[0]);
        }
    }
}

#[test]
fn csv_values_round_trip_exactly() {
    let text = ok(&["flow", "--class", "sl2r", "--metric", "1,2,3", "--t-max", "2", "--samples", "7"]);
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let x: f64 = field.parse().unwrap();
            assert_eq!(format!("{x:.16e}"), field);
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        ok(&[
            "flow", "--class", "isom_r2", "--metric", "1,2,3", "--t-max", "5", "--out",
            p.to_str().unwrap(),
        ]);
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("one.csv"), run("two.csv"));
    assert_eq!(
        ok(&["check", "--cases", "10", "--seed", "42"]),
        ok(&["check", "--cases", "10", "--seed", "42"])
    );
}

#[test]
fn out_file_gets_sidecar_and_chart() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.json");
    let svg = dir.path().join("traj.svg");
    ok(&[
        "flow", "--class", "h2xr", "--metric", "1,2", "--t-max", "3", "--format", "json",
        "--out", out.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    let data: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(data["rows"].as_array().is_some_and(|r| !r.is_empty()));
    let meta_path = Path::new(dir.path()).join("traj.meta.json");
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(meta_path).unwrap()).unwrap();
    assert!(meta["stop_reason"].is_string());
    let chart = std::fs::read_to_string(svg).unwrap();
    assert!(chart.starts_with("<svg") && chart.trim_end().ends_with("</svg>"));
}

#[test]
fn check_passes_by_default() {
    let text = ok(&["check"]);
    assert!(text.contains("22 of 22 invariants passed"), "{text}");
}

#[test]
fn injected_fault_is_caught() {
    let o = kflow(&["check", "--cases", "20", "--inject-fault"]);
    assert_eq!(o.status.code(), Some(1));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("counterexample for k_equals_2_j_plus_h"), "{text}");
    assert!(text.contains("lhs =") && text.contains("rhs ="));
}

#[test]
fn symbol_report() {
    let v = json(&["symbol", "--cases", "200"]);
    assert!((f(&v["gauge_mode_ratio"]) - 0.75).abs() <= 1e-12);
    assert!(f(&v["tt_max_error"]) <= 1e-12);
    assert!(v["ungauged_nullspace_dim_estimate"].as_u64().unwrap() >= 1);
}

#[test]
fn oracle_diff_within_tolerance() {
    let v = json(&["oracle-diff", "--class", "nil", "--metric", "2,1,3", "--t-max", "5"]);
    assert!(f(&v["max_relative_deviation"]) <= 1e-6);
    let v = json(&["oracle-diff", "--class", "h3", "--metric", "4", "--t-max", "10"]);
    assert!(f(&v["max_relative_deviation"]) <= 1e-8);
}

#[test]
fn oracle_diff_without_closed_form_is_usage_error() {
    assert_eq!(kflow(&["oracle-diff", "--class", "sl2r", "--metric", "1,2,3"]).status.code(), Some(2));
}

#[test]
fn sweep_grid_rows() {
    let text = ok(&["sweep", "--class", "su2", "--grid", "3x3x3", "--range", "0.5:2"]);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 27);
    assert!(rows.iter().all(|r| r.split(',').nth(3) == Some("Collapse")));
}

#[test]
fn bad_input_exit_codes() {
    assert_eq!(kflow(&["flow", "--class", "su2", "--metric", "1,-1,1"]).status.code(), Some(2));
    assert_eq!(kflow(&["flow", "--class", "su2", "--metric", "1,1"]).status.code(), Some(2));
    assert_eq!(kflow(&["curvature", "--class", "h3", "--metric", "1"]).status.code(), Some(2));
    let o = kflow(&["flow", "--class", "su2", "--metric", "1,1,1", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn flat_curvature_at_listed_metric() {
    let v = json(&["curvature", "--class", "r3", "--metric", "5,1,2"]);
    assert!(["scalar_curvature", "k_trace", "f2"].iter().all(|k| f(&v[k]) == 0.0));
    assert!(v["frame"]["k"].as_array().unwrap().iter().all(|x| f(x) == 0.0));
}

#[test]
fn su2_merges_before_extinction() {
    let o = kflow(&["flow", "--class", "su2", "--metric", "2,1.5,1", "--t-max", "100"]);
    assert!(o.status.success());
    let meta: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(meta["stop_reason"], "Collapse");
    let (_, rows) = csv_rows(std::str::from_utf8(&o.stdout).unwrap());
    let gap = |r: &Vec<f64>| {
        let (lo, hi) = r[1..4].iter().fold((f64::INFINITY, 0.0f64), |(l, h), v| (l.min(*v), h.max(*v)));
        (hi - lo) / lo
    };
    assert!(gap(&rows[0]) > 0.5);
    assert!(rows.iter().any(|r| gap(r) < 1e-6), "no merged sample before extinction");
}

#[test]
fn normalized_su2_keeps_volume() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("n.csv");
    ok(&["flow", "--class", "su2", "--metric", "2,1.5,1", "--normalized", "--out", out.to_str().unwrap()]);
    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("n.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["stop_reason"], "Equilibrated");
    let (_, rows) = csv_rows(&std::fs::read_to_string(out).unwrap());
    for r in &rows {
        assert!(close(r[1] * r[2] * r[3], 3.0, 1e-10), "{r:?}");
    }
    let last = rows.last().unwrap();
    assert!(close(last[1], last[3], 1e-8) && close(last[2], last[3], 1e-8), "{last:?}");
}

#[test]
fn nil_unit_trajectory_matches_closed_form() {
    let text = ok(&["flow", "--class", "nil", "--metric", "1,1,1", "--t-max", "10"]);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header.last().map(String::as_str), Some("invariant"));
    assert_eq!(rows.len(), 1000);
    for r in &rows {
        let want = nil_solution(1.0, 1.0, 1.0, r[0]).unwrap();
        assert!((0..3).all(|i| close(r[i + 1], want[i], 1e-6)), "{r:?}");
    }
}

#[test]
fn anisotropic_su2_has_no_oracle() {
    assert_eq!(kflow(&["oracle-diff", "--class", "su2", "--metric", "1,2,3"]).status.code(), Some(2));
}
