use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simplezero")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn c_series_rows() {
    let out = run(&["coeffs", "--delta", "--nmax", "100", "--series", "c"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 100);
    assert_eq!(rows[0], serde_json::json!([1, 0.0, 0.0]));
}

#[test]
fn a_series_csv() {
    let out = run(&["coeffs", "--delta", "--nmax", "3", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "n,re,im\n1,1,0\n2,-24,0\n3,252,0\n");
}

#[test]
fn zeros_below_first_ordinate_is_empty() {
    let out = run(&["zeros", "--delta", "--tmax", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["result"]["zeros"].as_array().unwrap().is_empty());
}

#[test]
fn zeros_to_twenty_with_plot_data() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("z.csv");
    let out = run(&["zeros", "--delta", "--nmax", "2000", "--tmax", "20", "--plot-data", plot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let zeros = json(&out)["result"]["zeros"].as_array().unwrap().clone();
    let ts: Vec<f64> = zeros.iter().map(|z| z["t"].as_f64().unwrap()).collect();
    assert_eq!(ts.len(), 4);
    assert!((ts[0] - 9.22237939992).abs() < 1e-8);
    let plot = std::fs::read_to_string(plot).unwrap();
    assert!(plot.starts_with("t,z\n"));
    assert_eq!(plot.lines().count(), 402);
}

#[test]
fn negative_tmax_is_a_usage_error() {
    let out = run(&["zeros", "--delta", "--tmax", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tmax"));
}

#[test]
fn local_factor_at_two() {
    let out = run(&["local", "--delta", "--nmax", "100", "--q", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert!((r["factor"]["theta"].as_f64().unwrap() - 1.8392).abs() < 1e-4);
    assert_eq!(r["factor"]["is_square"], false);
    assert!((r["first_zero_ordinate"].as_f64().unwrap() - 2.6534).abs() < 1e-4);
}

#[test]
fn local_inherit_pole_window() {
    let out = run(&["local", "--delta", "--nmax", "2000", "--q", "3", "--inherit"]);
    assert_eq!(out.status.code(), Some(0));
    let ratio = json(&out)["result"]["inherit"]["ratio"].as_f64().unwrap();
    assert!(ratio < 2.0);
}

#[test]
fn rankin_average() {
    let out = run(&["local", "--delta", "--rankin", "--X", "10000"]);
    assert_eq!(out.status.code(), Some(0));
    let mean = json(&out)["result"]["mean"].as_f64().unwrap();
    assert!(mean > 0.85 && mean < 1.15);
}

#[test]
fn twist_direct_and_through_characters_agree() {
    let direct = json(&run(&["twist", "--delta", "--nmax", "2000", "--alpha", "1/3", "--s", "9"]));
    let chars = json(&run(&["twist", "--delta", "--nmax", "2000", "--q", "3", "--s", "9"]));
    let re = |v: &Value| v["result"]["value"][0].as_f64().unwrap();
    let tail = direct["result"]["tail_bound"].as_f64().unwrap();
    assert!((re(&direct) - re(&chars)).abs() <= tail, "{} {} {tail}", re(&direct), re(&chars));
}

#[test]
fn algebra_suite_passes() {
    let out = run(&["verify", "--delta", "--nmax", "200", "--suite", "algebra"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["schema"], 1);
}

#[test]
fn unknown_suite_lists_choices() {
    let out = run(&["verify", "--delta", "--suite", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("coefficients") && err.contains("rankin"), "{err}");
}

#[test]
fn failing_suite_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let out = run(&["verify", "--delta", "--nmax", "200", "--suite", "ibp", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let csv = std::fs::read_to_string(path).unwrap();
    assert!(csv.starts_with("suite,check,relation,value,threshold,passed\n"));
    assert!(csv.contains("ibp,ibp_m_le_4_n_le_10,below,"));
}

#[test]
fn malformed_file_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.txt");
    std::fs::write(&path, "weight twelve\n").unwrap();
    let out = run(&["coeffs", "--newform", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn newform_source_is_required() {
    assert_eq!(run(&["coeffs"]).status.code(), Some(2));
    assert_eq!(run(&["coeffs", "--delta", "--newform", "x"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--delta", "--nmax", "2000", "--suite", "funceq", "zeros", "--threads", "2"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
