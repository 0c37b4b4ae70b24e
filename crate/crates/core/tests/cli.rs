use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn calat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_calat"))
        .args(args)
        .env_remove("CALAT_BACKEND")
        .output()
        .expect("spawn calat")
}

fn ok(args: &[&str]) -> String {
    let out = calat(args);
    assert!(
        out.status.success(),
        "calat {args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

fn point(lattice: &Value, i: i64, j: i64) -> Vec<String> {
    lattice["points"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["i"] == i && p["j"] == j)
        .map(|p| p["xyz"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_owned()).collect())
        .unwrap_or_else(|| panic!("no point ({i},{j})"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const EXAMPLE2: &str = r#"{"a": "-1/3", "b": "1/3", "c": "-1/3", "alpha": 1, "beta": 2, "gamma": -1, "delta": 2}"#;

#[test]
fn synth_example2_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = write(dir.path(), "c.json", EXAMPLE2);
    let out = json(&ok(&["synth", "--coeffs", &coeffs, "--window", "-1", "2", "-1", "2"]));
    assert_eq!(out["points"].as_array().unwrap().len(), 16);
    assert_eq!(point(&out, -1, 1), ["1/1", "1/1", "-5/1"]);
    assert_eq!(point(&out, 1, -1), ["3/1", "1/1", "1/1"]);
    assert_eq!(point(&out, -1, -1), ["-1/1", "-1/1", "-1/1"]);
}

#[test]
fn synth_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out.json");
    let stdout = ok(&["synth", "--example", "example2", "-o", target.to_str().unwrap()]);
    assert!(stdout.is_empty());
    let text = fs::read_to_string(&target).unwrap();
    assert_eq!(json(&text)["imin"], -1);
}

#[test]
fn incompatible_constant_set_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = write(
        dir.path(),
        "bad.json",
        r#"{"a": "1/2", "b": "1/3", "c": "-1/3", "alpha": 1, "beta": 2, "gamma": -1, "delta": 2}"#,
    );
    let out = calat(&["synth", "--coeffs", &coeffs]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn malformed_json_exits_1_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let coeffs = write(dir.path(), "broken.json", "{\"a\": 1,\n  \"b\" 2}");
    let out = calat(&["synth", "--coeffs", &coeffs]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn convex6_has_ten_distinct_points() {
    let out = json(&ok(&["synth", "--example", "convex6"]));
    let pts = out["points"].as_array().unwrap();
    assert_eq!(pts.len(), 25);
    let mut distinct: Vec<&Value> = pts.iter().map(|p| &p["xyz"]).collect();
    distinct.sort_by_key(|v| v.to_string());
    distinct.dedup();
    assert_eq!(distinct.len(), 10);
}

#[test]
fn extract_example1_is_constant() {
    let out = json(&ok(&["extract", "--example", "example1"]));
    let sets = out["sets"].as_array().unwrap();
    assert_eq!(sets.len(), 9);
    for s in sets {
        assert_eq!(s["a"], "3/4");
        assert_eq!(s["beta"], "0/1");
        assert_eq!(s["gamma"], "1/2");
    }
}

#[test]
fn extract_round_trips_through_lattice_file() {
    let dir = tempfile::tempdir().unwrap();
    let lattice = ok(&["synth", "--example", "example2"]);
    let path = write(dir.path(), "l.json", &lattice);
    let a = ok(&["extract", "--lattice", &path]);
    let b = ok(&["extract", "--example", "example2"]);
    assert_eq!(a, b);
}

#[test]
fn coplanar_with_origin_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut points = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            points.push(format!(r#"{{"i": {i}, "j": {j}, "xyz": [{}, {}, 1]}}"#, i + 1, j * j + 1));
        }
    }
    let text = format!(
        r#"{{"imin": 0, "imax": 2, "jmin": 0, "jmax": 2, "points": [{}]}}"#,
        points.join(",")
    );
    // r(1,1) moved to the origin, so its frame is degenerate.
    let flat = text.replace(r#""xyz": [2, 2, 1]"#, r#""xyz": [0, 0, 0]"#);
    let path = write(dir.path(), "flat.json", &flat);
    let out = calat(&["extract", "--lattice", &path]);
    assert_ne!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
}

#[test]
fn export_counts() {
    let obj = ok(&["export", "--example", "example2"]);
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), 16);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 18);
    let off = ok(&["export", "--example", "example1", "--format", "off", "--digits", "3"]);
    let mut lines = off.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("OFF"));
    assert_eq!(lines.next(), Some("25 32 0"));
}

#[test]
fn analyze_summaries() {
    let h = json(&ok(&["analyze", "--example", "example2"]));
    assert_eq!(h["summary"]["harmonic"], true);
    let c = json(&ok(&["analyze", "--example", "convex6"]));
    assert_eq!(c["summary"]["convex_everywhere"], true);
    assert_eq!(c["summary"]["harmonic"], false);
    let e = json(&ok(&["analyze", "--example", "example3_d0", "--window", "-3", "3", "-3", "3"]));
    assert_eq!(e["summary"]["eigen_s"], "8/1");
    assert_eq!(e["summary"]["convex_everywhere"], true);
    let n = json(&ok(&["analyze", "--example", "example1", "--window", "-3", "3", "-3", "3"]));
    assert_eq!(n["summary"]["harmonic"], false);
    assert_eq!(n["summary"]["convex_everywhere"], false);
    assert_eq!(n["summary"]["eigen_s"], "-1/1");
    let lattice = json(&ok(&["synth", "--example", "example1", "--window", "-3", "3", "-3", "3"]));
    for site in n["sites"].as_array().unwrap() {
        let r = point(&lattice, site["i"].as_i64().unwrap(), site["j"].as_i64().unwrap());
        let lap: Vec<String> = site["laplacian"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_owned()).collect();
        let neg: Vec<String> = r.iter().map(|c| c.strip_prefix('-').map_or(format!("-{c}"), str::to_owned)).collect();
        let neg: Vec<String> = neg.into_iter().map(|c| if c == "-0/1" { "0/1".into() } else { c }).collect();
        assert_eq!(lap, neg);
    }
}

#[test]
fn analyze_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    ok(&["analyze", "--example", "example2", "--csv", csv.to_str().unwrap()]);
    let text = fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("i,j,laplacian_x"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn float_backend_matches_exact_points() {
    let exact = json(&ok(&["synth", "--example", "example2"]));
    let float = json(&ok(&["--backend", "float", "synth", "--example", "example2"]));
    for (e, f) in exact["points"].as_array().unwrap().iter().zip(float["points"].as_array().unwrap()) {
        for (x, y) in e["xyz"].as_array().unwrap().iter().zip(f["xyz"].as_array().unwrap()) {
            let (n, d) = x.as_str().unwrap().split_once('/').unwrap();
            let x = n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap();
            assert!((x - y.as_f64().unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn check_compat_reports() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["check-compat", "--example", "example2"]);
    let field = ok(&["extract", "--example", "example1"]);
    let broken = field.replacen("\"alpha\": \"1/2\"", "\"alpha\": \"3/5\"", 1);
    assert_ne!(field, broken);
    let path = write(dir.path(), "f.json", &broken);
    let out = calat(&["check-compat", "--coeffs", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("incompatible"));
}

#[test]
fn example_listing_and_output() {
    let list = ok(&["example", "--list"]);
    assert!(list.lines().any(|l| l.starts_with("example3_dm1")));
    let ex = json(&ok(&["example", "example3_d1"]));
    assert_eq!(ex["name"], "example3_d1");
    assert_eq!(ex["coefficients"]["delta"], "1/1");
    assert_eq!(ex["lattice"]["points"].as_array().unwrap().len(), 9);
}

#[test]
fn repeated_runs_are_identical() {
    for args in [
        &["synth", "--example", "example1"][..],
        &["analyze", "--example", "convex6"][..],
        &["export", "--example", "example2", "--format", "off"][..],
    ] {
        assert_eq!(ok(args), ok(args));
    }
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(calat(&["synth"]).status.code(), Some(1));
    assert_eq!(calat(&["synth", "--example", "nope"]).status.code(), Some(1));
    assert_eq!(calat(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(calat(&["synth", "--example", "example1", "--window", "2", "1", "0", "1"]).status.code(), Some(1));
    assert_eq!(calat(&["--help"]).status.code(), Some(0));
}
