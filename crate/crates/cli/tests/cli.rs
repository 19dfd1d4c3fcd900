use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_geodloom"));
    c.env_remove("GEODLOOM_TOL");
    c
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn geodloom")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = run(&full);
    assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn f(v: &Value, path: &str) -> f64 {
    path.split('.').fold(v, |v, k| &v[k]).as_f64().unwrap_or_else(|| panic!("{path} is not a number"))
}

fn scratch(name: &str, body: &str) -> String {
    let p = std::env::temp_dir().join(format!("geodloom-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn tensors_check_passes_on_defaults() {
    let v = json(&["tensors-check", "--draws", "60"]);
    for (name, c) in v["checks"].as_object().unwrap() {
        assert_eq!(c["pass"], Value::Bool(true), "{name}");
    }
}

#[test]
fn constant_angle_holonomy_is_not_integrable() {
    let v = json(&["holonomy", "constant_angle", "--theta0", "1.0", "--loop", "gen0"]);
    assert_eq!(v["verdict"]["result"], "NOT integrable");
    let vals: Vec<f64> = ["from_f", "from_connection", "from_maslov"].iter().map(|k| f(&v["values"], k)).collect();
    for a in &vals {
        for b in &vals {
            assert!((a - b).abs() < 1e-6, "{vals:?}");
        }
    }
    assert!((vals[0] - 0.5 * 1.0f64.cos()).abs() < 1e-6);
}

#[test]
fn plane_is_lagrangian() {
    let v = json(&["gauss", "plane"]);
    assert!(f(&v, "checks.lagrangian.residual") < 1e-7);
}

#[test]
fn json_is_deterministic() {
    let args = ["--json", "maslov", "random_perturbed"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn rcap_holonomy_is_integrable() {
    let v = json(&["holonomy", "rcap"]);
    assert_eq!(v["verdict"]["integrable"], Value::Bool(true));
}

#[test]
fn evolve_matches_the_curvature_law() {
    let v = json(&["evolve", "rcap", "--t", "0.2"]);
    for (name, c) in v["checks"].as_object().unwrap() {
        assert_eq!(c["pass"], Value::Bool(true), "{name}");
    }
}

#[test]
fn integrate_recovers_the_chart() {
    let v = json(&["integrate", "random_perturbed"]);
    assert!(f(&v, "checks.sigma_recovery.residual") < 1e-7);
}

#[test]
fn undesingularizable_lift_exits_2() {
    let o = run(&["integrate", "cap_circle_glued_curve"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("t = "));
}

#[test]
fn tightened_tolerance_exits_3() {
    let o = bin().env("GEODLOOM_TOL", "lagrangian=1e-20").args(["gauss", "rcap"]).output().unwrap();
    assert_eq!(code(&o), 3);
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(code(&run(&["gauss", "no_such_chart"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    let o = bin().env("GEODLOOM_TOL", "bogus=1").args(["gauss", "plane"]).output().unwrap();
    assert_eq!(code(&o), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn schema_violations_exit_1() {
    let unknown = scratch("unknown.json", r#"{"schema": 1, "dimension": 1, "colour": "red"}"#);
    assert_eq!(code(&run(&["--scene", &unknown, "gauss", "plane"])), 1);
    let dup = scratch(
        "dup.json",
        r#"{"schema": 1, "dimension": 1, "charts": [
            {"name": "a", "chart": {"gallery": {"name": "plane"}}},
            {"name": "a", "chart": {"gallery": {"name": "rcap"}}}]}"#,
    );
    assert_eq!(code(&run(&["--scene", &dup, "gauss", "a"])), 1);
    let version = scratch("version.json", r#"{"schema": 2, "dimension": 1}"#);
    assert_eq!(code(&run(&["--scene", &version, "gauss", "plane"])), 1);
}

#[test]
fn constant_angle_fixture() {
    let s = fixture("constant_angle.json");
    let one = json(&["--scene", &s, "holonomy", "curve"]);
    let two = json(&["--scene", &s, "holonomy", "curve", "--loop", "twice"]);
    assert_eq!(one["scene_description"].as_str().map(|d| !d.is_empty()), Some(true));
    let h = 0.5 * 1.0f64.cos();
    assert!((f(&one, "values.from_maslov") - h).abs() < 1e-6);
    assert!((f(&two, "values.from_maslov") - 2.0 * h).abs() < 1e-6);
    let orth = json(&["--scene", &s, "holonomy", "orthogonal"]);
    assert_eq!(orth["verdict"]["integrable"], Value::Bool(true));
    let flux = json(&["--scene", &s, "flux", "tilt"]);
    assert!(f(&flux, "flux").abs() > 1e-3);
}

#[test]
fn surface_fixture() {
    let s = fixture("boost_invariant_surface.json");
    let v = json(&["--scene", &s, "holonomy", "cap", "--loop", "square"]);
    assert_eq!(v["verdict"]["integrable"], Value::Bool(true));
    assert!(f(&v, "tolerances.holonomy") == 1e-6);
    let flux = json(&["--scene", &s, "flux", "parallel"]);
    assert!(f(&flux, "flux").abs() < 1e-9);
    json(&["--scene", &s, "maslov", "bumpy"]);
}

#[test]
fn tabulated_fixture() {
    let s = fixture("tabulated_curve.json");
    let g = json(&["--scene", &s, "gauss", "equidistant"]);
    let lam = g["center"]["lambdas"][0].as_f64().unwrap();
    assert!((lam.abs() - 0.3f64.tanh()).abs() < 1e-9, "{lam}");
    let i = json(&["--scene", &s, "integrate", "equidistant"]);
    assert!((f(&i, "shift").abs() - 0.3).abs() < 1e-9);
    assert_eq!(code(&run(&["--scene", &s, "evolve", "equidistant", "--t", "0.1"])), 2);
}

#[test]
fn csv_tables_have_headers() {
    let o = run(&["--csv", "flow", "rcap", "--T", "0.02", "--dt", "0.01"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,dt,min_lambda,max_lambda,mean_f,constraint_drift,small_curvature"));
    assert_eq!(lines.count(), 3);
    assert_eq!(code(&run(&["--csv", "holonomy", "rcap"])), 1);
}

#[test]
fn svg_output() {
    let path = std::env::temp_dir().join(format!("geodloom-{}-plot.svg", std::process::id()));
    let p = path.to_string_lossy().into_owned();
    assert_eq!(code(&run(&["--svg", &p, "gauss", "rcap"])), 0);
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.starts_with("<?xml") && body.contains("<polyline"));
    assert_eq!(code(&run(&["--svg", &p, "gauss", "rcap", "--n", "3"])), 1);
}
