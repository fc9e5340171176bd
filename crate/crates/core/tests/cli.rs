use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tricycle"));
    for k in ["TRICYCLE_QUAD_TOL", "TRICYCLE_PF_TOL", "TRICYCLE_ROOT_XTOL", "TRICYCLE_SIMPLE_TOL", "TRICYCLE_TANGENT_TOL", "TRICYCLE_ODE_RTOL"] {
        c.env_remove(k);
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn oval_at_minus_two() {
    let out = run(&["oval", "--h", "-2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], "1");
    let x1 = v["data"][0]["x1"].as_f64().unwrap();
    let x2 = v["data"][0]["x2"].as_f64().unwrap();
    assert!((x1 - (2.0 - 3f64.sqrt())).abs() < 1e-12);
    assert!((x2 - 2.0).abs() < 1e-12);
}

#[test]
fn poly_verify_matches_exactly() {
    let out = run(&["poly-verify"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() >= 30);
    assert!(checks.iter().all(|c| c["passed"] == true && c["value"] == "exact-match" && c["anchor"].is_string()));
}

#[test]
fn count_zeros_of_a_sigma_direction() {
    let out = run(&["count-zeros", "--greek", "0,-144,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["data"]["report"]["count"].as_u64().unwrap() <= 3);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["oval", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["count-zeros", "--greek", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["count-zeros"]).status.code(), Some(2));
    assert_eq!(run(&["oval", "--h", "0.5"]).status.code(), Some(2));
    let bad_env = bin().env("TRICYCLE_PF_TOL", "abc").arg("oval").output().unwrap();
    assert_eq!(bad_env.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    // a tolerance nobody can meet
    let out = bin().env("TRICYCLE_PF_TOL", "1e-300").args(["pf-check", "--n", "5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
    assert_eq!(json(&out)["config"]["pf_tol"], 1e-300);
}

#[test]
fn csv_output_has_a_header_and_scientific_floats() {
    let out = run(&["--format", "csv", "integrals", "--h", "-3,-1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "h,i_star,i2,i0,di_star,di2,di0,pf_residual");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 8);
    assert!(row.iter().all(|c| c.contains('e')));
}

#[test]
fn scan_output_is_byte_identical() {
    let a = run(&["scan", "--samples", "200", "--seed", "11"]);
    let b = run(&["scan", "--samples", "200", "--seed", "11"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["scan", "--samples", "200", "--seed", "12"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn find_three_failure_is_a_check_failure() {
    let out = run(&["find-three", "--targets", "-1,-2,-3"]);
    assert_eq!(out.status.code(), Some(1));
}

fn write(dir: &Path, args: &[&str]) {
    let out = bin().arg("--out-dir").arg(dir).args(args).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{args:?}");
}

#[test]
fn report_aggregates_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let empty = bin().args(["report", "--dir"]).arg(dir.path()).output().unwrap();
    assert_eq!(empty.status.code(), Some(1));

    write(dir.path(), &["oval", "--n", "3"]);
    write(dir.path(), &["ect", "--n", "40"]);
    let out = bin().args(["report", "--dir"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema_version"], "1");
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["ect/all_negative", "ect/delta4_center", "oval/roots_ordered"]);
    assert_eq!(v["data"][0]["source"], "ect.json");
}
