use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests/data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_smallsphere"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), v)
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn minimize_electric() {
    let (code, v) = json(&["minimize", "--input", &data("electric.toml")]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "minimize");
    assert_eq!(v["results"]["status"], "unique-minimum");
    for x in v["results"]["a_bar"].as_array().unwrap() {
        assert!(num(x).abs() < 1e-12);
    }
    assert!((num(&v["results"]["e5_min"]) - 0.1).abs() < 1e-12);
    assert_eq!(v["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn energy_at_observer() {
    let (code, v) = json(&["energy", "--input", &data("electric.toml"), "--observer", "0.3,-0.2,0.1"]);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert!(num(&r["e5_bel_robinson"]) > 0.1);
    assert!((num(&r["observer_a"][1]) + 0.2).abs() < 1e-15);
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["pass"], true, "{c}");
    }
}

#[test]
fn decompose_null_pair() {
    let (code, v) = json(&["decompose", "--input", &data("null_pair.toml")]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["V_class"], "null-future");
    let (_, m) = json(&["minimize", "--input", &data("null_pair.toml")]);
    assert_eq!(m["results"]["status"], "null-V-no-minimum");
}

#[test]
fn sparse_riemann_matches_weyl_input() {
    let (_, a) = json(&["decompose", "--input", &data("schwarzschild.toml")]);
    let (_, b) = json(&["decompose", "--input", &data("electric.toml")]);
    assert_eq!(a["results"]["vacuum"], true);
    assert_eq!(a["results"]["D"], b["results"]["D"]);
    assert_eq!(a["results"]["V"], b["results"]["V"]);
}

#[test]
fn nonvacuum_fluid() {
    let (code, v) = json(&["nonvacuum", "--input", &data("fluid.toml")]);
    assert_eq!(code, 0);
    let r = &v["results"];
    assert!((num(&r["limit_energy"]) - 4.0 * PI).abs() < 1e-12);
    assert!((num(&r["minimum_energy"]) - 4.0 * PI).abs() < 1e-12);
    assert_eq!(r["dominant_energy_sampled"], true);
}

#[test]
fn verify_integrals_passes() {
    let (code, v) = json(&["verify", "--suite", "integrals"]);
    assert_eq!(code, 0);
    assert!(v["input_digest"].is_null());
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() > 5);
    assert!(checks.iter().all(|c| c["pass"] == true));
    assert!(checks.iter().any(|c| c["name"] == "integrals/monomial_table"));
}

#[test]
fn verify_all_suites_pass() {
    let out = run(&["verify", "--seed", "7", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn failing_check_exits_one() {
    // a degree-4 grid cannot integrate the degree-8 integrands exactly
    let out = run(&["verify", "--suite", "integrals", "--grid-degree", "4"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn input_errors_exit_two() {
    let out = run(&["decompose", "--input", &data("inconsistent.toml")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("R_1001"));

    let out = run(&["decompose", "--input", &data("two_sources.toml")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("conflicting"));

    let out = run(&["energy", "--input", &data("fluid.toml")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not vacuum"));

    let out = run(&["energy", "--input", &data("missing.toml")]);
    assert_eq!(out.status.code(), Some(2));

    let out = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reports_are_byte_stable() {
    let args = ["energy", "--input", &data("electric.toml"), "--observer", "0.5,0,0"];
    let first = run(&args).stdout;
    assert_eq!(first, run(&args).stdout);
    let path = std::env::temp_dir().join(format!("smallsphere-report-{}.json", std::process::id()));
    let mut with_output = args.to_vec();
    let p = path.to_string_lossy().into_owned();
    with_output.extend(["--output", &p]);
    let out = run(&with_output);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), first);
    std::fs::remove_file(path).ok();
}

#[test]
fn csv_and_text_formats() {
    let out = run(&["minimize", "--input", &data("electric.toml"), "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("kind,name,value,tolerance,pass\n"));
    assert!(text.contains("result,e5_min,1.0000000000000001e-1,,"));
    let out = run(&["minimize", "--input", &data("electric.toml"), "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("status = unique-minimum"));
}

#[test]
fn derivative_input_is_projected() {
    let (code, v) = json(&["decompose", "--input", &data("dweyl.toml")]);
    assert_eq!(code, 0, "{v}");
    assert!(num(&v["results"]["dweyl_raw_bianchi_residual"]) > 0.1);
    assert!(num(&v["results"]["dweyl_projection_distance"]) > 0.0);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"dweyl_projected_bianchi"));
    assert!(names.contains(&"dweyl_divergence_identities"));
}
