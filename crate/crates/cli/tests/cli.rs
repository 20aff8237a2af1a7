use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sumprod")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn spectrum_report_has_the_standard_keys() {
    let v = json(&["spectrum", "--field", "101", "--poly", "x1*x2", "--a", "1"]);
    for key in ["command", "inputs", "seed", "results", "checks", "timing_ms"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["command"], "spectrum");
    let s = &v["results"]["spectrum"];
    assert_eq!(s["degree"], 100);
    let lambda = s["lambda"].as_f64().unwrap();
    assert!(lambda <= 2.0 * 101f64.sqrt());
    for c in v["checks"].as_array().unwrap() {
        assert_eq!(c["holds"], true, "{c}");
    }
}

#[test]
fn methods_give_the_same_lambda() {
    let lambda = |m: &str| {
        json(&["spectrum", "--field", "31", "--poly", "x1^2 + x2^2", "--a", "3", "--method", m])["results"]["spectrum"]
            ["lambda"]
            .as_f64()
            .unwrap()
    };
    assert!((lambda("direct") - lambda("transform")).abs() < 1e-9);
}

#[test]
fn degeneracy_detects_a_square_of_a_linear_form() {
    let v = json(&["degeneracy", "--field", "7", "--poly", "x1^2+2*x1*x2+x2^2"]);
    assert!(v["results"]["degeneracy"]["l"].is_object());
    let v = json(&["degeneracy", "--field", "7", "--poly", "x1*x2"]);
    assert!(v["results"]["degeneracy"].get("l").is_none());
}

#[test]
fn gap2_suite_passes() {
    let v = json(&["verify", "--suite", "gap2", "--m", "15"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["holds"] == true));
}

#[test]
fn seed_is_recorded() {
    let v = json(&["sumprod", "--mod", "91", "--set", "random:20", "--seed", "42"]);
    assert_eq!(v["seed"], 42);
}

#[test]
fn csv_has_check_columns() {
    let out = run(&["sumprod", "--field", "101", "--set", "interval:10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,lhs,rhs,holds"));
    assert!(lines.next().is_some());
}

#[test]
fn out_flag_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("sumprod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("k.json");
    let out = run(&["charsum", "kloosterman", "--m", "5", "--a", "1", "--b", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let closed = 2.0 + 2.0 * (4.0 * std::f64::consts::PI / 5.0).cos();
    assert!((v["results"]["re"].as_f64().unwrap() - closed).abs() < 1e-9);
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--field", "7", "--mod", "7"]).status.code(), Some(1));
    assert_eq!(run(&["charsum", "gauss", "--m", "10", "--z", "1"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "--field", "6", "--poly", "x1"]).status.code(), Some(2));
}
