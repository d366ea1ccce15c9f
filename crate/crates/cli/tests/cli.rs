use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn teamform(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_teamform"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = teamform(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn enumerate_ex1_json() {
    let out = teamform(&["enumerate", "--example", "EX1", "--output", "json"]);
    assert!(out.status.success());
    assert_eq!(
        String::from_utf8(out.stdout).unwrap().trim(),
        r#"{"max_projects":4,"num_maximal":10,"num_maximal_classes":3,"num_states":35}"#
    );
}

#[test]
fn classes_flag_adds_class_summary() {
    let v = json(&[
        "enumerate",
        "--example",
        "EX1",
        "--output",
        "json",
        "--classes",
    ]);
    let classes = v["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 3);
    let total: u64 = classes.iter().map(|c| c["count"].as_u64().unwrap()).sum();
    assert_eq!(total, 10);
}

#[test]
fn stochastic_stability_of_ex2() {
    let v = json(&["stochastic", "--example", "EX2", "--output", "json"]);
    assert_eq!(v["agree"], Value::Bool(true));
    assert_eq!(v["num_absorbing"], 190);
    assert_eq!(v["ss"].as_array().unwrap().len(), 108);
    assert!(v["ss"][0].as_array().unwrap().len() == 4);
}

#[test]
fn coalitional_stability_reports_thresholds_and_witnesses() {
    let v = json(&[
        "stability",
        "--notion",
        "cs",
        "--example",
        "EX2",
        "--output",
        "json",
    ]);
    assert_eq!(v["count"], 28);
    assert_eq!(
        v["thresholds"]["low"],
        serde_json::json!({"num": 1, "den": 2})
    );
    assert_eq!(
        v["thresholds"]["high"],
        serde_json::json!({"num": 3, "den": 2})
    );
    let blocked = v["blocked"].as_array().unwrap();
    assert!(blocked
        .iter()
        .filter(|b| b["state"].as_array().unwrap().len() == 4)
        .all(|b| b["coalition"] == serde_json::json!(["j", "k"])));
    let high = json(&[
        "stability",
        "--notion",
        "cs",
        "--cost",
        "1.5",
        "--example",
        "EX2",
        "--output",
        "json",
    ]);
    assert_eq!(high["count"], 190);
}

#[test]
fn verify_passes_on_fixtures() {
    for name in ["EX1", "EX3", "MAR"] {
        let out = teamform(&["verify", "--example", name]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}

#[test]
fn stationary_needs_an_epsilon() {
    let out = teamform(&["stationary", "--example", "EX1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json(&[
        "stationary",
        "--example",
        "EX1",
        "--epsilon",
        "0.0001",
        "--output",
        "json",
    ]);
    let mass: f64 = v["mass_on_max_projects"].as_str().unwrap().parse().unwrap();
    assert!(mass > 0.99);
    let residual: f64 = v["residual"].as_str().unwrap().parse().unwrap();
    assert!(residual <= 1e-10);
}

#[test]
fn simulation_is_reproducible() {
    let args = [
        "simulate",
        "--example",
        "EX1",
        "--epsilon",
        "0.01",
        "--steps",
        "20000",
        "--seed",
        "9",
        "--output",
        "json",
        "--compare",
    ];
    let a = teamform(&args);
    let b = teamform(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v["report"]["tv_distance"].is_string());
}

#[test]
fn usage_and_model_errors_exit_with_2() {
    assert_eq!(
        teamform(&["enumerate", "--example", "NOPE"]).status.code(),
        Some(2)
    );
    assert_eq!(teamform(&["enumerate"]).status.code(), Some(2));
    assert_eq!(
        teamform(&[
            "stability",
            "--notion",
            "cs",
            "--cost",
            "-1",
            "--example",
            "EX1"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn capacity_errors_exit_with_3() {
    let out = teamform(&["stability", "--notion", "cs", "--example", "PUB"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("capacity"));
}

#[test]
fn example_model_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["EX1", "EX2", "MAR", "PUB"] {
        let out = teamform(&["examples", name, "--output", "json"]);
        assert!(out.status.success());
        let path = dir.path().join(format!("{name}.json"));
        fs::write(&path, &out.stdout).unwrap();
        let path = path.to_str().unwrap();
        let from_file = teamform(&["enumerate", "--model", path, "--output", "json"]);
        let builtin = teamform(&["enumerate", "--example", name, "--output", "json"]);
        assert_eq!(from_file.stdout, builtin.stdout, "{name}");
    }
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value =
        serde_json::from_slice(&teamform(&["examples", "EX1", "--output", "json"]).stdout).unwrap();
    v["colour"] = Value::String("blue".into());
    let path = dir.path().join("bad.json");
    fs::write(&path, v.to_string()).unwrap();
    let out = teamform(&["enumerate", "--model", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}
