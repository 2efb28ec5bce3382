use std::process::{Command, Output};

use serde_json::Value;

fn hamloop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hamloop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value, String) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = hamloop(&all);
    let text = String::from_utf8(out.stdout).unwrap();
    (
        out.status.code().unwrap(),
        serde_json::from_str(&text).unwrap(),
        text,
    )
}

fn check<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["outcomes"][0]["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == name)
        .unwrap()
}

#[test]
fn sphere_report() {
    let (code, v, _) = json(&["sphere"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "1");
    assert_eq!(v["passed"], true);
    assert_eq!(check(&v, "J_U")["actual"], 1.0);
    assert_eq!(check(&v, "J_V")["actual"], -1.0);
}

#[test]
fn table_output_ends_with_summary() {
    let out = hamloop(&["torus", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text
        .trim_end()
        .lines()
        .last()
        .unwrap()
        .starts_with("PASS: 3 of 3"));
}

#[test]
fn reruns_are_byte_identical() {
    let (_, _, a) = json(&["sphere", "--epsilon-hat", "0.4"]);
    let (_, _, b) = json(&["sphere", "--epsilon-hat", "0.4"]);
    assert_eq!(a, b);
    let (_, _, c) = json(&["torus", "--n", "2", "--seed", "3"]);
    let (_, _, d) = json(&["torus", "--n", "2", "--seed", "3"]);
    assert_eq!(c, d);
}

#[test]
fn json_round_trip_is_idempotent() {
    let (_, v, _) = json(&["chern", "--scenario", "sphere"]);
    let once = serde_json::to_string_pretty(&v).unwrap();
    let again: Value = serde_json::from_str(&once).unwrap();
    assert_eq!(serde_json::to_string_pretty(&again).unwrap(), once);
}

#[test]
fn out_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("hamloop-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let (_, _, text) = json(&["sphere", "--out", p]);
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(written.trim_end(), text.trim_end());
}

#[test]
fn exit_codes() {
    assert_eq!(hamloop(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        hamloop(&["sphere", "--epsilon-hat", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        hamloop(&["hirzebruch", "--k", "1", "--tau", "1", "--mu", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hamloop(&["sphere", "--gl-order", "1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        hamloop(&["sphere", "--tol", "nonsense"]).status.code(),
        Some(2)
    );
    // A tolerance nobody can meet turns the report into a failure.
    let (code, v, _) = json(&["sphere", "--tol", "chern=1e-30"]);
    assert_eq!(code, 1);
    assert_eq!(v["passed"], false);
    assert_eq!(check(&v, "chern")["tolerance"], 1e-30);
}

#[test]
fn verify_all_exit_code_follows_report() {
    let (code, v, _) = json(&["verify-all"]);
    let passed = v["passed"].as_bool().unwrap();
    assert_eq!(code, if passed { 0 } else { 1 });
    let outcomes = v["outcomes"].as_array().unwrap();
    let names: Vec<&str> = outcomes
        .iter()
        .map(|o| o["scenario"].as_str().unwrap())
        .collect();
    for s in ["sphere", "torus", "hirzebruch"] {
        assert!(names.contains(&s), "{names:?}");
    }
    for o in outcomes {
        let all = o["checks"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| c["passed"] == true);
        assert_eq!(o["passed"], all);
    }
}
