use std::fs;
use std::process::{Command, Output};

fn cmorbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmorbit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn class_group_of_a_quadratic_field() {
    let o = cmorbit(&["classgroup", "--disc", "-84"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["elementary_divisors"], serde_json::json!(["2", "2"]));
}

#[test]
fn degree_of_a_quartic_field() {
    let o = cmorbit(&["degree", "--poly", "3,0,5,0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["primitive"], true);
    assert_eq!(v["moduli_degree"].as_u64().unwrap() * v["subgroup"].as_u64().unwrap(), v["reflex_class_number"]);
}

#[test]
fn census_table() {
    let o = cmorbit(&["census", "1", "3"]);
    assert_eq!(stdout(&o), "X,N\n1,2\n3,241\n");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"mode": "quad", "discriminants": {"min": -1, "max": -9}}"#).unwrap();
    assert_eq!(cmorbit(&["survey", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(cmorbit(&["survey", "--jobs", "0", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(cmorbit(&["cmtypes", "--poly", "-2,0,1"]).status.code(), Some(4));
    assert_eq!(cmorbit(&["height", "--disc", "-12"]).status.code(), Some(4));
    assert_eq!(cmorbit(&["survey", dir.path().join("missing.json").to_str().unwrap()]).status.code(), Some(4));

    let good = dir.path().join("good.json");
    let out = dir.path().join("table.csv");
    fs::write(&good, r#"{"mode": "quad", "discriminants": {"min": -40, "max": -1}, "height_limit": 0}"#).unwrap();
    let o = cmorbit(&["survey", good.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let table = fs::read_to_string(&out).unwrap();
    assert_eq!(table.lines().count(), 15);
    let f = cmorbit(&["fit", out.to_str().unwrap(), "--x", "D", "--y", "h", "--log"]);
    assert_eq!(f.status.code(), Some(0));
    assert!(stdout(&f).contains("slope"));
}
