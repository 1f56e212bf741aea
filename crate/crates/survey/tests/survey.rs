use std::fs;

use cmorbit_survey::cache::quarantine_path;
use cmorbit_survey::config::{CensusGrid, DiscriminantRange};
use cmorbit_survey::{run_survey, Mode, SurveyConfig, SurveyError};

fn quad(min: i64, jobs: usize) -> SurveyConfig {
    let mut cfg = SurveyConfig::new(Mode::Quad);
    cfg.discriminants = Some(DiscriminantRange { min, max: -1 });
    cfg.jobs = jobs;
    cfg
}

#[test]
fn quad_table_matches_golden_file() {
    let s = run_survey(&quad(-200, 1)).unwrap();
    assert_eq!(s.exit_code(), 0);
    assert_eq!(s.rendered.unwrap(), include_str!("data/quad_200.csv"));
}

#[test]
fn output_is_independent_of_jobs() {
    let mut a = quad(-120, 1);
    a.height_limit = 0;
    let mut b = a.clone();
    b.jobs = 3;
    assert_eq!(run_survey(&a).unwrap().rendered, run_survey(&b).unwrap().rendered);
}

#[test]
fn corrupt_cache_lines_are_quarantined() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cache.jsonl");
    let mut cfg = quad(-60, 1);
    cfg.height_limit = 0;
    cfg.cache = Some(path.clone());
    let fresh = run_survey(&cfg).unwrap();
    assert_eq!(fresh.cache_hits, 0);
    let warm = run_survey(&cfg).unwrap();
    assert_eq!(warm.computed, 0);
    assert_eq!(warm.rendered, fresh.rendered);

    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    lines[2] = lines[2].replace("\"class_number\":", "\"class_number\":1");
    lines.push("{not json".into());
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    let repaired = run_survey(&cfg).unwrap();
    assert_eq!(repaired.quarantined, 2);
    assert_eq!(repaired.computed, 1);
    assert_eq!(repaired.rendered, fresh.rendered);
    assert_eq!(fs::read_to_string(quarantine_path(&path)).unwrap().lines().count(), 2);
    assert_eq!(run_survey(&cfg).unwrap().quarantined, 0);
}

#[test]
fn census_and_json_output() {
    let mut cfg = SurveyConfig::new(Mode::Census);
    cfg.census = Some(CensusGrid { x: vec![4, 1, 2, 2] });
    assert_eq!(run_survey(&cfg).unwrap().rendered.unwrap(), "X,N\n1,2\n2,25\n4,1225\n");
    cfg.format = cmorbit_survey::Format::Json;
    let v: serde_json::Value = serde_json::from_str(&run_survey(&cfg).unwrap().rendered.unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
}

#[test]
fn invalid_configurations() {
    let bad = [
        r#"{"mode": "quad"}"#,
        r#"{"mode": "quad", "discriminants": {"min": -10, "max": -20}}"#,
        r#"{"mode": "quad", "discriminants": {"min": -10, "max": 5}}"#,
        r#"{"mode": "quad", "discriminants": {"min": -10, "max": -1}, "colour": 3}"#,
        r#"{"mode": "census", "census": {"x": []}}"#,
        r#"{"mode": "quartic", "quartic": {"a_min": 3, "a_max": 1, "b_min": 1, "b_max": 2}}"#,
        r#"{"version": 2, "mode": "census", "census": {"x": [1]}}"#,
    ];
    for text in bad {
        let e = SurveyConfig::from_json(text).unwrap_err();
        assert!(matches!(e, SurveyError::ConfigInvalid(_)), "{text}");
        assert_eq!(e.exit_code(), 2);
    }
    let mut cfg = quad(-3, 1);
    cfg.discriminants = Some(DiscriminantRange { min: -2, max: -1 });
    assert!(matches!(run_survey(&cfg), Err(SurveyError::ConfigInvalid(_))));
}
