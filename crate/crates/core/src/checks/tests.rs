use serde_json::json;

use super::*;

#[test]
fn registry_is_stable() {
    let names: Vec<_> = list_checks().iter().map(|c| c.name).collect();
    assert!(names.len() >= 12);
    assert!(names.contains(&"bundle-formula-vs-oracle"));
    assert!(names.contains(&"glue-positivity-demo"));
    let mut sorted = names.clone();
    sorted.dedup();
    assert_eq!(sorted.len(), names.len());
    assert_eq!(names, list_checks().iter().map(|c| c.name).collect::<Vec<_>>());
}

#[test]
fn unknown_check_and_bad_fields_are_config_errors() {
    assert!(matches!(run_check("nonexistent", Value::Null, 0), Err(CheckError::UnknownCheck(_))));
    let err = run_check("smoothing-lemma12", json!({ "epsilon": 0.05 }), 0).unwrap_err();
    assert!(err.to_string().contains("epsilon"), "{err}");
    let err = run_check("hopf-radius-half", json!({ "fibration": ["s5"] }), 0).unwrap_err();
    assert!(matches!(err, CheckError::Config(_)));
}

#[test]
fn every_check_passes_with_defaults() {
    for c in list_checks() {
        let out = run_check(c.name, Value::Null, 0).unwrap();
        assert!(out.passed, "{}: {}", c.name, out.details);
    }
}

#[test]
fn same_seed_same_outcome() {
    for name in ["bundle-formula-vs-oracle", "glue-positivity-demo", "bundle-vw-identities"] {
        let a = run_check(name, Value::Null, 7).unwrap();
        let b = run_check(name, Value::Null, 7).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn single_eps_and_overrides() {
    let out = run_check("smoothing-lemma12", json!({ "eps": 0.05 }), 0).unwrap();
    assert!(out.passed);
    assert_eq!(out.details["profiles"].as_array().unwrap().len(), 1);
    let strict = run_check("smoothing-lemma12", json!({ "eps": 0.05, "tolerances": { "concavity": -1.0 } }), 0).unwrap();
    assert!(!strict.passed);
    assert_eq!(strict.tolerances["concavity"], json!(-1.0));
    let s7 = run_check("hopf-radius-half", json!({ "fibration": ["s7"] }), 0).unwrap();
    assert!(s7.passed);
}
