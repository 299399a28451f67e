use diamag::harness::{check_names, verify_suite, VerifyReport};
use diamag::Error;
use std::collections::HashSet;

#[test]
fn empty_selection_passes_vacuously() {
    let r = verify_suite::<&str>(&[]).unwrap();
    assert!(r.passed);
    assert!(r.checks.is_empty());
}

#[test]
fn unknown_name_is_rejected() {
    let r = verify_suite(&["hermiticity", "no_such_check"]);
    match r {
        Err(Error::Config(msg)) => assert!(msg.contains("no_such_check")),
        other => panic!("expected a config error, got {other:?}"),
    }
}

#[test]
fn names_are_unique() {
    let names = check_names();
    let set: HashSet<_> = names.iter().collect();
    assert_eq!(set.len(), names.len());
    assert!(!names.contains(&"all"));
}

#[test]
fn diamagnetic_check_reports_the_ratio() {
    let r = verify_suite(&["diamagnetic"]).unwrap();
    assert_eq!(r.checks.len(), 1);
    let c = &r.checks[0];
    assert_eq!(c.name, "diamagnetic");
    assert!(c.passed, "{c:?}");
    assert!(c.value <= c.threshold);
}

#[test]
fn duplicates_run_once() {
    let r = verify_suite(&["hermiticity", "hermiticity", "phase_antisymmetry"]).unwrap();
    assert_eq!(r.checks.len(), 2);
}

#[test]
fn every_registered_check_passes() {
    let r = verify_suite(&["all"]).unwrap();
    assert_eq!(r.checks.len(), check_names().len());
    let failed: Vec<_> = r.checks.iter().filter(|c| !c.passed).collect();
    assert!(failed.is_empty(), "{}", r.summary());
    let back: VerifyReport = serde_json::from_str(&r.to_json().unwrap()).unwrap();
    assert_eq!(back, r);
}
