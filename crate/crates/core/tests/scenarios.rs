use holocontact::scenario::{builtin, builtin_text, list_builtins, parse_scenario, print_scenario, run_scenario, Outcome, Report};

#[test]
fn punctured_family_has_twelve_passing_checks() {
    let r = run_scenario(&builtin("punctured_family").unwrap());
    assert_eq!(r.checks.len(), 12);
    assert!(r.checks.iter().all(|c| c.pass && c.outcome == Outcome::Pass), "{}", r.to_text());
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn ball_extremal_marks_the_generic_rotation_as_expected_failure() {
    let r = run_scenario(&builtin("ball_extremal").unwrap());
    assert!(r.pass, "{}", r.to_text());
    let c = r.checks.iter().find(|c| c.id == "non_fixing_rotation").unwrap();
    assert_eq!(c.outcome, Outcome::Error);
    assert_eq!(c.error.as_ref().unwrap().kind, "NotScaleSymplectic");
    for id in ["cayley_pullback", "parabolic_1", "parabolic_i", "fixing_parabolic", "fixing_dilation", "fixing_rotation"] {
        let c = r.checks.iter().find(|c| c.id == id).unwrap();
        assert_eq!(c.outcome, Outcome::Pass, "{id}");
    }
}

#[test]
fn printed_builtins_reparse_and_rerun_identically() {
    for b in list_builtins().iter().filter(|b| b.name != "lift_metric_equality") {
        let s = builtin(b.name).unwrap();
        let again = parse_scenario(&print_scenario(&s)).unwrap();
        assert_eq!(s, again);
        assert_eq!(run_scenario(&s).canonical_json(), run_scenario(&again).canonical_json(), "{}", b.name);
    }
}

#[test]
fn json_reports_round_trip() {
    let r = run_scenario(&builtin("pullback_demo").unwrap());
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
}

#[test]
fn seeds_change_samples_but_not_verdicts() {
    let s = builtin("punctured_family").unwrap();
    let other = s.clone().with_overrides(None, Some(99), Some(60)).unwrap();
    let (a, b) = (run_scenario(&s), run_scenario(&other));
    assert!(a.pass && b.pass);
    assert_ne!(a.canonical_json(), b.canonical_json());
    assert!(builtin_text("standard_box").unwrap().contains("[[checks]]"));
}
