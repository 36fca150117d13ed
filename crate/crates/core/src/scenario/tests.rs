use super::*;

const MINIMAL: &str = r#"
name = "minimal"
variables = ["z", "w"]
domain = { kind = "polydisc", radii = [1.0, 1.0] }

[forms]
omega = { text = "d[z]^d[w] : 1", degree = 2 }

[[checks]]
id = "omega"
op = "symplectic_check"
omega = "omega"
"#;

#[test]
fn minimal_scenario_parses() {
    let s = parse_scenario(MINIMAL).unwrap();
    assert_eq!(s.check_count(), 1);
    let r = run_scenario(&s);
    assert!(r.pass, "{}", r.to_text());
}

#[test]
fn density_expression_parses() {
    let text = MINIMAL.replace("d[z]^d[w] : 1", "d[z]^d[w] : 2/(1-z)^3");
    let s = parse_scenario(&text).unwrap();
    let f = s.resolved.form("omega").unwrap();
    let v = f.eval(&[C64::new(0.5, 0.0), C64::new(0.0, 0.0)]).unwrap();
    assert!((v.get(&[0, 1]) - C64::new(16.0, 0.0)).norm() < 1e-12);
}

use crate::holoalg::C64;

#[test]
fn malformed_form_reports_second_caret() {
    let text = MINIMAL.replace("d[z]^d[w] : 1", "d[z]^^d[w] : 1");
    match parse_scenario(&text) {
        Err(Error::Parse { line, column, token, .. }) => {
            assert_eq!(token, "^");
            let l = text.lines().nth(line - 1).unwrap();
            let col: String = l.chars().skip(column - 1).take(2).collect();
            assert_eq!(col, "^d");
            assert_eq!(l.chars().nth(column - 2), Some('^'));
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn toml_syntax_errors_carry_location() {
    let text = "name = \"x\"\nvariables = [\"z\"\n";
    assert!(matches!(parse_scenario(text), Err(Error::Parse { line, .. }) if line >= 2));
}

#[test]
fn unknown_names_and_arity() {
    let text = MINIMAL.replace("omega = \"omega\"", "omega = \"missing\"");
    assert!(matches!(parse_scenario(&text), Err(Error::UnknownName(n)) if n == "missing"));
    let text = MINIMAL.replace("op = \"symplectic_check\"", "op = \"no_such_op\"");
    assert!(matches!(parse_scenario(&text), Err(Error::Parse { .. })));
    let text = format!(
        "{MINIMAL}\n[maps]\nF = [\"z\"]\n[[checks]]\nid = \"f\"\nop = \"scale_factor\"\nmap = \"F\"\nomega = \"omega\"\n"
    );
    assert!(matches!(parse_scenario(&text), Err(Error::ArityMismatch { .. })));
    let text = MINIMAL.replace("omega = \"omega\"\n", "omega = \"omega\"\nexpect = \"NoSuchError\"\n");
    assert!(matches!(parse_scenario(&text), Err(Error::UnknownName(_))));
}

#[test]
fn unknown_fields_are_rejected() {
    let text = MINIMAL.replace("omega = \"omega\"\n", "omega = \"omega\"\nextra = 1\n");
    assert!(parse_scenario(&text).is_err());
}

#[test]
fn builtins_round_trip() {
    for b in list_builtins() {
        let s = builtin(b.name).unwrap();
        let printed = print_scenario(&s);
        let again = parse_scenario(&printed).unwrap_or_else(|e| panic!("{}: {e}\n{printed}", b.name));
        assert_eq!(s, again, "{}", b.name);
    }
}

#[test]
fn builtin_list_has_required_names() {
    let names: Vec<_> = list_builtins().iter().map(|b| b.name).collect();
    for n in ["standard_box", "ball_extremal", "punctured_family", "lift_metric_equality", "pullback_demo"] {
        assert!(names.contains(&n));
    }
    assert!(builtin("nope").is_err());
}

#[test]
fn broken_cocycle_fails_only_that_check() {
    let text = builtin_text("punctured_family").unwrap().replace(
        "{ from = 1, to = 2, f = \"log(exp(-2*i*pi/3)*w)",
        "{ from = 1, to = 2, f = \"0.001 + log(exp(-2*i*pi/3)*w)",
    );
    let s = parse_scenario(&text).unwrap();
    let r = run_scenario(&s);
    let failed: Vec<_> = r.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect();
    assert_eq!(failed, ["sector_atlas_1"], "{}", r.to_text());
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn expected_failures_count_as_pass() {
    let text = format!(
        "{MINIMAL}\n[maps]\nF = [\"z*(1+w)\", \"w\"]\n[[checks]]\nid = \"f\"\nop = \"scale_factor\"\nmap = \"F\"\nomega = \"omega\"\nexpect = \"NotScaleSymplectic\"\n"
    );
    let r = run_scenario(&parse_scenario(&text).unwrap());
    assert_eq!(r.checks[1].outcome, Outcome::Error);
    assert!(r.pass);
    let r = run_scenario(&parse_scenario(&text.replace("\"z*(1+w)\"", "\"2*z\"")).unwrap());
    assert_eq!(r.checks[1].outcome, Outcome::Pass);
    assert!(!r.checks[1].pass);
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn overrides_apply() {
    let s = parse_scenario(MINIMAL).unwrap().with_overrides(Some(1e-6), Some(9), Some(17)).unwrap();
    let r = run_scenario(&s);
    assert_eq!((r.seed, r.samples, r.tolerance), (9, 17, 1e-6));
    assert!(parse_scenario(MINIMAL).unwrap().with_overrides(Some(-1.0), None, None).is_err());
}

#[test]
fn reports_round_trip_and_render() {
    let r = run_scenario(&parse_scenario(MINIMAL).unwrap());
    assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
    let csv = r.to_csv();
    assert_eq!(csv.lines().next(), Some("check_id,pass,max_residual,value_re,value_im"));
    assert_eq!(csv.lines().count(), 2);
    assert!(r.to_text().contains("PASS"));
}

#[test]
fn every_builtin_passes() {
    for b in list_builtins() {
        let r = run_scenario(&builtin(b.name).unwrap());
        assert!(r.pass, "{}", r.to_text());
    }
}

