use loopstar_cli::config::{Overrides, RunConfig};
use loopstar_cli::report::{strip_timing, Check, Real, Report, Suite, Table};
use loopstar_cli::suites::Params;
use loopstar::C64;

fn sample_report() -> Report {
    let values = [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE, f64::MAX, -0.0];
    let mut check = Check::new("values", 1e-17, 1e-16).complex("z", C64::new(std::f64::consts::PI, -std::f64::consts::E));
    for (i, v) in values.iter().enumerate() {
        check = check.value(&format!("v{i}"), *v);
    }
    let mut table = Table::new("t", &["a", "b"]);
    table.row(&[f64::NAN, f64::INFINITY]);
    table.row(&[f64::NEG_INFINITY, 1e-310]);
    let failed = Check::failed("broken", 1e-6, "no convergence").flag_on_failure("quadrature-convergence");
    let suite = Suite {
        name: "s".into(),
        parameters: [("k".to_string(), "1,2".to_string())].into(),
        checks: vec![check.reference("closed form", &[("x", 0.7)]), failed],
        tables: vec![table],
        pass: false,
        wall_clock_s: Real(0.25),
    };
    Report::new("all", RunConfig::default(), vec![suite], 1.5)
}

#[test]
fn reports_round_trip_losslessly() {
    let r = sample_report();
    let text = r.to_json();
    let back = Report::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
    let (a, b) = (&r.suites[0].checks[0].values, &back.suites[0].checks[0].values);
    for (k, v) in a {
        assert_eq!(v.0.to_bits(), b[k].0.to_bits(), "{k}");
    }
    let rows = &back.suites[0].tables[0].rows;
    assert!(rows[0][0].0.is_nan() && rows[0][1].0 == f64::INFINITY && rows[1][0].0 == f64::NEG_INFINITY);
    assert_eq!(rows[1][1].0, 1e-310);
    assert!(text.contains("\"NaN\"") && text.contains("\"-inf\""));
    assert_eq!(back.config, RunConfig::default());
}

#[test]
fn failed_checks_carry_errors() {
    let r = sample_report();
    let c = &r.suites[0].checks[1];
    assert!(!c.pass && c.residual.0.is_nan());
    assert_eq!(c.error.as_deref(), Some("no convergence"));
    assert_eq!(c.flags, ["quadrature-convergence"]);
    assert!(!r.pass);
    assert!(r.summary().contains("FAIL s/broken"));
}

#[test]
fn check_pass_logic() {
    assert!(Check::new("a", 1e-7, 1e-6).pass);
    assert!(!Check::new("a", 1e-5, 1e-6).pass);
    assert!(!Check::new("a", f64::NAN, 1e-6).pass);
    assert!(!Check::new("a", 0.0, 1e-6).require(false).pass);
    let c = Check::new("a", 1.0, 0.0).flag_on_failure("f").flag_on_failure("f");
    assert_eq!(c.flags.len(), 1);
    assert!(Check::new("a", 0.0, 0.0).flag_on_failure("f").flags.is_empty());
}

#[test]
fn timing_fields_are_stripped_everywhere() {
    let mut v: serde_json::Value = serde_json::from_str(&sample_report().to_json()).unwrap();
    strip_timing(&mut v);
    assert!(!serde_json::to_string(&v).unwrap().contains("wall_clock_s"));
}

#[test]
fn overrides_take_precedence_and_are_validated() {
    let o = Overrides { nr: Some(32), seed: Some(3), jobs: Some(2), ..Overrides::default() };
    let c = RunConfig::resolve(None, &o).unwrap();
    assert_eq!((c.nr, c.seed, c.jobs, c.ntheta), (32, 3, 2, 64));
    assert!(RunConfig::resolve(None, &Overrides { order_k: Some(0), ..Overrides::default() }).is_err());
    assert!(RunConfig { bump_inner: 1.5, ..RunConfig::default() }.validate().is_err());
    assert!(RunConfig { jet_order_max: 3, ..RunConfig::default() }.validate().is_err());
}

#[test]
fn every_command_has_suites() {
    for cmd in ["disk-verify", "winding", "cocycle", "fuzzy", "deform"] {
        assert!(!loopstar_cli::suites::suites_for(cmd).is_empty(), "{cmd}");
    }
    let all: Vec<String> = loopstar_cli::suites::suites_for("all").into_iter().map(|s| s.name).collect();
    assert_eq!(all.len(), 14);
    assert!(loopstar_cli::suites::suites_for("bogus").is_empty());
}

#[test]
fn fuzzy_suite_runs_in_process() {
    let config = RunConfig { jobs: 1, ..RunConfig::default() };
    let params = Params { max_twice_j: 4, ..Params::default() };
    let r = loopstar_cli::run("fuzzy", &config, &params).unwrap();
    assert!(r.pass, "{}", r.summary());
    assert_eq!(r.suites[0].checks.len(), 4);
}
