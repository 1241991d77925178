use rigidity_core::numeric_harness::*;

fn params(m: Option<i64>) -> SuiteParams {
    SuiteParams { m, samples: 20_000, ..SuiteParams::default() }
}

fn show_failures(r: &[CheckResult]) -> String {
    r.iter().filter(|c| !c.passed()).map(|c| format!("{} {} {}\n", c.id, c.observed, c.details)).collect()
}

#[test]
fn every_suite_passes_at_two() {
    let t = std::time::Instant::now();
    let r = run_suites(&["all"], &params(Some(2))).unwrap();
    eprintln!("{} checks in {:?}", r.len(), t.elapsed());
    assert!(r.iter().all(CheckResult::passed), "{}", show_failures(&r));
    assert!(r.windows(2).all(|w| w[0].id < w[1].id));
    for c in &r {
        assert_eq!(c.tolerance.is_none(), c.kind == Kind::Exact, "{}", c.id);
        assert_eq!(c.seed.is_some(), c.kind == Kind::Mc, "{}", c.id);
    }
}

#[test]
fn eigen_identities_composition() {
    let r = run_suite("eigen-identities", &SuiteParams { seed: 42, ..params(Some(2)) }).unwrap();
    assert_eq!(r.iter().filter(|c| c.kind == Kind::Exact).count(), 4);
    assert_eq!(r.iter().filter(|c| c.kind == Kind::Mc).count(), 2);
    assert!(r.iter().all(CheckResult::passed), "{}", show_failures(&r));
}

#[test]
fn l_matrix_suite_has_every_entry() {
    let r = run_suite("l-matrix-fd", &params(Some(2))).unwrap();
    assert_eq!(r.iter().filter(|c| c.id.contains(".entry-")).count(), 25);
    assert!(r.iter().all(CheckResult::passed), "{}", show_failures(&r));
}

#[test]
fn symbolic_runs_exact_checks_only() {
    let r = run_suites(&["all"], &params(None)).unwrap();
    assert!(r.iter().all(|c| c.kind == Kind::Exact));
    assert!(r.iter().all(CheckResult::passed), "{}", show_failures(&r));
    let cf = closed_forms(None, 3).unwrap();
    assert_eq!(cf["total"], "-24(m-1)(4m^3-m^2+m+2)/((m+1)(2m+1)(2m+3)(3m+2))");
    assert_eq!(closed_forms(Some(2), 3).unwrap()["total"], "-32/35");
}

#[test]
fn reruns_are_identical() {
    let p = SuiteParams { samples: 5_000, ..params(Some(2)) };
    let a = run_suites(&["moments", "obstruction"], &p).unwrap();
    let b = run_suites(&["moments", "obstruction"], &p).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bad_inputs() {
    assert!(matches!(run_suite("nope", &params(Some(2))), Err(HarnessError::UnknownSuite(_))));
    assert!(matches!(run_suite("exact", &params(Some(1))), Err(HarnessError::ExcludedM(1))));
    assert!(run_suite("exact", &SuiteParams { n2: 0, ..params(Some(2)) }).is_err());
    let mut p = params(Some(2));
    p.fd.step = 1e-9;
    assert!(matches!(run_suite("geometry", &p), Err(HarnessError::Step(_))));
}

#[test]
fn failing_check_is_reported_not_hidden() {
    let c = CheckResult::fd("x", 2e-3, 1e-4, "");
    assert_eq!(c.status, Status::Fail);
    let c = CheckResult::fd("x", f64::NAN, 1e-4, "");
    assert_eq!(c.status, Status::Fail);
    let c = CheckResult::mc("x", 1.0, 0.01, 1.05, 3.0, 1);
    assert_eq!(c.status, Status::Fail);
    assert_eq!(CheckResult::exact("x", "1/2", "1/3").status, Status::Fail);
}
