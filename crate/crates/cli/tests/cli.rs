use std::process::{Command, Output};

use rigidity_core::numeric_harness::Report;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rigidity")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn show_objects() {
    let o = run(&["show", "--object", "h0", "--m", "sym"]);
    assert!(o.status.success());
    let lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[3], "e4 -8m^3/((m+1)(3m+2))");
    assert_eq!(stdout(&run(&["show", "--object", "total", "--m", "2"])).trim(), "-32/35");
    assert_eq!(stdout(&run(&["show", "--object", "i1", "--m", "2"])).trim(), "-66/35");
    let l = stdout(&run(&["show", "--object", "l-matrix", "--m", "3"]));
    assert_eq!(l.lines().count(), 5);
    assert!(l.starts_with("[1, 1/3, 1/36, -1/36, 0]"));
    assert!(stdout(&run(&["show", "--object", "psi", "--m", "sym"])).contains("psi2"));
}

#[test]
fn usage_errors_exit_two() {
    let o = run(&["verify", "--m", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("CP^1"));
    assert_eq!(run(&["verify", "--suite", "nope", "--m", "sym"]).status.code(), Some(2));
    assert_eq!(run(&["show", "--object", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--m", "two"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "exact", "--m", "sym", "--out", "/nonexistent/dir/r.json"]).status.code(), Some(2));
}

#[test]
fn symbolic_obstruction_report() {
    let o = run(&["verify", "--suite", "obstruction", "--m", "sym"]);
    assert_eq!(o.status.code(), Some(0));
    let rep: Report = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep.closed_forms["total"], "-24(m-1)(4m^3-m^2+m+2)/((m+1)(2m+1)(2m+3)(3m+2))");
    assert_eq!(rep.summary.pass, rep.results.len());
    assert_eq!(rep.params.m, "sym");
}

#[test]
fn json_round_trips_and_csv_matches() {
    let args = ["verify", "--suite", "moments,second-order", "--m", "2", "--samples", "2000"];
    let json = run(&args).stdout;
    let rep: Report = serde_json::from_slice(&json).unwrap();
    assert_eq!(serde_json::to_string_pretty(&rep).unwrap() + "\n", String::from_utf8(json).unwrap());
    assert_eq!(rep.summary.pass + rep.summary.fail, rep.results.len());
    let csv = stdout(&run(&[&args[..], &["--format", "csv"]].concat()));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("id,kind,status,observed,tolerance,seed"));
    let ids: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    let want: Vec<&str> = rep.results.iter().map(|r| r.id.as_str()).collect();
    assert_eq!(ids, want);
}

#[test]
fn failing_checks_exit_one() {
    // a coarse step cannot meet the 1e-6 relative tolerance on Christoffel symbols
    let o = run(&["verify", "--suite", "geometry", "--m", "2", "--fd-step", "0.1", "--format", "text"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL  geometry.christoffel-fd"));
}
