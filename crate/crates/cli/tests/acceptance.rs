//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use rigidity_core::deformation_basis as db;
use rigidity_core::exact::RatFn;
use rigidity_core::numeric_harness::{run_suite, CheckResult, SuiteParams};
use rigidity_core::obstruction::{self as ob, closed};
use rigidity_core::product_rigidity::{expected_triples, obstruction_coefficients, ProductConfig};
use rigidity_core::scalar_algebra::GlobalParams;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn r(s: &str) -> RatFn {
    s.parse().expect("constant parses")
}

fn suite(id: &str, m: Option<i64>, keep: impl Fn(&CheckResult) -> bool) -> Result<usize, String> {
    let p = SuiteParams { m, ..SuiteParams::default() };
    let res = run_suite(id, &p).map_err(|e| e.to_string())?;
    let kept: Vec<&CheckResult> = res.iter().filter(|c| keep(c)).collect();
    let bad: Vec<String> = kept.iter().filter(|c| !c.passed()).map(|c| format!("{} ({})", c.id, c.observed)).collect();
    ensure(bad.is_empty(), format!("failing: {}", bad.join(", ")))?;
    ensure(!kept.is_empty(), "no checks selected")?;
    Ok(kept.len())
}

fn h0() -> Outcome {
    let p = GlobalParams::symbolic();
    let h = db::solve_h0(&p).map_err(|e| e.to_string())?;
    let want = ["-2/(m+1)", "2m/(m+1)", "4m(m^2+5m+2)/((m+1)(3m+2))", "-8m^3/((m+1)(3m+2))", "4m^2(m+2)/((m+1)(3m+2))"];
    ensure(h.as_slice().iter().zip(want).all(|(a, b)| *a == r(b)), "coefficients differ")?;
    let back = db::l_matrix(&p).mul_vec(h.scale(&RatFn::ratio(1, 2)).as_slice()).map_err(|e| e.to_string())?;
    ensure(db::BasisCoeffs::from_vec(back) == db::second_order_rhs(&p), "round trip")?;
    ensure(db::divergence_of(&h, &p).is_zero(), "divergence")?;
    Ok("five coefficients, L(h0/2) = RHS, div h0 = 0".into())
}

fn obstruction() -> Outcome {
    let p = GlobalParams::symbolic();
    let e = |x: ob::ObstructionError| x.to_string();
    ensure(ob::compute_i1(&p).map_err(e)?.i1 == closed::i1(), "I1")?;
    ensure(ob::compute_i2(&p).map_err(e)?.i2 == closed::i2(), "I2")?;
    let rep = ob::total_obstruction(&p).map_err(e)?;
    ensure(r(&rep.total) == r("-24(m-1)(4m^3-m^2+m+2)/((m+1)(2m+1)(2m+3)(3m+2))"), "total")?;
    let p2 = GlobalParams::concrete(2).map_err(|x| x.to_string())?;
    ensure(ob::compute_i1(&p2).map_err(e)?.i1 == RatFn::ratio(-66, 35), "I1(2)")?;
    ensure(ob::compute_i2(&p2).map_err(e)?.i2 == RatFn::ratio(34, 35), "I2(2)")?;
    ensure(ob::total_obstruction(&p2).map_err(e)?.total == "-32/35", "total(2)")?;
    for m in 2..=50 {
        let pm = GlobalParams::concrete(m).map_err(|x| x.to_string())?;
        let sum = &ob::compute_i1(&pm).map_err(e)?.i1 + &ob::compute_i2(&pm).map_err(e)?.i2;
        ensure(sum.as_constant() == closed::total().eval_int(m).ok(), format!("additivity at m = {m}"))?;
    }
    Ok("symbolic I1, I2, total; -66/35 + 34/35 = -32/35; additive for m = 2..50".into())
}

fn intermediates() -> Outcome {
    let n = suite("obstruction", None, |c| c.id.ends_with("-split") || c.id == "obstruction.h0-trace")?;
    Ok(format!("{n} split checks at symbolic m"))
}

fn moments() -> Outcome {
    let exact = suite("moments", None, |_| true)?;
    let mc = suite("moments", Some(2), |c| c.id.contains("mc-"))?;
    Ok(format!("{exact} exact (recurrence and sphere oracle), {mc} Monte Carlo at 1e5 samples"))
}

fn geometry() -> Outcome {
    let a = suite("geometry", Some(2), |_| true)?;
    let b = suite("eigenfunction", Some(2), |_| true)?;
    Ok(format!("{} checks, 100 points each at m = 2, 3", a + b))
}

fn l_matrix() -> Outcome {
    let n = suite("l-matrix-fd", Some(2), |_| true)?;
    Ok(format!("{n} checks: 25 entries, type leak, fit residual, exact inverse"))
}

fn variational() -> Outcome {
    let n = suite("variational", Some(2), |c| c.id.starts_with("variational.fd-ricci"))?;
    Ok(format!("{n} orders at 10 points"))
}

fn landscape() -> Outcome {
    let n = suite("second-order", None, |_| true)?;
    Ok(format!("{n} checks, up to 8 slots"))
}

fn product() -> Outcome {
    let n = suite("product", None, |_| true)?;
    for (m, n2) in [(Some(2), 3), (Some(5), 7), (None, 1)] {
        let c = ProductConfig::new(m, n2).map_err(|e| e.to_string())?;
        let oc = obstruction_coefficients(&c).map_err(|e| e.to_string())?;
        ensure((oc.g_trace, oc.g1_trace) == expected_triples(&c), "triples")?;
    }
    Ok(format!("{n} exact checks incl. 20 random configurations"))
}

fn determinism() -> Outcome {
    let once = || {
        let o = Command::new(env!("CARGO_BIN_EXE_rigidity")).args(["verify", "--suite", "all", "--m", "2", "--seed", "7"]).output().map_err(|e| e.to_string())?;
        ensure(o.status.success(), format!("exit {:?}", o.status.code()))?;
        Ok::<_, String>(o.stdout)
    };
    let (a, b) = (once()?, once()?);
    ensure(a == b, "reports differ")?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<f64>); 10] = [
        ("exact h0", h0, Some(1.0)),
        ("exact obstruction", obstruction, Some(1.0)),
        ("exact intermediates", intermediates, None),
        ("moments, double oracle and Monte Carlo", moments, Some(10.0)),
        ("pointwise geometry", geometry, Some(30.0)),
        ("L-matrix validation", l_matrix, None),
        ("variational finite differences", variational, None),
        ("second-order landscape", landscape, Some(5.0)),
        ("product module", product, Some(1.0)),
        ("determinism", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = f();
        let secs = t.elapsed().as_secs_f64();
        let out = match (out, limit) {
            (Ok(_), Some(l)) if secs > *l => Err(format!("took {secs:.2} s, limit {l} s")),
            (o, _) => o,
        };
        let (tag, note) = match &out {
            Ok(s) => ("PASS", s.clone()),
            Err(s) => ("FAIL", s.clone()),
        };
        if out.is_err() {
            failed += 1;
        }
        println!("criterion {:>2} {tag}  {name}: {note} [{secs:.2} s]", i + 1);
    }
    println!("{} of 10 criteria pass", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
