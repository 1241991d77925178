use num_traits::Zero;
use proptest::prelude::*;
use rigidity_core::exact::{rat, Rat, RatFn};
use rigidity_core::eigenfunction::criterion_integral;
use rigidity_core::obstruction::*;
use rigidity_core::scalar_algebra::GlobalParams;

fn r(s: &str) -> RatFn {
    s.parse().unwrap()
}

fn sym() -> GlobalParams {
    GlobalParams::symbolic()
}

#[test]
fn first_integral_intermediates() {
    let p = sym();
    let a = compute_i1(&p).unwrap();
    assert_eq!(a.i11.u4, r("3(36m^2+3m-22)/(3m+2)"));
    assert_eq!(a.i11.u2, r("-3(16m^2+7m-14)/(3m+2)"));
    assert_eq!(a.i12.u4, r("-6(2m+3)(5m^2-m-2)/(m(3m+2))"));
    assert_eq!(a.i12.u2, r("-6(2m^3-14m^2+m+6)/(m(3m+2))"));
    // integrating by parts and solving for f_ttt agree
    assert_eq!(a.i11_direct, a.i11.total(&p));
    assert_eq!(a.i1, closed::i1());
}

#[test]
fn second_integral_intermediates() {
    let p = sym();
    let b = compute_i2(&p).unwrap();
    assert_eq!(b.i21.u4, r("-(8m^2-3m-2)/(m(3m+2))"));
    assert_eq!(b.i21.u2, r("-(2m^3-7m^2+m+2)/(m(m+1)(3m+2))"));
    assert_eq!(b.h0_trace.coeff(0, 1), r("-2(11m^2-3m-6)/((m+1)(3m+2))"));
    assert_eq!(b.h0_trace.coeff(2, 0), r("2(16m^3+m^2-9m-2)/((m+1)(3m+2))"));
    assert_eq!(b.third.u4, r("(32m^4-5m^3-29m^2+4m+4)/(m(m+1)(3m+2))"));
    assert_eq!(b.third.u2, r("(4m^4-29m^3+19m^2+8m-4)/(m(m+1)(3m+2))"));
    assert_eq!(b.i2_direct, b.i2);
    assert_eq!(b.i2, closed::i2());
}

#[test]
fn total_and_values_at_two() {
    let p = sym();
    let rep = total_obstruction(&p).unwrap();
    assert_eq!(r(&rep.total), closed::total());
    assert!(rep.routes_agree);
    let v = rep.verdict.unwrap();
    assert!(v.nonzero_for_all_m_ge_2 && v.negative_on_table);
    assert_eq!(v.table.len(), 49);
    let p2 = GlobalParams::concrete(2).unwrap();
    assert_eq!(compute_i1(&p2).unwrap().i1, RatFn::ratio(-66, 35));
    assert_eq!(compute_i2(&p2).unwrap().i2, RatFn::ratio(34, 35));
    assert_eq!(total_obstruction(&p2).unwrap().total, "-32/35");
}

#[test]
fn additivity_for_many_m() {
    for m in 2..=50 {
        let p = GlobalParams::concrete(m).unwrap();
        let a = compute_i1(&p).unwrap().i1;
        let b = compute_i2(&p).unwrap().i2;
        let t = closed::total().eval_int(m).unwrap();
        assert_eq!((&a + &b).as_constant().unwrap(), t, "m = {m}");
        assert!(t < Rat::from_integer(0.into()));
    }
}

#[test]
fn circle_case_excluded() {
    assert!(closed::total().eval_int(1).unwrap() == Rat::from_integer(0.into()));
    let p1 = GlobalParams::concrete(1).unwrap();
    assert!(matches!(compute_i1(&p1), Err(ObstructionError::InvalidM(1))));
    assert!(total_obstruction(&p1).is_err());
}

#[test]
fn integer_roots_by_cauchy_bound() {
    let t = closed::total();
    assert_eq!(integer_roots_from(t.numer(), 1), vec![1]);
    assert!(integer_roots_from(t.numer(), 2).is_empty());
    let p = rigidity_core::exact::Poly::from_ints(&[-6, 11, -6, 1]);
    assert_eq!(integer_roots_from(&p, 0), vec![1, 2, 3]);
}

#[test]
fn rederived_third_potential_keeps_sign_away_from_zero() {
    let rep = total_obstruction(&sym()).unwrap();
    assert_eq!(r(&rep.derived.total), closed::total_derived());
    assert_eq!(r(&rep.derived.shift), r("24(m-1)(4m^2+m-2)/((2m+1)(2m+3)(3m+2))"));
    assert!(rep.derived.nonzero_for_all_m_ge_2);
}

#[test]
fn monte_carlo_pointwise_part() {
    let (est, exact) = mc_i12(2, 100_000, 11).unwrap();
    assert!(est.z_score(exact) < 3.0, "{est:?} vs {exact}");
}

#[test]
fn reduction_checklist() {
    let c = reduction_to_h0(&sym()).unwrap();
    assert_eq!(r(&c.chain_coefficient), r("4(m-1)"));
    assert!(c.chain_is_4_m_minus_1 && c.cubic_vanishes);
    assert!(c.balanced_vanishing.iter().all(|x| x.1));
    assert_eq!(c.trusted.len(), 2);
    let c2 = reduction_to_h0(&GlobalParams::concrete(2).unwrap()).unwrap();
    assert_eq!(c2.chain_coefficient, "4");
}

#[test]
fn second_order_examples() {
    // ℂP²: diag(2,−1,−1) is obstructed
    let u = [rat(2, 1), rat(-1, 1), rat(-1, 1)];
    assert!((1..3).any(|k| !diagonal_criterion(&u, k).is_zero()));
    let v2 = second_order_criterion(2).unwrap();
    assert!(v2.obstructed && v2.candidate.is_none());
    // ℂP³: balanced survives, diag(3,−1,−1,−1) does not
    let v3 = second_order_criterion(3).unwrap();
    assert!(!v3.obstructed);
    assert_eq!(v3.candidate.unwrap(), ["1", "1", "-1", "-1"]);
    let w = [rat(3, 1), rat(-1, 1), rat(-1, 1), rat(-1, 1)];
    assert!(!diagonal_criterion(&w, 1).is_zero());
    assert!(second_order_criterion(0).is_err());
}

#[test]
fn landscape_up_to_eight_slots() {
    for n in 1..=7 {
        let v = second_order_criterion(n).unwrap();
        assert_eq!(v.balanced_iff_unobstructed, Some(true), "N = {n}");
        assert_eq!(v.closed_form_agrees, Some(true), "N = {n}");
        assert_eq!(v.obstructed, n % 2 == 0);
    }
    assert!(second_order_criterion(12).unwrap().patterns_checked.is_none());
}

proptest! {
    #[test]
    fn criterion_closed_form(raw in prop::collection::vec(-6i64..=6, 2..7), k in 1usize..6) {
        let s = raw.len() as i64;
        let sum: i64 = raw.iter().sum();
        let u: Vec<Rat> = raw.iter().map(|&x| rat(x * s - sum, 1)).collect();
        let k = 1 + (k - 1) % (raw.len() - 1);
        let mut w = vec![rat(0, 1); raw.len()];
        w[k] = rat(1, 1);
        w[0] = rat(-1, 1);
        prop_assert_eq!(criterion_integral(&u, &w), diagonal_criterion(&u, k));
    }
}
