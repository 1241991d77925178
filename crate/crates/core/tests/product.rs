use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidity_core::chart_geometry::sampling::box_point;
use rigidity_core::chart_geometry::ChartPoint;
use rigidity_core::deformation_basis::numeric::realize_f64;
use rigidity_core::eigenfunction::closed_form::real_covector;
use rigidity_core::eigenfunction::{grad_u_at, u_at};
use rigidity_core::exact::RatFn;
use rigidity_core::numeric_harness::FDConfig;
use rigidity_core::product_rigidity::*;

fn r(s: &str) -> RatFn {
    s.parse().unwrap()
}

fn sym(n2: i64) -> ProductConfig {
    ProductConfig::new(None, n2).unwrap()
}

#[test]
fn cross_variation_traces() {
    let c = sym(3);
    let tr = cross_phi2_product(&c).unwrap();
    let (n, n1) = (c.n(), c.n1());
    assert_eq!(ProductTraces::uv_coefficient(&tr.g_trace), (&n + &(&n1 * 3) - 4) * RatFn::ratio(1, 2));
    assert_eq!(ProductTraces::uv_coefficient(&tr.g1_trace), (&n1 - 1) * 2);
    assert_eq!(ProductTraces::grad_coefficient(&tr.g_trace), (-(&n1 * 3) + 2) * RatFn::ratio(1, 2));
    assert_eq!(ProductTraces::grad_coefficient(&tr.g1_trace), (-(&n1 * 3) + 2) * RatFn::ratio(1, 2));
    assert!(tr.scalar_consistent, "scalar curvature route");
    assert!(tr.potential_consistent, "potential route");
    assert!(tr.tensor_consistent, "tensor route");
}

#[test]
fn pure_projective_factor_traces_coincide() {
    let tr = cross_phi2_product(&sym(0)).unwrap();
    assert_eq!(ProductTraces::uv_coefficient(&tr.g_trace), ProductTraces::uv_coefficient(&tr.g1_trace));
}

#[test]
fn coefficient_triples() {
    for c in [sym(1), sym(3), sym(7), ProductConfig::new(Some(2), 5).unwrap()] {
        let oc = obstruction_coefficients(&c).unwrap();
        let (g, g1) = expected_triples(&c);
        assert_eq!(oc.g_trace, g);
        assert_eq!(oc.g1_trace, g1);
        assert_eq!(oc.g_trace.v2, oc.g1_trace.v2);
    }
    let oc = obstruction_coefficients(&sym(3)).unwrap();
    assert_eq!(oc.g_trace.u2, r("4m+1"));
    assert_eq!(oc.g1_trace.uv, r("8m-4"));
}

#[test]
fn root_identities_symbolic() {
    let ri = root_identity_check(&sym(3)).unwrap();
    assert!(ri.identities_ok(), "{ri:?}");
    assert!(ri.float_residual < 1e-12);
    assert_eq!(r(&ri.lambda), r("3/(8m-4)"));
}

#[test]
fn root_identities_random_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for _ in 0..20 {
        let c = ProductConfig::new(Some(rng.gen_range(1..=12)), rng.gen_range(1..=40)).unwrap();
        let ri = root_identity_check(&c).unwrap();
        assert!(ri.identities_ok(), "{c:?}");
        assert!(ri.float_residual < 1e-12, "{c:?}: {}", ri.float_residual);
        let cl = conclusion(&c).unwrap();
        assert!(cl.u_zero && cl.v_zero && cl.determinant_nonzero, "{c:?}");
    }
}

#[test]
fn small_example_and_zero_lambda() {
    let c = ProductConfig::new(Some(1), 3).unwrap();
    let ri = root_identity_check(&c).unwrap();
    assert_eq!(ri.lambda, "3/4");
    assert!(ri.identities_ok() && ri.float_residual < 1e-14);
    assert!(matches!(root_identity_check(&sym(0)), Err(ProductError::ZeroLambda)));
    assert!(ProductConfig::new(Some(0), 3).is_err());
}

#[test]
fn conclusion_symbolic() {
    let cl = conclusion(&sym(2)).unwrap();
    assert!(cl.identities_hold && cl.factor_obstructed && cl.u_zero);
    let cl = conclusion(&ProductConfig::new(Some(2), 2).unwrap()).unwrap();
    assert!(cl.factor_method.contains("exhaustive"));
}

fn tensor_field(c: [f64; 5], m: usize) -> impl Fn(&[f64]) -> DMatrix<f64> {
    move |y: &[f64]| realize_f64(&c, &ChartPoint::from_real(m, y).unwrap(), 1.0).to_real()
}

fn du(m: usize) -> impl Fn(&[f64]) -> Vec<f64> {
    move |y: &[f64]| real_covector(&grad_u_at(&ChartPoint::from_real(m, y).unwrap(), 1.0))
}

#[test]
fn einstein_commutation() {
    let mut rng = ChaCha8Rng::seed_from_u64(405);
    let cfg = FDConfig::with_step(1e-2);
    let m = 2;
    for c in [[0.0, 1.0, 0.0, 0.0, 0.0], [0.3, -0.2, 1.0, 0.5, -0.7]] {
        let pt = box_point(m, 0.6, &mut rng);
        let res = einstein_commutation_check(&pt, &tensor_field(c, m), &du(m), &cfg).unwrap();
        assert!(res.max() < 1e-4, "{c:?}: {res:?}");
        assert!(res.scale.iter().all(|&s| s > 1e-2), "{res:?}");
    }
    // g is parallel: every residual vanishes
    let pt = box_point(m, 0.6, &mut rng);
    let u_alpha = move |y: &[f64]| {
        let q = ChartPoint::from_real(m, y).unwrap();
        let u = u_at(&q, 1.0);
        real_covector(&grad_u_at(&q, 1.0)).into_iter().map(|x| x * u).collect::<Vec<f64>>()
    };
    let res = einstein_commutation_check(&pt, &tensor_field([1.0, 0.0, 0.0, 0.0, 0.0], m), &u_alpha, &cfg).unwrap();
    assert!(res.trace < 1e-6 && res.divergence < 1e-6, "{res:?}");
    assert!(res.delta_star < 1e-4, "{res:?}");
}
