use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigidity_core::chart_geometry::engine::Christoffel;
use rigidity_core::chart_geometry::fd::{fd_christoffel, fd_local_geometry, fd_rough_laplacian};
use rigidity_core::chart_geometry::metric::hermitian_trace;
use rigidity_core::chart_geometry::sampling::box_point;
use rigidity_core::chart_geometry::{metric_at, mc_integrate, sample_point, ChartPoint, FubiniStudy, LocalGeometry, MetricField};
use rigidity_core::numeric_harness::FDConfig;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn origin_metric_is_scaled_identity() {
    let md = metric_at(&ChartPoint::origin(2));
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 8.0 } else { 0.0 };
            assert_eq!(md.g[(i, j)], c(want, 0.0));
            for k in 0..3 {
                assert_eq!(md.christoffel(k, i, j), c(0.0, 0.0));
            }
        }
    }
}

#[test]
fn worked_metric_example() {
    let p = ChartPoint::new(2, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert_eq!(p.s(), 2.0);
    let md = metric_at(&p);
    assert!((md.g[(0, 0)] - c(2.0, 0.0)).norm() < 1e-15);
    assert!((md.g_inv[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
}

#[test]
fn inverse_metric_at_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for m in [2, 3] {
        for _ in 0..100 {
            let md = metric_at(&sample_point(m, &mut rng));
            let prod = &md.g * md.g_inv.transpose();
            let n = md.nc();
            let scale = md.g.iter().map(|z| z.norm()).fold(0.0, f64::max) * md.g_inv.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((prod[(i, j)] - c(want, 0.0)).norm() < 1e-12 * scale.max(1.0));
                }
            }
        }
    }
}

#[test]
fn closed_forms_match_exact_jets() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for m in [2, 3] {
        let field = FubiniStudy { m };
        for _ in 0..5 {
            let p = box_point(m, 0.8, &mut rng);
            let x = p.to_real();
            let md = metric_at(&p);
            let geom = LocalGeometry::at(&field, &x);
            assert!((md.real_metric() - &geom.g).abs().max() < 1e-12);
            assert!((field.metric_f64(&x) - &geom.g).abs().max() < 1e-12);
            let d = geom.d;
            let closed = Christoffel { d, data: md.real_christoffel() };
            assert!(closed.max_abs_diff(&geom.gamma) < 1e-12, "christoffel");
            let r = md.real_curvature();
            assert!(max_diff(&r, &geom.riemann) < 1e-10, "curvature {}", max_diff(&r, &geom.riemann));
            let half_g = &geom.g * 0.5;
            assert!((geom.ricci() - &half_g).abs().max() < 1e-10, "einstein");
            assert!((geom.rm(&geom.g) - &half_g).abs().max() < 1e-10);
        }
    }
}

#[test]
fn hermitian_trace_of_metric_is_real_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = box_point(3, 1.0, &mut rng);
    let md = metric_at(&p);
    assert!((hermitian_trace(&md, &md.g) - 10.0).abs() < 1e-12);
}

#[test]
fn fd_christoffel_matches_closed_form() {
    let field = FubiniStudy { m: 2 };
    let p = ChartPoint::new(2, vec![c(0.3, 0.1), c(-0.2, 0.0), c(0.0, 0.5)]).unwrap();
    let closed = Christoffel { d: 6, data: metric_at(&p).real_christoffel() };
    let cfg = FDConfig { richardson: false, ..FDConfig::default() };
    let fd = fd_christoffel(&field, &p.to_real(), &cfg).unwrap();
    assert!(fd.max_abs_diff(&closed) / closed.max_abs() < 1e-6);
    let zero = fd_christoffel(&field, &ChartPoint::origin(2).to_real(), &cfg).unwrap();
    assert!(zero.max_abs() < 1e-10);
}

#[test]
fn richardson_improves_christoffel() {
    let field = FubiniStudy { m: 2 };
    let p = ChartPoint::new(2, vec![c(0.3, 0.1), c(-0.2, 0.0), c(0.0, 0.5)]).unwrap();
    let closed = Christoffel { d: 6, data: metric_at(&p).real_christoffel() };
    let plain = |h: f64| fd_christoffel(&field, &p.to_real(), &FDConfig { step: h, richardson: false, max_retries: 0 }).unwrap();
    let e_coarse = plain(1e-3).max_abs_diff(&closed);
    let e_fine = plain(5e-4).max_abs_diff(&closed);
    assert!(e_coarse / e_fine > 3.5, "second-order convergence {e_coarse} {e_fine}");
    let rich = fd_christoffel(&field, &p.to_real(), &FDConfig { step: 5e-4, richardson: true, max_retries: 0 }).unwrap();
    assert!(rich.max_abs_diff(&closed) * 4.0 <= e_fine);
}

#[test]
fn step_underflow_is_rejected() {
    let field = FubiniStudy { m: 2 };
    let x = ChartPoint::origin(2).to_real();
    assert!(fd_christoffel(&field, &x, &FDConfig::with_step(1e-9)).is_err());
}

#[test]
fn fd_curvature_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let field = FubiniStudy { m: 2 };
    for _ in 0..20 {
        let p = box_point(2, 0.8, &mut rng);
        let geom = fd_local_geometry(&field, &p.to_real(), &FDConfig::default()).unwrap();
        let closed = metric_at(&p).real_curvature();
        assert!(max_diff(&closed, &geom.riemann) < 1e-4);
    }
}

#[test]
fn rough_laplacian_of_parallel_metric_vanishes() {
    let field = FubiniStudy { m: 2 };
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = box_point(2, 0.7, &mut rng);
    let x = p.to_real();
    let geom = LocalGeometry::at(&field, &x);
    let g_field = |y: &[f64]| field.metric_f64(y);
    let lap = fd_rough_laplacian(&g_field, &x, &geom, &FDConfig::default()).unwrap();
    assert!(lap.abs().max() < 1e-6, "{}", lap.abs().max());
    let _: DMatrix<f64> = lap;
}

#[test]
fn monte_carlo_is_normalized_and_reproducible() {
    let one = mc_integrate(|_| 1.0, 2, 1000, 9);
    assert_eq!(one.mean, 1.0);
    assert_eq!(one.se, 0.0);
    let f = |p: &ChartPoint| p.a() / p.s();
    let a = mc_integrate(f, 2, 2000, 11);
    let b = mc_integrate(f, 2, 2000, 11);
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    let mut r1 = ChaCha8Rng::seed_from_u64(5);
    let mut r2 = ChaCha8Rng::seed_from_u64(5);
    assert_eq!(sample_point(2, &mut r1), sample_point(2, &mut r2));
}
