use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rigidity_core::chart_geometry::fd::fd_divergence;
use rigidity_core::chart_geometry::sampling::box_point;
use rigidity_core::chart_geometry::{metric_at, ChartPoint, FubiniStudy, LocalGeometry, TensorValue};
use rigidity_core::deformation_basis::numeric::fd_l_apply;
use rigidity_core::deformation_basis::*;
use rigidity_core::eigenfunction::closed_form::real_covector;
use rigidity_core::eigenfunction::{grad_u_at, u_at, EigenFn};
use rigidity_core::exact::{RatFn, RatMatrix};
use rigidity_core::numeric_harness::FDConfig;
use rigidity_core::scalar_algebra::GlobalParams;

fn sym() -> GlobalParams {
    GlobalParams::symbolic()
}

fn col(mm: &RatMatrix, k: usize) -> Vec<String> {
    mm.column(k).iter().map(RatFn::to_string).collect()
}

#[test]
fn matrix_columns() {
    let l = l_matrix(&sym());
    assert_eq!(col(&l, 0), ["1", "0", "0", "0", "0"]);
    assert_eq!(col(&l, 1), ["1/m", "-(m+1)/m", "0", "0", "0"]);
    assert_eq!(l.get(4, 4).to_string(), "-(m+1)/m");
    assert_eq!(col(&l, 2), ["1/(4m^2)", "-1/(4m^2)", "-1", "-1/m", "0"]);
}

#[test]
fn inverse_is_exact() {
    let p = sym();
    let inv = l_inverse(&p).unwrap();
    assert!(l_matrix(&p).mul(&inv).unwrap().is_identity());
    assert_eq!(inv, l_inverse_closed(&p).unwrap());
    let at2 = inv.eval(&rigidity_core::exact::rat(2, 1)).unwrap();
    assert_eq!(at2[2][2].to_string(), "-4/3");
}

#[test]
fn rhs_two_routes_agree() {
    let p = sym();
    assert_eq!(second_order_rhs(&p), derived_second_order_rhs(&p).unwrap());
    assert_eq!(f_tt(&p).unwrap().coeff(2, 0).to_string(), "-(4m^2+m-2)/(3m+2)");
}

#[test]
fn h0_closed_form_and_round_trip() {
    let p = sym();
    let h0 = solve_h0(&p).unwrap();
    assert_eq!(h0, h0_closed(&p));
    assert_eq!(
        h0.to_strings(),
        ["-2/(m+1)", "2m/(m+1)", "4m(m^2+5m+2)/((m+1)(3m+2))", "-8m^3/((m+1)(3m+2))", "4m^2(m+2)/((m+1)(3m+2))"]
    );
    let half = h0.scale(&RatFn::ratio(1, 2));
    let back = l_matrix(&p).mul_vec(half.as_slice()).unwrap();
    assert_eq!(BasisCoeffs::from_vec(back), second_order_rhs(&p));
    for m in 2..8 {
        let pm = GlobalParams::concrete(m).unwrap();
        assert_eq!(solve_h0(&pm).unwrap(), h0.at(m).unwrap());
    }
}

#[test]
fn divergence_table_and_h0_is_divergence_free() {
    let p = sym();
    let d: Vec<String> = divergence_coeffs(&p).iter().map(RatFn::to_string).collect();
    assert_eq!(d, ["0", "2", "-1/2", "-(m+1)/(2m)", "-(m+1)/(2m)"]);
    assert!(divergence_of(&solve_h0(&p).unwrap(), &p).is_zero());
}

#[test]
fn h0_trace() {
    let p = sym();
    let tr = trace_of(&solve_h0(&p).unwrap(), &p);
    assert_eq!(tr.coeff(0, 1).to_string(), "-2(11m^2-3m-6)/((m+1)(3m+2))");
    assert_eq!(tr.coeff(2, 0).to_string(), "2(16m^3+m^2-9m-2)/((m+1)(3m+2))");
}

#[test]
fn realized_traces_and_inner_products_match() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let p = sym();
    let traces = basis_traces(&p);
    let hess = inner_with_hess_u(&p);
    let gram = gram_pointwise(&p);
    for m in [2usize, 3] {
        let field = FubiniStudy { m };
        for _ in 0..5 {
            let pt = box_point(m, 0.9, &mut rng);
            let geom = LocalGeometry::at(&field, &pt.to_real());
            let u = u_at(&pt, 1.0);
            let mf = m as f64;
            let e: Vec<DMatrix<f64>> = (0..5).map(|k| realize(&BasisCoeffs::unit(k), &pt, 1.0).to_real()).collect();
            let hu = rigidity_core::eigenfunction::hess_u_at(&pt, 1.0).to_real();
            for i in 0..5 {
                assert!((geom.trace(&e[i]) - traces[i].eval_f64(u, 1.0, mf)).abs() < 1e-10, "trace {i}");
                assert!((geom.inner(&e[i], &hu) - hess[i].eval_f64(u, 1.0, mf)).abs() < 1e-10, "hess {i}");
                for j in 0..5 {
                    assert!((geom.inner(&e[i], &e[j]) - gram[i][j].eval_f64(u, 1.0, mf)).abs() < 1e-10, "gram {i}{j}");
                }
            }
        }
    }
}

#[test]
fn l_is_self_adjoint_on_v() {
    let d = self_adjoint_defect(&sym());
    for i in 0..5 {
        for j in 0..5 {
            assert!(d.get(i, j).is_zero(), "({i},{j}) {}", d.get(i, j));
        }
    }
}

#[test]
fn fd_reproduces_every_column() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let exact = l_matrix(&sym()).eval(&rigidity_core::exact::rat(2, 1)).unwrap();
    let m2: [[f64; 5]; 5] = std::array::from_fn(|i| std::array::from_fn(|k| RatFn::constant(exact[i][k].clone()).to_f64()));
    let mut samples = Vec::new();
    for _ in 0..10 {
        let p = box_point(2, 0.8, &mut rng);
        let images = fd_l_images(&p, 1.0, &FDConfig::default()).unwrap();
        assert!(images.type_leak < 1e-6, "type {}", images.type_leak);
        let err = images.prediction_error(&m2, 1.0);
        assert!(err < 1e-4, "prediction {err}");
        samples.push(images);
    }
    let fit = fd_l_columns(&samples, 1.0);
    assert!(fit.residual < 1e-5, "residual {}", fit.residual);
    assert!(fit.min_singular > 1e-2);
    for i in 0..5 {
        for k in 0..5 {
            assert!((fit.columns[(i, k)] - m2[i][k]).abs() < 1e-4, "({i},{k}) {} vs {}", fit.columns[(i, k)], m2[i][k]);
        }
    }
}

#[test]
fn kernel_elements_are_annihilated() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let m = 2;
    let cfg = FDConfig::default();
    for _ in 0..3 {
        let diag: Vec<f64> = {
            let raw: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mean = raw.iter().sum::<f64>() / 4.0;
            raw.iter().map(|x| x - mean).collect()
        };
        let v = EigenFn::diagonal(&diag, 1.0).unwrap();
        let field = |y: &[f64]| {
            let q = ChartPoint::from_real(m, y).unwrap();
            let g = metric_at(&q).g;
            let h = v.hess(&q);
            TensorValue { herm: g * Complex64::new(v.value(&q), 0.0) + h.herm * Complex64::new(2.0, 0.0), holo: h.holo * Complex64::new(2.0, 0.0) }.to_real()
        };
        let p = box_point(m, 0.8, &mut rng);
        let x = p.to_real();
        let geom = LocalGeometry::at(&FubiniStudy { m }, &x);
        let out = fd_l_apply(&field, &x, &geom, &cfg).unwrap();
        assert!(out.amax() < 1e-4, "{}", out.amax());
    }
}

#[test]
fn numeric_divergence() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let m = 2;
    let p = sym();
    let h0 = solve_h0(&p).unwrap();
    let d = divergence_coeffs(&p);
    let cfg = FDConfig::default();
    for i in 0..20 {
        let pt = box_point(m, 0.8, &mut rng);
        let x = pt.to_real();
        let geom = LocalGeometry::at(&FubiniStudy { m }, &x);
        let field = |y: &[f64]| realize(&h0, &ChartPoint::from_real(m, y).unwrap(), 1.0).to_real();
        let div = fd_divergence(&field, &x, &geom, &cfg).unwrap();
        let worst = div.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        assert!(worst < 1e-5, "h0 divergence {worst}");
        if i < 3 {
            let udu: Vec<f64> = real_covector(&grad_u_at(&pt, 1.0)).iter().map(|c| c * u_at(&pt, 1.0)).collect();
            for k in 0..5 {
                let ek = BasisCoeffs::unit(k);
                let field = |y: &[f64]| realize(&ek, &ChartPoint::from_real(m, y).unwrap(), 1.0).to_real();
                let div = fd_divergence(&field, &x, &geom, &cfg).unwrap();
                let c = d[k].eval_f64(2.0);
                for (a, b) in div.iter().zip(&udu) {
                    assert!((a - c * b).abs() < 1e-6, "div e{k}");
                }
            }
        }
    }
}
