use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigidity_core::chart_geometry::sampling::box_point;
use rigidity_core::chart_geometry::{mc_integrate, metric_at, ChartPoint, FubiniStudy, LocalGeometry, TensorValue};
use rigidity_core::deformation_basis::numeric::{fd_l_apply, realize};
use rigidity_core::deformation_basis::{self as db, BasisCoeffs};
use rigidity_core::eigenfunction::{hess_u_at, u_at};
use rigidity_core::exact::RatFn;
use rigidity_core::numeric_harness::FDConfig;
use rigidity_core::scalar_algebra::{GlobalParams, UPoly};
use rigidity_core::variational::formulas::*;
use rigidity_core::variational::pointwise::{fd_delta_star_delta, fd_phi_prime, fd_validate_variation, PointEnv};
use rigidity_core::variational::reduce::*;
use rigidity_core::variational::*;

fn general_n() -> RatFn {
    // any symbol works for the general-n identities; reuse m
    RatFn::m()
}

fn s(x: &RatFn) -> String {
    x.to_string()
}

#[test]
fn first_ricci_variation() {
    let n = general_n();
    let t = conformal_variation(Quantity::Ricci, 1, &n).unwrap().tensor().unwrap();
    assert_eq!(t.coeff(Atom::Hess(Func::U)).coeff(&[]), (&n - 2) * RatFn::ratio(-1, 2));
    assert_eq!(t.coeff(Atom::Metric).coeff(&[Sym::Lap(Func::U)]), RatFn::ratio(-1, 2));
    assert_eq!(t.atoms().len(), 2);
}

#[test]
fn second_scalar_variation() {
    let n = general_n();
    let r = conformal_variation(Quantity::ScalarCurvature, 2, &n).unwrap().scalar().unwrap();
    let u = Sym::Val(Func::U);
    assert_eq!(r.coeff(&[u, u, Sym::Curv]), RatFn::int(2));
    assert_eq!(r.coeff(&[u, Sym::Lap(Func::U)]), (&n - 1) * 4);
    assert_eq!(r.coeff(&[Sym::grad(Func::U, Func::U)]), -((&n - 1) * (&n - 6)) * RatFn::ratio(1, 2));
}

#[test]
fn laplacian_variation_on_u() {
    let p = GlobalParams::symbolic();
    let l = conformal_variation(Quantity::LaplacianPsi, 1, &p.n).unwrap().scalar().unwrap();
    let on_u = substitute_scalar(&l, Func::Psi, Func::U, &Scalar::int(1));
    let got = UPolyEnv::new(&p).scalar(&on_u).unwrap();
    let want = &UPoly::u().pow(2) + &p.grad_u_sq().scale(&((&p.n - 2) * RatFn::ratio(1, 2)));
    assert_eq!(got, want);
}

#[test]
fn unsupported_orders_are_rejected() {
    let n = general_n();
    assert!(conformal_variation(Quantity::HessianPsi, 3, &n).is_err());
    assert!(conformal_variation(Quantity::Ricci, 4, &n).is_err());
    assert!(conformal_variation(Quantity::Ricci, 0, &n).is_err());
}

#[test]
fn scalar_curvature_is_trace_of_ricci() {
    for k in 1..=3 {
        let d = trace_consistency_defect(k, &general_n()).unwrap();
        assert!(d.is_zero(), "order {k}: {d}");
    }
}

#[test]
fn second_order_formula_rederived() {
    let n = general_n();
    let printed = phi_tt(&n);
    let derived = phi_tt_derived(&n).unwrap();
    assert_eq!(printed.tensor, derived.tensor, "\n{}\n{}", printed.tensor, derived.tensor);
    assert_eq!(printed.aux_rhs, derived.aux_rhs, "\n{}\n{}", printed.aux_rhs, derived.aux_rhs);
}

#[test]
fn third_order_tensor_rederived() {
    let n = general_n();
    assert_eq!(phi_ttt(&n, FtttRoute::Printed).unwrap().tensor, phi_ttt_tensor_derived(&n).unwrap());
    let t = phi_ttt(&n, FtttRoute::Printed).unwrap().tensor;
    assert_eq!(t.coeff(Atom::sym2(Func::U, Func::U)).coeff(&[Sym::Val(Func::U)]), (&n - 2) * 6);
}

#[test]
fn third_order_potential_routes_differ_by_one_term() {
    let n = general_n();
    let printed = phi_ttt(&n, FtttRoute::Printed).unwrap().aux_rhs;
    let derived = phi_ttt(&n, FtttRoute::Derived).unwrap().aux_rhs;
    let diff = &derived - &printed;
    let want = Scalar::grad(Func::Ftt, Func::U).scale(&((&n - 2) * RatFn::ratio(3, 2)));
    assert_eq!(diff, want, "{diff}");
    assert_eq!(derived.coeff(&[Sym::MeanU3]), (&n - 2) * RatFn::ratio(1, 2));
}

#[test]
fn polarization_of_conformal_pair() {
    let n = general_n();
    let st = phi_st_conformal(&n);
    let merge = |f: Func| match f {
        Func::V => Func::U,
        Func::Fst => Func::Ftt,
        other => other,
    };
    let tt = phi_tt(&n);
    assert_eq!(st.tensor.rename(&merge), tt.tensor);
    assert_eq!(st.aux_rhs.rename(&merge), tt.aux_rhs);
}

#[test]
fn conformal_pair_trace() {
    let n = general_n();
    let st = phi_st_conformal(&n);
    let tr = impose_eigen(&st.trace(&Dims::single(n.clone())).unwrap(), &[Func::U, Func::V]);
    assert_eq!(tr, impose_eigen(&phi_st_conformal_trace_closed(&n), &[Func::U, Func::V]));
    assert_eq!(tr.coeff(&[Sym::grad(Func::U, Func::V)]), (-(&n * 3) + 2) * RatFn::ratio(1, 2));
}

#[test]
fn mixed_trace_and_potential_rederived() {
    let n = general_n();
    let f = phi_st_mixed(&n);
    let tr = impose_eigen(&f.trace(&Dims::single(n.clone())).unwrap(), &[Func::U]);
    assert_eq!(tr, impose_eigen(&phi_st_mixed_trace_closed(&n), &[Func::U]), "\n{tr}");
    assert_eq!(derived_fst_mixed_rhs(&n).unwrap(), f.aux_rhs);
}

#[test]
fn lemma_chain_for_orthogonal_direction() {
    let p = GlobalParams::symbolic();
    let f = phi_st_conformal(&p.n);
    let tr = phi_st_conformal_trace_closed(&p.n);
    let avg = cross_average(&impose_eigen(&tr, &[Func::U, Func::V]), Func::U, &[Func::U, Func::V], &[(Func::Fst, f.aux_rhs)]).unwrap();
    assert_eq!(s(&avg.coeff(Func::U, Func::U, Func::V)), "4(m-1)");
    assert_eq!(avg.terms().count(), 1);
}

#[test]
fn potentials_solve_their_equations() {
    for p in [GlobalParams::symbolic(), GlobalParams::concrete(2).unwrap(), GlobalParams::concrete(5).unwrap()] {
        let vs = variation_scalars(&p).unwrap();
        assert_eq!(vs.residual_terms, 0);
        assert_eq!(vs.f_tt, db::f_tt(&p).unwrap());
        assert_eq!(vs.f_t, UPoly::u().scale(&((&p.n - 2) * RatFn::ratio(1, 2))));
        assert_ne!(vs.f_ttt, vs.f_ttt_printed);
    }
}

#[test]
fn second_order_equation_from_formula() {
    let p = GlobalParams::symbolic();
    assert_eq!(second_order_rhs_from_phi_tt(&p).unwrap(), db::second_order_rhs(&p));
    let t = phi_tt(&p.n).tensor;
    assert_eq!(s(&t.coeff(Atom::sym2(Func::U, Func::U)).coeff(&[])), "-2(m-1)");
}

#[test]
fn mixed_trace_rejects_divergent_h() {
    let p = GlobalParams::symbolic();
    let err = mixed_trace(&BasisCoeffs::unit(1), &p).unwrap_err();
    assert!(matches!(err, VariationError::NonzeroDivergence(_)));
    assert!(mixed_trace(&BasisCoeffs::zero(), &p).unwrap().is_zero());
    // a constant rescaling: (n−2)/2·λ²u + nλ²u/2
    let got = mixed_trace(&BasisCoeffs::unit(0), &p).unwrap();
    assert_eq!(got, UPoly::monomial(1, 1, &p.n - 1));
}

#[test]
fn phi_prime_on_v() {
    let p = GlobalParams::symbolic();
    let pm = phi_prime_matrix(&p).unwrap();
    let h0 = db::solve_h0(&p).unwrap();
    let lhs = pm.mul_vec(h0.as_slice()).unwrap();
    let rhs: Vec<RatFn> = db::l_matrix(&p).mul_vec(h0.as_slice()).unwrap().into_iter().map(|x| x * RatFn::ratio(1, 2)).collect();
    assert_eq!(lhs, rhs);
    let d = phi_prime_symmetry_defect(&p).unwrap();
    for i in 0..5 {
        for j in 0..5 {
            assert!(d.get(i, j).is_zero());
        }
    }
}

#[test]
fn fd_conformal_ricci_variations() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for _ in 0..10 {
        let pt = box_point(2, 0.8, &mut rng);
        let r1 = fd_validate_variation(Quantity::Ricci, 1, &pt, 1e-2, 1.0).unwrap();
        assert!(r1.max_abs_error < 1e-5, "order 1: {r1:?}");
        let r2 = fd_validate_variation(Quantity::Ricci, 2, &pt, 1e-2, 1.0).unwrap();
        assert!(r2.max_abs_error < 1e-4, "order 2: {r2:?}");
    }
}

#[test]
fn fd_third_order_and_scalar_curvature() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..3 {
        let pt = box_point(2, 0.8, &mut rng);
        let r3 = fd_validate_variation(Quantity::Ricci, 3, &pt, 1e-2, 1.0).unwrap();
        assert!(r3.max_abs_error < 1e-2 * (1.0 + r3.magnitude), "{r3:?}");
        for k in 1..=2 {
            let r = fd_validate_variation(Quantity::ScalarCurvature, k, &pt, 1e-2, 1.0).unwrap();
            assert!(r.max_abs_error < 1e-4, "{r:?}");
        }
    }
    assert!(fd_validate_variation(Quantity::Ricci, 1, &ChartPoint::origin(2), 1e-9, 1.0).is_err());
}

#[test]
fn einstein_at_zero() {
    let geom = LocalGeometry::at(&FubiniStudy { m: 2 }, &box_point(2, 0.5, &mut ChaCha8Rng::seed_from_u64(1)).to_real());
    assert!((geom.ricci() - &geom.g * 0.5).amax() < 1e-12);
}

#[test]
fn pointwise_mixed_trace_rules() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let m = 2;
    let p = GlobalParams::concrete(m).unwrap();
    let h0 = db::solve_h0(&p).unwrap();
    let f = phi_st_mixed(&p.n);
    let (env, f_st) = UPolyEnv::new(&p).with_deform(&h0).solve_aux(&f).unwrap();
    drop(env);
    let closed = phi_st_mixed_trace_closed(&p.n);
    for _ in 0..3 {
        let pt = box_point(m as usize, 0.6, &mut rng);
        let mut pe = PointEnv::new(&pt, 1.0, FDConfig::with_step(1e-3));
        pe.bind_deform(&h0);
        pe.bind_poly(Func::Fst, &f_st);
        let t = pe.tensor(&f.tensor).unwrap();
        let lhs = pe.geom.trace(&t);
        let rhs = pe.scalar(&closed).unwrap();
        assert!((lhs - rhs).abs() < 1e-5 * (1.0 + rhs.abs()), "{lhs} vs {rhs}");
    }
}

#[test]
fn fd_phi_prime_matches_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let p = GlobalParams::concrete(2).unwrap();
    let pm = phi_prime_matrix(&p).unwrap();
    let cfg = FDConfig::with_step(1e-3);
    let h0 = db::solve_h0(&p).unwrap();
    let pt = box_point(2, 0.6, &mut rng);
    for h in [BasisCoeffs::unit(1), BasisCoeffs::unit(3), h0] {
        let want = realize(&BasisCoeffs::from_vec(pm.mul_vec(h.as_slice()).unwrap()), &pt, 1.0).to_real();
        let got = fd_phi_prime(&h, &pt, 1.0, &cfg).unwrap();
        assert!((&got - &want).amax() < 1e-4, "{}", (&got - &want).amax());
    }
}

#[test]
fn conformal_direction_in_kernel() {
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let m = 2usize;
    let cfg = FDConfig::with_step(1e-3);
    let chart = |y: &[f64]| ChartPoint::from_real(m, y).unwrap();
    let field = |y: &[f64]| {
        let q = chart(y);
        let g = metric_at(&q).g;
        let h = hess_u_at(&q, 1.0);
        TensorValue { herm: g * num_complex::Complex64::new(u_at(&q, 1.0), 0.0) + h.herm * num_complex::Complex64::new(2.0, 0.0), holo: h.holo * num_complex::Complex64::new(2.0, 0.0) }.to_real()
    };
    for _ in 0..20 {
        let pt = box_point(m, 0.7, &mut rng);
        let x = pt.to_real();
        let geom = LocalGeometry::at(&FubiniStudy { m }, &x);
        // δ(ug + 2∇²u) = 0, so X = 0 and Φ′ = ½(L + 2δ*δ)
        let phi = (fd_l_apply(&field, &x, &geom, &cfg).unwrap() + fd_delta_star_delta(&field, &x, m, &cfg).unwrap() * 2.0) * 0.5;
        assert!(phi.amax() < 1e-4, "{}", phi.amax());
    }
}

#[test]
fn phi_prime_self_adjoint_monte_carlo() {
    let p = GlobalParams::concrete(2).unwrap();
    let pm = phi_prime_matrix(&p).unwrap();
    let col = |k: usize| BasisCoeffs::from_vec(pm.column(k));
    for (i, j) in [(1usize, 2usize), (0, 3), (2, 4)] {
        let (ei, ej) = (BasisCoeffs::unit(i), BasisCoeffs::unit(j));
        let (pi, pj) = (col(i), col(j));
        let est = mc_integrate(
            |q: &ChartPoint| {
                let md = LocalGeometry::at(&FubiniStudy { m: 2 }, &q.to_real());
                let a = md.inner(&realize(&pi, q, 1.0).to_real(), &realize(&ej, q, 1.0).to_real());
                let b = md.inner(&realize(&ei, q, 1.0).to_real(), &realize(&pj, q, 1.0).to_real());
                a - b
            },
            2,
            20_000,
            7,
        );
        assert!(est.z_score(0.0).abs() < 3.0, "({i},{j}) {est:?}");
    }
}
