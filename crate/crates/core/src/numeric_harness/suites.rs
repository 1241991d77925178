//! The suite registry. Every check carries its own tolerance; numeric checks
//! draw points from an RNG stream derived from the run seed and the check id.

use std::collections::BTreeMap;
use std::error::Error;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::check::{CheckResult, Kind};
use super::{FDConfig, StepError};
use crate::chart_geometry::engine::Christoffel;
use crate::chart_geometry::fd::{fd_christoffel, fd_divergence, fd_gradient, fd_hessian};
use crate::chart_geometry::metric::hermitian_trace;
use crate::chart_geometry::sampling::{box_point, stream_rng};
use crate::chart_geometry::{mc_integrate, metric_at, ChartPoint, FubiniStudy, LocalGeometry, TensorValue};
use crate::deformation_basis::numeric::{fd_l_apply, fd_l_columns, fd_l_images, realize, realize_f64};
use crate::deformation_basis::{self as db, BasisCoeffs};
use crate::eigenfunction::closed_form::{grad_norm_sq, real_covector, xi_trace};
use crate::eigenfunction::sphere::power_average;
use crate::eigenfunction::{grad_u_at, hess_u_at, u_at, xi_at, EigenFn};
use crate::exact::{rat, Rat, RatFn, RatMatrix};
use crate::obstruction::{self as ob, closed};
use crate::product_rigidity::{self as pr, ProductConfig};
use crate::scalar_algebra::{moment, moment_at, GlobalParams, UPoly};
use crate::variational::formulas::{phi_tt_derived, phi_ttt_tensor_derived, trace_consistency_defect};
use crate::variational::pointwise::fd_validate_variation;
use crate::variational::reduce::{phi_prime_symmetry_defect, second_order_rhs_from_phi_tt};
use crate::variational::{phi_tt, phi_ttt, FtttRoute, Quantity};

/// Registered suite ids, in canonical order.
pub const SUITES: &[&str] = &[
    "deformation",
    "eigen-identities",
    "eigenfunction",
    "exact",
    "geometry",
    "l-matrix-fd",
    "moments",
    "obstruction",
    "product",
    "second-order",
    "variational",
];

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("unknown suite `{0}` (known: {known})", known = SUITES.join(", "))]
    UnknownSuite(String),
    #[error("m = {0} is excluded: the projective line CP^1 is not covered, m must be at least 2")]
    ExcludedM(i64),
    #[error("n2 = {0} must be at least 1")]
    InvalidN2(i64),
    #[error("Monte Carlo needs at least 2 samples")]
    TooFewSamples,
    #[error(transparent)]
    Step(#[from] StepError),
}

/// Inputs shared by every check. `m = None` means symbolic and runs only the
/// exact checks.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteParams {
    pub m: Option<i64>,
    pub n2: i64,
    pub samples: usize,
    pub seed: u64,
    pub fd: FDConfig,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams { m: Some(2), n2: 3, samples: 100_000, seed: 7, fd: FDConfig::default() }
    }
}

type Out = Result<Vec<CheckResult>, Box<dyn Error + Send + Sync>>;

struct Check {
    id: &'static str,
    kind: Kind,
    concrete_only: bool,
    run: fn(&Ctx, &str) -> Out,
}

struct Ctx {
    m: Option<i64>,
    params: GlobalParams,
    n2: i64,
    samples: usize,
    seed: u64,
    fd: FDConfig,
}

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

impl Ctx {
    fn mu(&self) -> usize {
        self.m.expect("concrete check") as usize
    }

    fn stream_seed(&self, id: &str) -> u64 {
        self.seed ^ fnv(id)
    }

    fn rng(&self, id: &str) -> ChaCha8Rng {
        stream_rng(self.seed, fnv(id))
    }

    /// A frozen symbolic value, specialized to the run's `m`.
    fn want(&self, s: &str) -> String {
        let f: RatFn = s.parse().expect("registry constant parses");
        self.at(&f).to_string()
    }

    fn at(&self, f: &RatFn) -> RatFn {
        match self.m {
            Some(m) => RatFn::constant(f.eval_int(m).expect("no pole at m >= 2")),
            None => f.clone(),
        }
    }

    /// `m` and `m + 1` for pointwise sampling.
    fn chart_dims(&self) -> [usize; 2] {
        [self.mu(), self.mu() + 1]
    }
}

fn one(r: CheckResult) -> Out {
    Ok(vec![r])
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn rel(err: f64, scale: f64) -> f64 {
    err / scale.max(1.0)
}

fn matrix_is_zero(d: &RatMatrix) -> bool {
    (0..d.rows()).all(|i| (0..d.cols()).all(|j| d.get(i, j).is_zero()))
}

fn joined(v: &[String]) -> String {
    format!("[{}]", v.join(", "))
}

// ---------------------------------------------------------------- exact

fn exact_l_inverse_closed(c: &Ctx, id: &str) -> Out {
    one(CheckResult::holds(id, db::l_inverse(&c.params)? == db::l_inverse_closed(&c.params)?, "Gaussian elimination equals the closed-form inverse"))
}

fn exact_rhs_routes(c: &Ctx, id: &str) -> Out {
    one(CheckResult::holds(id, db::second_order_rhs(&c.params) == db::derived_second_order_rhs(&c.params)?, "tabulated and rederived second-order right-hand sides"))
}

fn exact_f_tt(c: &Ctx, id: &str) -> Out {
    let f = db::f_tt(&c.params)?;
    one(CheckResult::exact(id, f.coeff(2, 0), c.want("-(4m^2+m-2)/(3m+2)")))
}

fn exact_f_tt_at_two(_: &Ctx, id: &str) -> Out {
    let f = db::f_tt(&GlobalParams::symbolic())?.coeff(2, 0);
    one(CheckResult::exact(id, RatFn::constant(f.eval_int(2)?), "-2"))
}

fn exact_roundtrip(c: &Ctx, id: &str) -> Out {
    let mut forms = vec![closed::i1(), closed::i2(), closed::total(), closed::total_derived()];
    forms.extend(db::h0_closed(&c.params).as_slice().iter().cloned());
    let bad: Vec<String> = forms.iter().filter(|f| f.to_string().parse::<RatFn>().ok().as_ref() != Some(*f)).map(|f| f.to_string()).collect();
    one(CheckResult::holds(id, bad.is_empty(), if bad.is_empty() { "canonical strings parse back".to_string() } else { format!("round trip broke: {}", bad.join("; ")) }))
}

// ---------------------------------------------------------------- eigen-identities

fn eig_laplacian_u(c: &Ctx, id: &str) -> Out {
    one(CheckResult::holds(id, UPoly::u().laplacian(&c.params) == UPoly::u().scale(&RatFn::int(-1)), "Δu = −u"))
}

fn grad_sq_closed(p: &GlobalParams) -> UPoly {
    let k = (&p.m * 2).inv().expect("m ≠ 0");
    &UPoly::lambda2().scale(&k) - &UPoly::u().pow(2).scale(&k)
}

fn eig_grad_norm(c: &Ctx, id: &str) -> Out {
    one(CheckResult::holds(id, c.params.grad_u_sq() == grad_sq_closed(&c.params), "|∇u|² = (λ² − u²)/(2m)"))
}

fn eig_laplacian_u2(c: &Ctx, id: &str) -> Out {
    let p = &c.params;
    let want = &UPoly::u().pow(2).scale(&RatFn::int(-2)) + &p.grad_u_sq().scale(&RatFn::int(2));
    one(CheckResult::holds(id, UPoly::u().pow(2).laplacian(p) == want, "Δu² = 2uΔu + 2|∇u|²"))
}

fn eig_by_parts(c: &Ctx, id: &str) -> Out {
    let p = &c.params;
    let a = p.grad_u_sq().integrate(p);
    let b = UPoly::u().pow(2).integrate(p);
    one(CheckResult::holds(id, a == b, "⨍|∇u|² = ⨍u²"))
}

fn eig_mc_grad(c: &Ctx, id: &str) -> Out {
    let m = c.mu();
    let seed = c.stream_seed(id);
    let est = mc_integrate(|p| grad_norm_sq(&metric_at(p), &grad_u_at(p, 1.0)), m, c.samples, seed);
    one(CheckResult::mc(id, est.mean, est.se, 1.0 / (2.0 * m as f64 + 1.0), 3.0, seed))
}

fn eig_mc_parts(c: &Ctx, id: &str) -> Out {
    let m = c.mu();
    let seed = c.stream_seed(id);
    let est = mc_integrate(
        |p| {
            let u = u_at(p, 1.0);
            grad_norm_sq(&metric_at(p), &grad_u_at(p, 1.0)) - u * u
        },
        m,
        c.samples,
        seed,
    );
    one(CheckResult::mc(id, est.mean, est.se, 0.0, 3.0, seed))
}

// ---------------------------------------------------------------- moments

const MOMENT_2: &str = "1/(2m+1)";
const MOMENT_4: &str = "3/((2m+1)(2m+3))";

fn mom_recurrence(c: &Ctx, id: &str, k: u32, want: &str) -> Out {
    one(CheckResult::exact(id, moment(k, &c.params), c.want(want)))
}

fn mom_u2(c: &Ctx, id: &str) -> Out {
    mom_recurrence(c, id, 2, MOMENT_2)
}

fn mom_u4(c: &Ctx, id: &str) -> Out {
    mom_recurrence(c, id, 4, MOMENT_4)
}

fn mom_odd(c: &Ctx, id: &str) -> Out {
    let ok = [1, 3, 5].iter().all(|&k| moment(k, &c.params).is_zero());
    one(CheckResult::holds(id, ok, "⨍u = ⨍u³ = ⨍u⁵ = 0"))
}

fn balanced(m: usize) -> Vec<Rat> {
    (0..2 * m).map(|k| rat(if k < m { 1 } else { -1 }, 1)).collect()
}

/// The sphere oracle at the run's `m`, or at `m = 2..6` when symbolic.
fn mom_sphere(c: &Ctx, id: &str, k: u32, want: &str) -> Out {
    let f: RatFn = want.parse()?;
    let ms: Vec<i64> = c.m.map_or_else(|| (2..=6).collect(), |m| vec![m]);
    let mut bad = Vec::new();
    for m in &ms {
        let oracle = power_average(&balanced(*m as usize), k);
        if oracle != f.eval_int(*m)? || oracle != moment_at(k, *m) {
            bad.push(m.to_string());
        }
    }
    let ms: Vec<String> = ms.iter().map(i64::to_string).collect();
    one(CheckResult::holds(id, bad.is_empty(), format!("Dirichlet sphere moments at m = {}; mismatches: [{}]", ms.join(","), bad.join(","))))
}

fn mom_u2_sphere(c: &Ctx, id: &str) -> Out {
    mom_sphere(c, id, 2, MOMENT_2)
}

fn mom_u4_sphere(c: &Ctx, id: &str) -> Out {
    mom_sphere(c, id, 4, MOMENT_4)
}

fn mom_mc(c: &Ctx, id: &str, k: i32, want: &str) -> Out {
    let m = c.mu();
    let seed = c.stream_seed(id);
    let est = mc_integrate(|p| u_at(p, 1.0).powi(k), m, c.samples, seed);
    let target = c.want(want).parse::<RatFn>()?.to_f64();
    one(CheckResult::mc(id, est.mean, est.se, target, 3.0, seed))
}

fn mom_mc_u2(c: &Ctx, id: &str) -> Out {
    mom_mc(c, id, 2, MOMENT_2)
}

fn mom_mc_u4(c: &Ctx, id: &str) -> Out {
    mom_mc(c, id, 4, MOMENT_4)
}

// ---------------------------------------------------------------- geometry

const POINTS: usize = 100;

fn for_points(c: &Ctx, id: &str, radius: f64, mut f: impl FnMut(usize, &ChartPoint) -> Result<f64, StepError>) -> Result<f64, StepError> {
    let mut rng = c.rng(id);
    let mut worst = 0.0_f64;
    for m in c.chart_dims() {
        for _ in 0..POINTS {
            let p = box_point(m, radius, &mut rng);
            worst = worst.max(f(m, &p)?);
        }
    }
    Ok(worst)
}

fn dims_note(c: &Ctx) -> String {
    let [a, b] = c.chart_dims();
    format!("{POINTS} points each at m = {a}, {b}")
}

fn geo_christoffel_closed(c: &Ctx, id: &str) -> Out {
    let e = for_points(c, id, 1.0, |m, p| {
        let geom = LocalGeometry::at(&FubiniStudy { m }, &p.to_real());
        let closed = Christoffel { d: geom.d, data: metric_at(p).real_christoffel() };
        Ok(rel(closed.max_abs_diff(&geom.gamma), closed.max_abs()))
    })?;
    one(CheckResult::fd(id, e, 1e-10, format!("closed form vs dual-number jets, {}", dims_note(c))))
}

fn geo_christoffel_fd(c: &Ctx, id: &str) -> Out {
    let e = for_points(c, id, 1.0, |m, p| {
        let closed = Christoffel { d: 4 * m - 2, data: metric_at(p).real_christoffel() };
        let fd = fd_christoffel(&FubiniStudy { m }, &p.to_real(), &c.fd)?;
        Ok(rel(fd.max_abs_diff(&closed), closed.max_abs()))
    })?;
    one(CheckResult::fd(id, e, 1e-6, format!("relative, {}", dims_note(c))))
}

fn geo_curvature(c: &Ctx, id: &str) -> Out {
    let e = for_points(c, id, 1.0, |m, p| {
        let geom = LocalGeometry::at(&FubiniStudy { m }, &p.to_real());
        let r = metric_at(p).real_curvature();
        let diff = max_abs(r.iter().zip(&geom.riemann).map(|(a, b)| a - b));
        Ok(rel(diff, max_abs(r.iter().copied())))
    })?;
    one(CheckResult::fd(id, e, 1e-10, format!("closed curvature vs jets, {}", dims_note(c))))
}

fn geo_einstein(c: &Ctx, id: &str) -> Out {
    let e = for_points(c, id, 1.0, |m, p| {
        let geom = LocalGeometry::at(&FubiniStudy { m }, &p.to_real());
        Ok(rel((geom.ricci() - &geom.g * 0.5).amax(), geom.g.amax()))
    })?;
    one(CheckResult::fd(id, e, 1e-10, format!("Rc = g/2, {}", dims_note(c))))
}

// ---------------------------------------------------------------- eigenfunction

fn random_hermitian(m: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let n = 2 * m;
    let raw = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let mut h = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = h.trace() / n as f64;
    for i in 0..n {
        h[(i, i)] -= tr;
    }
    h
}

/// Runs `f` on a fresh random eigenfunction at every sampled point.
fn with_eigenfns(c: &Ctx, id: &str, mut f: impl FnMut(usize, &EigenFn, &ChartPoint) -> Result<f64, StepError>) -> Result<f64, Box<dyn Error + Send + Sync>> {
    let mut rng = c.rng(id);
    let mut worst = 0.0_f64;
    for m in c.chart_dims() {
        for _ in 0..POINTS {
            let eig = EigenFn::new(m, random_hermitian(m, &mut rng), 1.0)?;
            let p = box_point(m, 0.8, &mut rng);
            worst = worst.max(f(m, &eig, &p)?);
        }
    }
    Ok(worst)
}

fn ef_grad_fd(c: &Ctx, id: &str) -> Out {
    let e = with_eigenfns(c, id, |m, eig, p| {
        let f = |y: &[f64]| eig.value(&ChartPoint::from_real(m, y).expect("finite"));
        let fd = fd_gradient(&f, &p.to_real(), &c.fd)?;
        let closed = real_covector(&eig.grad(p));
        Ok(rel(max_abs(fd.iter().zip(&closed).map(|(a, b)| a - b)), max_abs(closed.iter().copied())))
    })?;
    one(CheckResult::fd(id, e, 1e-6, format!("random traceless Hermitian u, {}", dims_note(c))))
}

fn ef_hess_fd(c: &Ctx, id: &str) -> Out {
    let e = with_eigenfns(c, id, |m, eig, p| {
        let x = p.to_real();
        let geom = LocalGeometry::at(&FubiniStudy { m }, &x);
        let f = |y: &[f64]| eig.value(&ChartPoint::from_real(m, y).expect("finite"));
        let fd = fd_hessian(&f, &x, &geom, &c.fd)?;
        let closed = eig.hess(p).to_real();
        Ok(rel((fd - &closed).amax(), closed.amax()))
    })?;
    one(CheckResult::fd(id, e, 1e-6, format!("covariant Hessian, {}", dims_note(c))))
}

fn ef_eigenvalue(c: &Ctx, id: &str) -> Out {
    let e = with_eigenfns(c, id, |_, eig, p| {
        let lap = hermitian_trace(&metric_at(p), &eig.hess(p).herm);
        Ok(rel((lap + eig.value(p)).abs(), eig.value(p).abs()))
    })?;
    one(CheckResult::fd(id, e, 1e-10, format!("Δu = −u by contraction, {}", dims_note(c))))
}

fn ef_grad_norm(c: &Ctx, id: &str) -> Out {
    let e = for_points(c, id, 1.2, |m, p| {
        let u = u_at(p, 1.0);
        let lhs = grad_norm_sq(&metric_at(p), &grad_u_at(p, 1.0));
        Ok((lhs - (1.0 - u * u) / (2.0 * m as f64)).abs())
    })?;
    one(CheckResult::fd(id, e, 1e-10, format!("balanced u, λ = 1, {}", dims_note(c))))
}

fn ef_xi(c: &Ctx, id: &str) -> Out {
    let e = for_points(c, id, 1.0, |m, p| {
        let xi = xi_at(p, 1.0);
        let u = u_at(p, 1.0);
        let mf = m as f64;
        let want = ((mf - 1.0) + (mf + 1.0) * u * u) / (4.0 * mf * mf);
        Ok(xi.mismatch().max((xi_trace(p, &xi) - want).abs()))
    })?;
    one(CheckResult::fd(id, e, 1e-10, format!("contraction vs combination and trace, {}", dims_note(c))))
}

fn ef_balanced_blocks(c: &Ctx, id: &str) -> Out {
    let e = for_points(c, id, 1.0, |m, p| {
        let f = EigenFn::balanced(m, 1.0);
        let dv = (f.value(p) - u_at(p, 1.0)).abs();
        let dg = max_abs(f.grad(p).iter().zip(&grad_u_at(p, 1.0)).map(|(a, b)| (a - b).norm()));
        let dh = max_abs((f.hess(p).herm - hess_u_at(p, 1.0).herm).iter().map(|z| z.norm()));
        Ok(dv.max(dg).max(dh))
    })?;
    one(CheckResult::fd(id, e, 1e-10, format!("general formula vs block formulas, {}", dims_note(c))))
}

// ---------------------------------------------------------------- l-matrix-fd

const L_POINTS: usize = 10;

fn lm_fit(c: &Ctx, id: &str) -> Out {
    let m = c.mu();
    let mut rng = c.rng(id);
    let exact = db::l_matrix(&c.params);
    let mut samples = Vec::with_capacity(L_POINTS);
    for _ in 0..L_POINTS {
        samples.push(fd_l_images(&box_point(m, 0.8, &mut rng), 1.0, &c.fd)?);
    }
    let fit = fd_l_columns(&samples, 1.0);
    let mut out = Vec::new();
    for i in 0..5 {
        for k in 0..5 {
            let want = exact.get(i, k).to_f64();
            let got = fit.columns[(i, k)];
            out.push(CheckResult::fd(format!("{id}.entry-{}-{}", i + 1, k + 1), (got - want).abs(), 1e-4, format!("fitted {got:.8}, exact {}", exact.get(i, k))));
        }
    }
    let leak = samples.iter().map(|s| s.type_leak).fold(0.0, f64::max);
    out.push(CheckResult::fd(format!("{id}.type-leak"), leak, 1e-6, "(2,0)+(0,2) part of L on (1,1) fields"));
    out.push(CheckResult::fd(format!("{id}.fit-residual"), fit.residual, 1e-5, format!("least squares over {L_POINTS} points, min singular value {:.3e}", fit.min_singular)));
    Ok(out)
}

fn lm_inverse(c: &Ctx, id: &str) -> Out {
    let p = &c.params;
    one(CheckResult::holds(id, db::l_matrix(p).mul(&db::l_inverse(p)?)?.is_identity(), "L·L⁻¹ = I"))
}

// ---------------------------------------------------------------- deformation

const H0: [&str; 5] = ["-2/(m+1)", "2m/(m+1)", "4m(m^2+5m+2)/((m+1)(3m+2))", "-8m^3/((m+1)(3m+2))", "4m^2(m+2)/((m+1)(3m+2))"];

fn def_h0(c: &Ctx, id: &str) -> Out {
    let want: Vec<String> = H0.iter().map(|s| c.want(s)).collect();
    one(CheckResult::exact(id, joined(&db::solve_h0(&c.params)?.to_strings()), joined(&want)))
}

fn def_h0_closed(c: &Ctx, id: &str) -> Out {
    one(CheckResult::holds(id, db::solve_h0(&c.params)? == db::h0_closed(&c.params), "solver equals closed form"))
}

fn def_round_trip(c: &Ctx, id: &str) -> Out {
    let p = &c.params;
    let half = db::solve_h0(p)?.scale(&RatFn::ratio(1, 2));
    let back = BasisCoeffs::from_vec(db::l_matrix(p).mul_vec(half.as_slice())?);
    one(CheckResult::holds(id, back == db::second_order_rhs(p), "L(h₀/2) = second-order right-hand side"))
}

fn def_divergence(c: &Ctx, id: &str) -> Out {
    let d = db::divergence_of(&db::solve_h0(&c.params)?, &c.params);
    one(CheckResult::exact(id, d, "0"))
}

fn def_self_adjoint(c: &Ctx, id: &str) -> Out {
    one(CheckResult::holds(id, matrix_is_zero(&db::self_adjoint_defect(&c.params)), "⨍⟨Le_i,e_j⟩ = ⨍⟨e_i,Le_j⟩ on the basis"))
}

fn def_fd_divergence(c: &Ctx, id: &str) -> Out {
    let m = c.mu();
    let h0 = db::solve_h0(&c.params)?;
    let mut rng = c.rng(id);
    let mut worst = 0.0_f64;
    for _ in 0..20 {
        let x = box_point(m, 0.8, &mut rng).to_real();
        let geom = LocalGeometry::at(&FubiniStudy { m }, &x);
        let field = |y: &[f64]| realize(&h0, &ChartPoint::from_real(m, y).expect("finite"), 1.0).to_real();
        worst = worst.max(max_abs(fd_divergence(&field, &x, &geom, &c.fd)?));
    }
    one(CheckResult::fd(id, worst, 1e-5, "δh₀ at 20 points"))
}

fn def_kernel(c: &Ctx, id: &str) -> Out {
    let m = c.mu();
    let mut rng = c.rng(id);
    let mut worst = 0.0_f64;
    for _ in 0..3 {
        let raw: Vec<f64> = (0..2 * m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        let v = EigenFn::diagonal(&raw.iter().map(|x| x - mean).collect::<Vec<_>>(), 1.0)?;
        let field = |y: &[f64]| {
            let q = ChartPoint::from_real(m, y).expect("finite");
            let h = v.hess(&q);
            let two = Complex64::new(2.0, 0.0);
            TensorValue { herm: metric_at(&q).g * Complex64::new(v.value(&q), 0.0) + h.herm * two, holo: h.holo * two }.to_real()
        };
        let x = box_point(m, 0.8, &mut rng).to_real();
        let geom = LocalGeometry::at(&FubiniStudy { m }, &x);
        worst = worst.max(fd_l_apply(&field, &x, &geom, &c.fd)?.amax());
    }
    one(CheckResult::fd(id, worst, 1e-4, "L(vg + 2∇²v) = 0 for diagonal eigenfunctions v"))
}

fn def_mc_self_adjoint(c: &Ctx, id: &str) -> Out {
    let m = c.mu();
    let l = db::l_matrix(&c.params);
    let col = |k: usize| BasisCoeffs::from_vec(l.column(k));
    let (i, j) = (1, 2);
    let (ei, ej, li, lj) = (BasisCoeffs::unit(i), BasisCoeffs::unit(j), col(i), col(j));
    let seed = c.stream_seed(id);
    let est = mc_integrate(
        |q| {
            let geom = LocalGeometry::at(&FubiniStudy { m }, &q.to_real());
            let t = |b: &BasisCoeffs| realize(b, q, 1.0).to_real();
            geom.inner(&t(&li), &t(&ej)) - geom.inner(&t(&ei), &t(&lj))
        },
        m,
        (c.samples / 5).max(2),
        seed,
    );
    one(CheckResult::mc(id, est.mean, est.se, 0.0, 3.0, seed))
}

// ---------------------------------------------------------------- variational

fn var_trace(_: &Ctx, id: &str) -> Out {
    let n = RatFn::m();
    let mut bad = Vec::new();
    for k in 1..=3 {
        if !trace_consistency_defect(k, &n)?.is_zero() {
            bad.push(k.to_string());
        }
    }
    one(CheckResult::holds(id, bad.is_empty(), format!("R^(k) = tr Rc^(k) for k = 1..3 in general dimension; failing orders [{}]", bad.join(","))))
}

fn var_phi_tt(_: &Ctx, id: &str) -> Out {
    let n = RatFn::m();
    let (a, b) = (phi_tt(&n), phi_tt_derived(&n)?);
    one(CheckResult::holds(id, a.tensor == b.tensor && a.aux_rhs == b.aux_rhs, "second variation of the soliton operator rederived"))
}

fn var_phi_ttt(_: &Ctx, id: &str) -> Out {
    let n = RatFn::m();
    one(CheckResult::holds(id, phi_ttt(&n, FtttRoute::Printed)?.tensor == phi_ttt_tensor_derived(&n)?, "third variation tensor part rederived"))
}

fn var_symmetric(c: &Ctx, id: &str) -> Out {
    one(CheckResult::holds(id, matrix_is_zero(&phi_prime_symmetry_defect(&c.params)?), "linearized operator is symmetric on the basis"))
}

fn var_rhs(c: &Ctx, id: &str) -> Out {
    one(CheckResult::holds(id, second_order_rhs_from_phi_tt(&c.params)? == db::second_order_rhs(&c.params), "second-order equation projected from the formula"))
}

/// Step in the variation parameter `t`; fixed, independent of the spatial step.
const T_STEP: f64 = 1e-2;

fn var_fd(c: &Ctx, id: &str, order: u32, tol: f64) -> Out {
    let m = c.mu();
    let mut rng = c.rng(id);
    let mut worst = 0.0_f64;
    for _ in 0..10 {
        let r = fd_validate_variation(Quantity::Ricci, order, &box_point(m, 0.8, &mut rng), T_STEP, 1.0)?;
        worst = worst.max(r.max_abs_error);
    }
    one(CheckResult::fd(id, worst, tol, format!("Ricci variation along (1+tu)g, order {order}, 10 points, t-step {T_STEP:e} with Richardson")))
}

fn var_fd_1(c: &Ctx, id: &str) -> Out {
    var_fd(c, id, 1, 1e-5)
}

fn var_fd_2(c: &Ctx, id: &str) -> Out {
    var_fd(c, id, 2, 1e-4)
}

// ---------------------------------------------------------------- obstruction

fn split_str(u4: &RatFn, u2: &RatFn) -> String {
    format!("u4: {u4}; l2u2: {u2}")
}

fn ob_split(c: &Ctx, id: &str, got: &ob::Split, u4: &str, u2: &str) -> Out {
    one(CheckResult::exact(id, split_str(&got.u4, &got.u2), format!("u4: {}; l2u2: {}", c.want(u4), c.want(u2))))
}

fn ob_i11(c: &Ctx, id: &str) -> Out {
    ob_split(c, id, &ob::compute_i1(&c.params)?.i11, "3(36m^2+3m-22)/(3m+2)", "-3(16m^2+7m-14)/(3m+2)")
}

fn ob_i12(c: &Ctx, id: &str) -> Out {
    ob_split(c, id, &ob::compute_i1(&c.params)?.i12, "-6(2m+3)(5m^2-m-2)/(m(3m+2))", "-6(2m^3-14m^2+m+6)/(m(3m+2))")
}

fn ob_i21(c: &Ctx, id: &str) -> Out {
    ob_split(c, id, &ob::compute_i2(&c.params)?.i21, "-(8m^2-3m-2)/(m(3m+2))", "-(2m^3-7m^2+m+2)/(m(m+1)(3m+2))")
}

fn ob_third(c: &Ctx, id: &str) -> Out {
    ob_split(c, id, &ob::compute_i2(&c.params)?.third, "(32m^4-5m^3-29m^2+4m+4)/(m(m+1)(3m+2))", "(4m^4-29m^3+19m^2+8m-4)/(m(m+1)(3m+2))")
}

fn ob_h0_trace(c: &Ctx, id: &str) -> Out {
    let t = ob::compute_i2(&c.params)?.h0_trace;
    let got = format!("l2: {}; u2: {}", t.coeff(0, 1), t.coeff(2, 0));
    let want = format!("l2: {}; u2: {}", c.want("-2(11m^2-3m-6)/((m+1)(3m+2))"), c.want("2(16m^3+m^2-9m-2)/((m+1)(3m+2))"));
    one(CheckResult::exact(id, got, want))
}

fn ob_routes(c: &Ctx, id: &str) -> Out {
    let a = ob::compute_i1(&c.params)?;
    let b = ob::compute_i2(&c.params)?;
    one(CheckResult::holds(id, a.i11_direct == a.i11.total(&c.params) && b.i2_direct == b.i2, "integration by parts vs direct routes for the first and second integrals"))
}

fn ob_i1(c: &Ctx, id: &str) -> Out {
    one(CheckResult::exact(id, ob::compute_i1(&c.params)?.i1, c.at(&closed::i1())))
}

fn ob_i2(c: &Ctx, id: &str) -> Out {
    one(CheckResult::exact(id, ob::compute_i2(&c.params)?.i2, c.at(&closed::i2())))
}

fn ob_total(c: &Ctx, id: &str) -> Out {
    let rep = ob::total_obstruction(&c.params)?;
    let mut r = CheckResult::exact(id, &rep.total, c.at(&closed::total()));
    if !rep.routes_agree {
        r = CheckResult::holds(id, false, "routes disagree");
    }
    one(r)
}

fn ob_at_two(_: &Ctx, id: &str) -> Out {
    let p = GlobalParams::concrete(2)?;
    let got = format!("{}, {}, {}", ob::compute_i1(&p)?.i1, ob::compute_i2(&p)?.i2, ob::total_obstruction(&p)?.total);
    one(CheckResult::exact(id, got, "-66/35, 34/35, -32/35"))
}

fn ob_additivity(_: &Ctx, id: &str) -> Out {
    let t = closed::total();
    let mut bad = Vec::new();
    for m in 2..=50 {
        let p = GlobalParams::concrete(m)?;
        let sum = &ob::compute_i1(&p)?.i1 + &ob::compute_i2(&p)?.i2;
        if sum.as_constant() != Some(t.eval_int(m)?) {
            bad.push(m.to_string());
        }
    }
    one(CheckResult::holds(id, bad.is_empty(), format!("I1 + I2 = total for m = 2..50; failing [{}]", bad.join(","))))
}

fn ob_nonvanishing(_: &Ctx, id: &str) -> Out {
    let v = ob::verdict(&closed::total())?;
    one(CheckResult::holds(id, v.nonzero_for_all_m_ge_2 && v.negative_on_table, "no integer root m >= 2 and negative on m = 2..50"))
}

fn ob_derived(c: &Ctx, id: &str) -> Out {
    let d = ob::total_obstruction(&c.params)?.derived;
    one(CheckResult::holds(id, d.nonzero_for_all_m_ge_2, format!("rederived third potential gives total {}", d.total)))
}

fn ob_reduction(c: &Ctx, id: &str) -> Out {
    let r = ob::reduction_to_h0(&c.params)?;
    let ok = r.chain_is_4_m_minus_1 && r.cubic_vanishes && r.balanced_vanishing.iter().all(|x| x.1);
    one(CheckResult::holds(id, ok, format!("chain coefficient {}", r.chain_coefficient)))
}

fn ob_mc_i12(c: &Ctx, id: &str) -> Out {
    let seed = c.stream_seed(id);
    let (est, exact) = ob::mc_i12(c.mu(), c.samples, seed)?;
    one(CheckResult::mc(id, est.mean, est.se, exact, 3.0, seed))
}

// ---------------------------------------------------------------- second-order

fn so_landscape(_: &Ctx, id: &str) -> Out {
    let mut out = Vec::new();
    for n in 1..=7 {
        let v = ob::second_order_criterion(n)?;
        let ok = v.balanced_iff_unobstructed == Some(true) && v.closed_form_agrees == Some(true) && v.obstructed == (n % 2 == 0);
        let note = format!("{} slots, {} patterns, obstructed: {}", v.slots, v.patterns_checked.unwrap_or(0), v.obstructed);
        out.push(CheckResult::holds(format!("{id}.cp{n}"), ok, note));
    }
    Ok(out)
}

fn so_dichotomy(c: &Ctx, id: &str) -> Out {
    let ms: Vec<i64> = c.m.map_or_else(|| (2..=4).collect(), |m| vec![m]);
    let mut ok = true;
    for m in &ms {
        let even = ob::second_order_criterion(2 * *m as usize)?;
        let odd = ob::second_order_criterion(2 * *m as usize - 1)?;
        ok &= even.obstructed && !odd.obstructed && odd.candidate.is_some();
    }
    let ms: Vec<String> = ms.iter().map(i64::to_string).collect();
    one(CheckResult::holds(id, ok, format!("CP^(2m) obstructed, CP^(2m-1) balanced survives, m = {}", ms.join(","))))
}

// ---------------------------------------------------------------- product

fn pc(c: &Ctx) -> Result<ProductConfig, pr::ProductError> {
    ProductConfig::new(c.m, c.n2)
}

fn pr_traces(c: &Ctx, id: &str) -> Out {
    let t = pr::cross_phi2_product(&pc(c)?)?;
    one(CheckResult::holds(id, t.scalar_consistent && t.potential_consistent && t.tensor_consistent, "scalar, potential and tensor routes agree"))
}

fn pr_triples(c: &Ctx, id: &str) -> Out {
    let cfg = pc(c)?;
    let oc = pr::obstruction_coefficients(&cfg)?;
    let (g, g1) = pr::expected_triples(&cfg);
    let got = format!("{:?} | {:?}", oc.g_trace.record(), oc.g1_trace.record());
    one(CheckResult::exact(id, got, format!("{:?} | {:?}", g.record(), g1.record())))
}

fn pr_roots(c: &Ctx, id: &str) -> Out {
    let ri = pr::root_identity_check(&pc(c)?)?;
    one(CheckResult::holds(id, ri.identities_ok() && ri.float_residual < 1e-12, format!("lambda = {}, float residual {:.1e}", ri.lambda, ri.float_residual)))
}

fn pr_random(c: &Ctx, id: &str) -> Out {
    let mut rng = c.rng(id);
    let mut bad = Vec::new();
    for _ in 0..20 {
        let (m, n2) = (rng.gen_range(1..=12), rng.gen_range(1..=40));
        let cfg = ProductConfig::new(Some(m), n2)?;
        let ri = pr::root_identity_check(&cfg)?;
        let cl = pr::conclusion(&cfg)?;
        if !(ri.identities_ok() && ri.float_residual < 1e-12 && cl.u_zero && cl.v_zero) {
            bad.push(format!("({m},{n2})"));
        }
    }
    one(CheckResult::holds(id, bad.is_empty(), format!("20 random (m, n2), stream seed {}; failing [{}]", c.stream_seed(id), bad.join(","))))
}

fn pr_conclusion(c: &Ctx, id: &str) -> Out {
    let cl = pr::conclusion(&pc(c)?)?;
    let ok = cl.identities_hold && cl.factor_obstructed && cl.determinant_nonzero && cl.u_zero && cl.v_zero;
    one(CheckResult::holds(id, ok, format!("determinant {}; factor: {}", cl.determinant, cl.factor_method)))
}

fn pr_commutation(c: &Ctx, id: &str) -> Out {
    let m = c.mu();
    let mut rng = c.rng(id);
    let cfg = FDConfig::with_step(1e-2);
    let du = |y: &[f64]| real_covector(&grad_u_at(&ChartPoint::from_real(m, y).expect("finite"), 1.0));
    let mut worst = 0.0_f64;
    for coeffs in [[0.0, 1.0, 0.0, 0.0, 0.0], [0.3, -0.2, 1.0, 0.5, -0.7]] {
        let h = |y: &[f64]| realize_f64(&coeffs, &ChartPoint::from_real(m, y).expect("finite"), 1.0).to_real();
        let res = pr::einstein_commutation_check(&box_point(m, 0.6, &mut rng), &h, &du, &cfg)?;
        worst = worst.max(res.max());
    }
    one(CheckResult::fd(id, worst, 1e-4, "trace, divergence and δ* commute with L up to the Einstein shifts; nested step 1e-2"))
}

// ---------------------------------------------------------------- registry

macro_rules! check {
    ($id:literal, $kind:ident, $concrete:expr, $f:expr) => {
        Check { id: $id, kind: Kind::$kind, concrete_only: $concrete, run: $f }
    };
}

fn registry(suite: &str) -> Option<Vec<Check>> {
    let checks = match suite {
        "exact" => vec![
            check!("exact.f-tt-at-two", Exact, false, exact_f_tt_at_two),
            check!("exact.f-tt-coefficient", Exact, false, exact_f_tt),
            check!("exact.l-inverse-closed", Exact, false, exact_l_inverse_closed),
            check!("exact.rhs-routes", Exact, false, exact_rhs_routes),
            check!("exact.string-roundtrip", Exact, false, exact_roundtrip),
        ],
        "eigen-identities" => vec![
            check!("eigen-identities.by-parts", Exact, false, eig_by_parts),
            check!("eigen-identities.grad-norm", Exact, false, eig_grad_norm),
            check!("eigen-identities.laplacian-u", Exact, false, eig_laplacian_u),
            check!("eigen-identities.laplacian-u2", Exact, false, eig_laplacian_u2),
            check!("eigen-identities.mc-by-parts", Mc, true, eig_mc_parts),
            check!("eigen-identities.mc-grad-norm", Mc, true, eig_mc_grad),
        ],
        "moments" => vec![
            check!("moments.mc-u2", Mc, true, mom_mc_u2),
            check!("moments.mc-u4", Mc, true, mom_mc_u4),
            check!("moments.odd-vanish", Exact, false, mom_odd),
            check!("moments.u2-recurrence", Exact, false, mom_u2),
            check!("moments.u2-sphere", Exact, false, mom_u2_sphere),
            check!("moments.u4-recurrence", Exact, false, mom_u4),
            check!("moments.u4-sphere", Exact, false, mom_u4_sphere),
        ],
        "geometry" => vec![
            check!("geometry.christoffel-closed", Fd, true, geo_christoffel_closed),
            check!("geometry.christoffel-fd", Fd, true, geo_christoffel_fd),
            check!("geometry.curvature-closed", Fd, true, geo_curvature),
            check!("geometry.einstein", Fd, true, geo_einstein),
        ],
        "eigenfunction" => vec![
            check!("eigenfunction.balanced-blocks", Fd, true, ef_balanced_blocks),
            check!("eigenfunction.eigenvalue", Fd, true, ef_eigenvalue),
            check!("eigenfunction.grad-fd", Fd, true, ef_grad_fd),
            check!("eigenfunction.grad-norm", Fd, true, ef_grad_norm),
            check!("eigenfunction.hess-fd", Fd, true, ef_hess_fd),
            check!("eigenfunction.xi-forms", Fd, true, ef_xi),
        ],
        "l-matrix-fd" => vec![
            check!("l-matrix-fd", Fd, true, lm_fit),
            check!("l-matrix-fd.inverse-identity", Exact, false, lm_inverse),
        ],
        "deformation" => vec![
            check!("deformation.divergence-free", Exact, false, def_divergence),
            check!("deformation.fd-divergence", Fd, true, def_fd_divergence),
            check!("deformation.fd-kernel", Fd, true, def_kernel),
            check!("deformation.h0", Exact, false, def_h0),
            check!("deformation.h0-closed", Exact, false, def_h0_closed),
            check!("deformation.mc-self-adjoint", Mc, true, def_mc_self_adjoint),
            check!("deformation.round-trip", Exact, false, def_round_trip),
            check!("deformation.self-adjoint", Exact, false, def_self_adjoint),
        ],
        "variational" => vec![
            check!("variational.fd-ricci-order-1", Fd, true, var_fd_1),
            check!("variational.fd-ricci-order-2", Fd, true, var_fd_2),
            check!("variational.phi-prime-symmetric", Exact, false, var_symmetric),
            check!("variational.phi-tt-rederived", Exact, false, var_phi_tt),
            check!("variational.phi-ttt-tensor", Exact, false, var_phi_ttt),
            check!("variational.second-order-rhs", Exact, false, var_rhs),
            check!("variational.trace-consistency", Exact, false, var_trace),
        ],
        "obstruction" => vec![
            check!("obstruction.additivity", Exact, false, ob_additivity),
            check!("obstruction.at-two", Exact, false, ob_at_two),
            check!("obstruction.derived-route", Exact, false, ob_derived),
            check!("obstruction.h0-trace", Exact, false, ob_h0_trace),
            check!("obstruction.i1", Exact, false, ob_i1),
            check!("obstruction.i11-split", Exact, false, ob_i11),
            check!("obstruction.i12-split", Exact, false, ob_i12),
            check!("obstruction.i2", Exact, false, ob_i2),
            check!("obstruction.i2-third-split", Exact, false, ob_third),
            check!("obstruction.i21-split", Exact, false, ob_i21),
            check!("obstruction.mc-i12", Mc, true, ob_mc_i12),
            check!("obstruction.nonvanishing", Exact, false, ob_nonvanishing),
            check!("obstruction.reduction", Exact, false, ob_reduction),
            check!("obstruction.routes", Exact, false, ob_routes),
            check!("obstruction.total", Exact, false, ob_total),
        ],
        "second-order" => vec![
            check!("second-order.dichotomy", Exact, false, so_dichotomy),
            check!("second-order.landscape", Exact, false, so_landscape),
        ],
        "product" => vec![
            check!("product.coefficient-triples", Exact, false, pr_triples),
            check!("product.commutation-fd", Fd, true, pr_commutation),
            check!("product.conclusion", Exact, false, pr_conclusion),
            check!("product.random-configs", Exact, false, pr_random),
            check!("product.root-identities", Exact, false, pr_roots),
            check!("product.traces", Exact, false, pr_traces),
        ],
        _ => return None,
    };
    Some(checks)
}

fn context(p: &SuiteParams) -> Result<Ctx, HarnessError> {
    let params = match p.m {
        Some(m) if m < 2 => return Err(HarnessError::ExcludedM(m)),
        Some(m) => GlobalParams::concrete(m).map_err(|_| HarnessError::ExcludedM(m))?,
        None => GlobalParams::symbolic(),
    };
    if p.n2 < 1 {
        return Err(HarnessError::InvalidN2(p.n2));
    }
    if p.samples < 2 {
        return Err(HarnessError::TooFewSamples);
    }
    p.fd.validate()?;
    Ok(Ctx { m: p.m, params, n2: p.n2, samples: p.samples, seed: p.seed, fd: p.fd })
}

/// Runs the named suites (`"all"` for every one); results sorted by id.
pub fn run_suites(ids: &[&str], p: &SuiteParams) -> Result<Vec<CheckResult>, HarnessError> {
    let ctx = context(p)?;
    let ids: Vec<&str> = if ids == ["all"] { SUITES.to_vec() } else { ids.to_vec() };
    let mut checks = Vec::new();
    for id in ids {
        checks.extend(registry(id).ok_or_else(|| HarnessError::UnknownSuite(id.to_string()))?);
    }
    checks.retain(|c| !(c.concrete_only && ctx.m.is_none()));
    let mut results: Vec<CheckResult> = checks
        .par_iter()
        .flat_map_iter(|c| match (c.run)(&ctx, c.id) {
            Ok(r) => r,
            Err(e) => vec![CheckResult::errored(c.id, c.kind, e)],
        })
        .collect();
    results.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(results)
}

pub fn run_suite(id: &str, p: &SuiteParams) -> Result<Vec<CheckResult>, HarnessError> {
    run_suites(&[id], p)
}

fn quad(q: &pr::QuadForm) -> String {
    format!("({})u^2 + ({})v^2 + ({})uv", q.u2, q.v2, q.uv)
}

/// Named closed forms at the run's `m` (symbolic when `m = None`).
pub fn closed_forms(m: Option<i64>, n2: i64) -> Result<BTreeMap<String, String>, Box<dyn Error + Send + Sync>> {
    let params = match m {
        Some(m) => GlobalParams::concrete(m)?,
        None => GlobalParams::symbolic(),
    };
    let at = |f: RatFn| -> Result<String, Box<dyn Error + Send + Sync>> {
        Ok(match m {
            Some(m) => RatFn::constant(f.eval_int(m)?).to_string(),
            None => f.to_string(),
        })
    };
    let mut out = BTreeMap::new();
    let h0 = db::solve_h0(&params)?.to_strings();
    out.insert("h0".to_string(), joined(&h0));
    out.insert("f_tt".to_string(), db::f_tt(&params)?.to_string());
    out.insert("i1".to_string(), at(closed::i1())?);
    out.insert("i2".to_string(), at(closed::i2())?);
    out.insert("total".to_string(), at(closed::total())?);
    let po = pr::product_obstruction(&ProductConfig::new(m, n2)?)?;
    out.insert("psi1".to_string(), quad(&po.psi1));
    out.insert("psi2".to_string(), quad(&po.psi2));
    Ok(out)
}
