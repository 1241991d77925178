//! Second-order obstruction on ℂP^{2m} × M₂ with `M₂` Einstein (constant ½)
//! and the spectral condition on `M₂` assumed.
//!
//! Deformations are `h = ug + vg₁` with `u, v` first eigenfunctions on the
//! ℂP factor. `M₂` is never realized: all integrals are formal averages
//! `⨍abw` over the first factor.

pub mod commutation;

use serde::Serialize;

use crate::exact::{QuadExt, RatFn};
use crate::obstruction::second_order_criterion;
use crate::variational::expr::{cst, Atom, Dims, Func, Scalar, TensorExpr};
use crate::variational::formulas::{self, conformal_variation, impose_eigen, substitute_scalar, substitute_tensor, Quantity};
use crate::variational::reduce::{cross_average, CrossAverage};
use crate::variational::VariationError;

pub use commutation::{einstein_commutation_check, CommutationResiduals};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProductError {
    #[error("invalid product configuration: {0}")]
    InvalidConfig(String),
    #[error("λ = n₂/(4(2m−1)) vanishes (n₂ = 0); the root identities need λ ≠ 0")]
    ZeroLambda,
    #[error(transparent)]
    Variation(#[from] VariationError),
    #[error(transparent)]
    Exact(#[from] crate::exact::ExactError),
    #[error(transparent)]
    Obstruction(#[from] crate::obstruction::ObstructionError),
}

/// ℂP^{2m} × M₂ with `dim M₂ = n₂`. `m = None` keeps `m` symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProductConfig {
    pub m: Option<i64>,
    pub n2: i64,
    pub dagger_assumed: bool,
}

impl ProductConfig {
    pub fn new(m: Option<i64>, n2: i64) -> Result<Self, ProductError> {
        if matches!(m, Some(k) if k < 1) {
            return Err(ProductError::InvalidConfig(format!("m = {} (need m ≥ 1)", m.unwrap_or_default())));
        }
        if n2 < 0 {
            return Err(ProductError::InvalidConfig(format!("n₂ = {n2}")));
        }
        Ok(ProductConfig { m, n2, dagger_assumed: true })
    }

    pub fn m(&self) -> RatFn {
        self.m.map_or_else(RatFn::m, RatFn::int)
    }

    /// `n₁ = 4m`.
    pub fn n1(&self) -> RatFn {
        self.m() * 4
    }

    pub fn n(&self) -> RatFn {
        self.n1() + self.n2
    }

    pub fn dims(&self) -> Dims {
        Dims::product(self.n1(), RatFn::int(self.n2))
    }

    /// `λ = (n − 4m)/(4(2m−1))`.
    pub fn lambda(&self) -> RatFn {
        RatFn::int(self.n2) / ((self.m() * 2 - 1) * 4)
    }
}

fn half() -> RatFn {
    RatFn::ratio(1, 2)
}

fn uv() -> Scalar {
    &Scalar::val(Func::U) * &Scalar::val(Func::V)
}

fn grad_uv() -> Scalar {
    Scalar::grad(Func::U, Func::V)
}

fn t(a: Atom, c: Scalar) -> TensorExpr {
    TensorExpr::term(a, c)
}

fn to_first_factor(e: &TensorExpr) -> TensorExpr {
    e.terms().fold(TensorExpr::zero(), |acc, (a, c)| {
        let a = if *a == Atom::Metric { Atom::Metric1 } else { *a };
        &acc + &t(a, c.clone())
    })
}

/// `u ↦ v`, `ψ ↦ u`: a conformal variation of the first factor along `vg₁`, acting on `u`.
fn along_v(f: Func) -> Func {
    match f {
        Func::U => Func::V,
        Func::Psi => Func::U,
        other => other,
    }
}

/// `du⊗dv + dv⊗du`.
fn sym_uv() -> TensorExpr {
    t(Atom::sym2(Func::U, Func::V), Scalar::int(2))
}

/// Displayed `Rc_st` along `(1 + tu)g + svg₁`.
pub fn ricci_st_product(n: &RatFn, n1: &RatFn) -> TensorExpr {
    let k = |c: RatFn| cst(&c);
    let parts = [
        sym_uv().scale_rat(&((n + n1 * 2 - 6) * RatFn::ratio(1, 4))),
        t(Atom::Metric1, &grad_uv() * &k((-n + 6) * RatFn::ratio(1, 4))),
        t(Atom::Metric, &grad_uv() * &k(-(n1 - 2) * RatFn::ratio(1, 4))),
        t(Atom::Metric, uv().scale(&-half())),
        t(Atom::Metric1, uv().scale(&-half())),
        t(Atom::Hess(Func::V), Scalar::val(Func::U).scale(&((n1 - 2) * half()))),
        t(Atom::Hess(Func::U), Scalar::val(Func::V).scale(&((n1 - 2) * half()))),
    ];
    parts.iter().fold(TensorExpr::zero(), |a, p| &a + p)
}

/// Displayed `R_st`.
pub fn scalar_st_product(n: &RatFn, n1: &RatFn) -> Scalar {
    &uv().scale(&(-n - n1 * 2 + 4)) + &grad_uv().scale(&((n1 * 5 + n * 2 - 6 - n * n1) * half()))
}

/// Displayed `Φ_st` with `(Δ + ½)f_st = (n₁/2)uv − (3n₁−2)/4·⟨∇u,∇v⟩`.
pub fn phi_st_product(n1: &RatFn) -> formulas::Formula {
    let parts = [
        t(Atom::Hess(Func::Fst), Scalar::int(-1)),
        sym_uv().scale_rat(&(-(n1 - 2) * RatFn::ratio(1, 4))),
        t(Atom::Metric1, -&grad_uv()),
        t(Atom::Metric, uv().scale(&half())),
        t(Atom::Metric1, uv().scale(&half())),
        t(Atom::Hess(Func::V), Scalar::val(Func::U).scale(&(-(n1 - 2) * half()))),
        t(Atom::Hess(Func::U), Scalar::val(Func::V).scale(&(-(n1 - 2) * half()))),
    ];
    formulas::Formula {
        tensor: parts.iter().fold(TensorExpr::zero(), |a, p| &a + p),
        aux: Func::Fst,
        aux_rhs: &uv().scale(&(n1 * half())) - &grad_uv().scale(&((n1 * 3 - 2) * RatFn::ratio(1, 4))),
    }
}

/// Traces of the cross variation and the consistency of its ingredients.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductTraces {
    /// `⟨Φ_st, g⟩` with `Δu = −u`, `Δv = −v`.
    pub g_trace: Scalar,
    /// `⟨Φ_st, g₁⟩`.
    pub g1_trace: Scalar,
    pub f_st_rhs: Scalar,
    /// `R_st` recomputed as `tr Rc_st − ⟨h_t, Rc_s⟩ − ⟨h_s, Rc_t⟩ + tr(h_s h_t)`.
    pub scalar_consistent: bool,
    /// `f_st` equation recomputed from the differentiated Euler–Lagrange equation.
    pub potential_consistent: bool,
    /// `Φ_st = −Rc_st − ∇²f_st − ∇²_t f_s − ∇²_s f_t` reproduces the displayed tensor.
    pub tensor_consistent: bool,
}

impl ProductTraces {
    pub fn uv_coefficient(s: &Scalar) -> RatFn {
        s.coeff(&[crate::variational::Sym::Val(Func::U), crate::variational::Sym::Val(Func::V)])
    }

    pub fn grad_coefficient(s: &Scalar) -> RatFn {
        s.coeff(&[crate::variational::Sym::grad(Func::U, Func::V)])
    }
}

pub fn cross_phi2_product(config: &ProductConfig) -> Result<ProductTraces, ProductError> {
    let (n, n1) = (config.n(), config.n1());
    let dims = config.dims();
    let eig = [Func::U, Func::V];
    let phi = phi_st_product(&n1);
    let g_trace = impose_eigen(&phi.tensor.trace(&dims)?, &eig);
    let g1_trace = impose_eigen(&phi.tensor.pair_first_factor(&dims)?, &eig);

    // scalar curvature from the Ricci variation
    let rc = ricci_st_product(&n, &n1);
    let rc_t = conformal_variation(Quantity::Ricci, 1, &n)?.tensor().expect("tensor");
    let rc_s = to_first_factor(&conformal_variation(Quantity::Ricci, 1, &n1)?.tensor().expect("tensor").rename(&|f| if f == Func::U { Func::V } else { f }));
    let r_st = [
        rc.trace(&dims)?,
        -&(&Scalar::val(Func::U) * &rc_s.trace(&dims)?),
        -&(&Scalar::val(Func::V) * &rc_t.pair_first_factor(&dims)?),
        uv().scale(&n1),
    ]
    .iter()
    .fold(Scalar::zero(), |a, p| &a + p);
    let scalar_consistent = impose_eigen(&r_st, &eig) == impose_eigen(&scalar_st_product(&n, &n1), &eig);

    // potential: 2Δf_st + 2Δ_t f_s + 2Δ_s f_t − 2⟨∇f_s,∇f_t⟩ + R_st + f_st = 0
    let ks = (&n1 - 2) * half();
    let kt = (&n - 2) * half();
    let lap_t = conformal_variation(Quantity::LaplacianPsi, 1, &n)?.scalar().expect("scalar");
    let lap_s = conformal_variation(Quantity::LaplacianPsi, 1, &n1)?.scalar().expect("scalar").rename(&along_v);
    let terms = [
        substitute_scalar(&lap_t, Func::Psi, Func::V, &cst(&ks)).scale(&RatFn::int(2)),
        lap_s.scale(&(&kt * 2)),
        grad_uv().scale(&(&ks * &kt * -2)),
        scalar_st_product(&n, &n1),
    ];
    let rest = terms.iter().fold(Scalar::zero(), |a, p| &a + p);
    let rhs = impose_eigen(&rest, &eig).scale(&-half());
    let potential_consistent = rhs == impose_eigen(&phi.aux_rhs, &eig);

    // tensor: ∇²_t f_s + ∇²_s f_t from the Christoffel variations
    let hess_t = conformal_variation(Quantity::HessianPsi, 1, &n)?.tensor().expect("tensor");
    let hess_ts = substitute_tensor(&hess_t, Func::Psi, Func::V, &cst(&ks));
    let hess_st = to_first_factor(&hess_t.rename(&along_v)).scale_rat(&kt);
    let derived = [rc.scale_rat(&RatFn::int(-1)), t(Atom::Hess(Func::Fst), Scalar::int(-1)), hess_ts.scale_rat(&RatFn::int(-1)), hess_st.scale_rat(&RatFn::int(-1))]
        .iter()
        .fold(TensorExpr::zero(), |a, p| &a + p);
    let tensor_consistent = derived == phi.tensor;

    Ok(ProductTraces { g_trace, g1_trace, f_st_rhs: phi.aux_rhs, scalar_consistent, potential_consistent, tensor_consistent })
}

/// Coefficients of `⨍u²w`, `⨍v²w`, `⨍uvw`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub u2: RatFn,
    pub v2: RatFn,
    pub uv: RatFn,
}

impl Triple {
    fn from_parts(parts: &[CrossAverage; 3]) -> Result<Triple, ProductError> {
        let sum = |a: Func, b: Func| parts.iter().fold(RatFn::zero(), |acc, p| &acc + &p.coeff(a, b, Func::W));
        for (k, p) in parts.iter().enumerate() {
            if p.terms().count() > 1 {
                return Err(ProductError::InvalidConfig(format!("part {} mixes monomials", k + 1)));
            }
        }
        Ok(Triple { u2: sum(Func::U, Func::U), v2: sum(Func::V, Func::V), uv: sum(Func::U, Func::V) })
    }

    pub fn record(&self) -> [String; 3] {
        [self.u2.to_string(), self.v2.to_string(), self.uv.to_string()]
    }
}

/// `⨍⟨Φ⁽²⁾(h,h), wg⟩` and `⨍⟨Φ⁽²⁾(h,h), wg₁⟩` for `h = ug + vg₁`, each split
/// into the `uu`, `vv` and `2·uv` parts.
#[derive(Clone, Debug, PartialEq)]
pub struct ObstructionCoefficients {
    pub g_parts: [CrossAverage; 3],
    pub g1_parts: [CrossAverage; 3],
    pub g_trace: Triple,
    pub g1_trace: Triple,
}

pub fn obstruction_coefficients(config: &ProductConfig) -> Result<ObstructionCoefficients, ProductError> {
    let (n, n1) = (config.n(), config.n1());
    let dims = config.dims();
    let eigen = [Func::U, Func::V, Func::W];
    let avg = |s: &Scalar, aux: &[(Func, Scalar)]| cross_average(&impose_eigen(s, &eigen), Func::W, &eigen, aux);
    // uu: the conformal formula of the whole product
    let tt = formulas::phi_tt(&n);
    let aux_u = [(Func::Ftt, tt.aux_rhs.clone())];
    // vv: the conformal formula of the first factor, tangent to it
    let to_v = |f: Func| if f == Func::U { Func::V } else { f };
    let tt1 = formulas::phi_tt(&n1);
    let tensor_v = tt1.tensor.rename(&to_v);
    let aux_v = [(Func::Ftt, tt1.aux_rhs.rename(&to_v))];
    let single = Dims::single(n1.clone());
    let st = phi_st_product(&n1);
    let aux_st = [(Func::Fst, st.aux_rhs.clone())];
    let two = RatFn::int(2);
    let scale2 = |c: CrossAverage| -> Result<CrossAverage, ProductError> { Ok(c.scaled(&two)) };
    let g_parts = [
        avg(&tt.tensor.trace(&dims)?, &aux_u)?,
        avg(&tensor_v.trace(&single)?, &aux_v)?,
        scale2(avg(&st.tensor.trace(&dims)?, &aux_st)?)?,
    ];
    let g1_parts = [
        avg(&tt.tensor.pair_first_factor(&dims)?, &aux_u)?,
        avg(&tensor_v.trace(&single)?, &aux_v)?,
        scale2(avg(&st.tensor.pair_first_factor(&dims)?, &aux_st)?)?,
    ];
    let g_trace = Triple::from_parts(&g_parts)?;
    let g1_trace = Triple::from_parts(&g1_parts)?;
    Ok(ObstructionCoefficients { g_parts, g1_parts, g_trace, g1_trace })
}

/// Closed forms of the two coefficient triples.
pub fn expected_triples(config: &ProductConfig) -> (Triple, Triple) {
    let (m, n) = (config.m(), config.n());
    let k = &m * 2 - 1;
    let g = Triple { u2: &n - 2, v2: &k * 2, uv: &n + &(&m * 4) - 4 };
    let g1 = Triple { u2: (&(&m * 4) + &n - 4) * half(), v2: &k * 2, uv: &k * 4 };
    (g, g1)
}

/// `ψ(u,v) = a u² + v² + b uv` after dividing a triple by its `v²` coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadForm {
    pub u2: RatFn,
    pub v2: RatFn,
    pub uv: RatFn,
}

impl QuadForm {
    fn normalized(t: &Triple) -> Result<QuadForm, ProductError> {
        let inv = t.v2.inv()?;
        Ok(QuadForm { u2: &t.u2 * &inv, v2: RatFn::one(), uv: &t.uv * &inv })
    }

    fn lift(&self, d: &RatFn) -> [QuadExt; 3] {
        [QuadExt::from_base(self.u2.clone(), d), QuadExt::from_base(self.v2.clone(), d), QuadExt::from_base(self.uv.clone(), d)]
    }
}

/// The two quadratic forms, `λ`, and the roots `x, y` of `z² − z − λ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductObstruction {
    pub psi1: QuadForm,
    pub psi2: QuadForm,
    pub lam: RatFn,
    pub x: QuadExt,
    pub y: QuadExt,
    pub coefficients: ObstructionCoefficients,
}

pub fn product_obstruction(config: &ProductConfig) -> Result<ProductObstruction, ProductError> {
    let coefficients = obstruction_coefficients(config)?;
    let psi1 = QuadForm::normalized(&coefficients.g_trace)?;
    let psi2 = QuadForm::normalized(&coefficients.g1_trace)?;
    let lam = config.lambda();
    let d = &lam * 4 + 1;
    let s = QuadExt::sqrt_of(&d);
    let one = QuadExt::from_base(RatFn::one(), &d);
    let x = (&one + &s).scale(&half());
    let y = (&one - &s).scale(&half());
    Ok(ProductObstruction { psi1, psi2, lam, x, y, coefficients })
}

fn quad_string(q: &QuadExt) -> String {
    format!("({}) + ({})·sqrt({})", q.a, q.b, q.radicand())
}

/// Result of the square-completion identities and the conclusion `u = v = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootIdentity {
    pub lambda: String,
    pub x: String,
    pub y: String,
    /// `x + y = 1` and `xy = −λ`.
    pub vieta: bool,
    /// `(xu+v)² = −(y/λ)ψ₁ + (1+y/λ)ψ₂` exactly.
    pub identity_x: bool,
    /// `(yu+v)² = −(x/λ)ψ₁ + (1+x/λ)ψ₂` exactly.
    pub identity_y: bool,
    /// Largest coefficient residual of both identities in floating point.
    pub float_residual: f64,
    pub psi1: [String; 3],
    pub psi2: [String; 3],
}

/// `a·ψ₁ + b·ψ₂ − (cu + v)²` as `(u², v², uv)` coefficients.
fn completion_defect(p1: &[QuadExt; 3], p2: &[QuadExt; 3], a: &QuadExt, b: &QuadExt, c: &QuadExt) -> [QuadExt; 3] {
    let d = c.radicand().clone();
    let one = QuadExt::from_base(RatFn::one(), &d);
    let two = QuadExt::from_base(RatFn::int(2), &d);
    let square = [c * c, one, &two * c];
    std::array::from_fn(|i| &(&(a * &p1[i]) + &(b * &p2[i])) - &square[i])
}

pub fn root_identity_check(config: &ProductConfig) -> Result<RootIdentity, ProductError> {
    let po = product_obstruction(config)?;
    if po.lam.is_zero() {
        return Err(ProductError::ZeroLambda);
    }
    let d = po.x.radicand().clone();
    let lift = |r: &RatFn| QuadExt::from_base(r.clone(), &d);
    let one = lift(&RatFn::one());
    let inv_lam = lift(&po.lam.inv()?);
    let vieta = &po.x + &po.y == one && &po.x * &po.y == lift(&-&po.lam);
    let (p1, p2) = (po.psi1.lift(&d), po.psi2.lift(&d));
    let dx = completion_defect(&p1, &p2, &-&(&po.y * &inv_lam), &(&one + &(&po.y * &inv_lam)), &po.x);
    let dy = completion_defect(&p1, &p2, &-&(&po.x * &inv_lam), &(&one + &(&po.x * &inv_lam)), &po.y);
    let identity_x = dx.iter().all(QuadExt::is_zero);
    let identity_y = dy.iter().all(QuadExt::is_zero);
    let float_residual = float_check(config, &po);
    Ok(RootIdentity {
        lambda: po.lam.to_string(),
        x: quad_string(&po.x),
        y: quad_string(&po.y),
        vieta,
        identity_x,
        identity_y,
        float_residual,
        psi1: [po.psi1.u2.to_string(), po.psi1.v2.to_string(), po.psi1.uv.to_string()],
        psi2: [po.psi2.u2.to_string(), po.psi2.v2.to_string(), po.psi2.uv.to_string()],
    })
}

/// Same identities with `√(1+4λ)` in floating point, at the configured `m`
/// (or `m = 1..=5` when symbolic).
fn float_check(config: &ProductConfig, po: &ProductObstruction) -> f64 {
    let ms: Vec<f64> = match config.m {
        Some(m) => vec![m as f64],
        None => (1..=5).map(f64::from).collect(),
    };
    let mut worst: f64 = 0.0;
    for m in ms {
        let lam = po.lam.eval_f64(m);
        let s = (1.0 + 4.0 * lam).sqrt();
        let (x, y) = ((1.0 + s) / 2.0, (1.0 - s) / 2.0);
        let p1 = [po.psi1.u2.eval_f64(m), 1.0, po.psi1.uv.eval_f64(m)];
        let p2 = [po.psi2.u2.eval_f64(m), 1.0, po.psi2.uv.eval_f64(m)];
        for (c, other) in [(x, y), (y, x)] {
            let (a, b) = (-other / lam, 1.0 + other / lam);
            let sq = [c * c, 1.0, 2.0 * c];
            for i in 0..3 {
                worst = worst.max((a * p1[i] + b * p2[i] - sq[i]).abs());
            }
        }
    }
    worst
}

/// The chain from `⨍ψ₁w = ⨍ψ₂w = 0` to `u = v = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conclusion {
    pub identities_hold: bool,
    /// Every nonzero first eigenfunction of ℂP^{2m} is obstructed at second
    /// order, so `⨍f²w = 0` for all `w` forces `f = 0`.
    pub factor_obstructed: bool,
    pub factor_method: String,
    /// `det [[x, 1], [y, 1]] = x − y`.
    pub determinant: String,
    pub determinant_nonzero: bool,
    pub u_zero: bool,
    pub v_zero: bool,
}

pub fn conclusion(config: &ProductConfig) -> Result<Conclusion, ProductError> {
    let ri = root_identity_check(config)?;
    let po = product_obstruction(config)?;
    let (factor_obstructed, factor_method) = match config.m {
        Some(m) if 2 * m + 1 <= crate::obstruction::criterion::MAX_EXHAUSTIVE_SLOTS as i64 => {
            let v = second_order_criterion(2 * m as usize)?;
            (v.obstructed && v.balanced_iff_unobstructed == Some(true), format!("exhaustive search on {} slots", 2 * m + 1))
        }
        _ => (true, "odd slot count 2m+1 admits no traceless u with all |u_k| equal".to_string()),
    };
    let det = &po.x - &po.y;
    let determinant_nonzero = !det.norm().is_zero();
    let ok = ri.identities_ok() && factor_obstructed && determinant_nonzero;
    Ok(Conclusion {
        identities_hold: ri.identities_ok(),
        factor_obstructed,
        factor_method,
        determinant: quad_string(&det),
        determinant_nonzero,
        u_zero: ok,
        v_zero: ok,
    })
}

impl RootIdentity {
    pub fn identities_ok(&self) -> bool {
        self.vieta && self.identity_x && self.identity_y
    }
}
