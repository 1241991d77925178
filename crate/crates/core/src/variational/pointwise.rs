//! Pointwise evaluation of variational expressions on the Fubini–Study chart,
//! with finite differences wherever a derivative of `h` is needed, and
//! finite-difference checks of the conformal curvature variations.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use super::expr::{Atom, Func, Scalar, Sym, TensorExpr};
use super::formulas::{conformal_variation, Quantity, Variation};
use super::VariationError;
use crate::chart_geometry::fd::{fd_covariant_oneform, fd_divergence, fd_jet, fd_rough_laplacian};
use crate::chart_geometry::{ChartPoint, ConformalU, FubiniStudy, LocalGeometry};
use crate::deformation_basis::numeric::realize;
use crate::deformation_basis::{self as db, BasisCoeffs};
use crate::eigenfunction::closed_form::{outer, real_covector};
use crate::eigenfunction::{grad_u_at, hess_u_at, u_at, EigenFn};
use crate::exact::RatFn;
use crate::numeric_harness::{FDConfig, StepError};
use crate::scalar_algebra::{GlobalParams, UPoly};

/// Value, real differential and real Hessian of a function at a point.
#[derive(Clone, Debug)]
pub struct PointFn {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: DMatrix<f64>,
}

fn chart(m: usize, y: &[f64]) -> ChartPoint {
    ChartPoint::from_real(m, y).expect("finite chart coordinates")
}

fn flat(t: &DMatrix<f64>) -> Vec<f64> {
    t.as_slice().to_vec()
}

/// Everything needed to evaluate expressions at one point.
pub struct PointEnv {
    pub point: ChartPoint,
    pub x: Vec<f64>,
    pub geom: LocalGeometry,
    pub lambda: f64,
    pub cfg: FDConfig,
    funcs: BTreeMap<Func, PointFn>,
    deform: Option<BasisCoeffs>,
}

impl PointEnv {
    /// Binds the distinguished `u`.
    pub fn new(point: &ChartPoint, lambda: f64, cfg: FDConfig) -> Self {
        let x = point.to_real();
        let geom = LocalGeometry::at(&FubiniStudy { m: point.m() }, &x);
        let u = PointFn {
            value: u_at(point, lambda),
            grad: real_covector(&grad_u_at(point, lambda)),
            hess: hess_u_at(point, lambda).to_real(),
        };
        let mut funcs = BTreeMap::new();
        funcs.insert(Func::U, u);
        PointEnv { point: point.clone(), x, geom, lambda, cfg, funcs, deform: None }
    }

    fn m(&self) -> usize {
        self.point.m()
    }

    pub fn bind_eigen(&mut self, f: Func, e: &EigenFn) {
        let p = &self.point;
        self.funcs.insert(f, PointFn { value: e.value(p), grad: real_covector(&e.grad(p)), hess: e.hess(p).to_real() });
    }

    /// Binds `F(u)`; `∇F = F′du`, `∇²F = F′∇²u + F″du⊗du`.
    pub fn bind_poly(&mut self, f: Func, poly: &UPoly) {
        let u = self.funcs[&Func::U].clone();
        let m = self.m() as f64;
        let ev = |q: &UPoly| q.eval_f64(u.value, self.lambda, m);
        let d1 = poly.derivative();
        let (f0, f1, f2) = (ev(poly), ev(&d1), ev(&d1.derivative()));
        let grad = u.grad.iter().map(|g| g * f1).collect();
        let hess = &u.hess * f1 + outer(&u.grad, &u.grad) * f2;
        self.funcs.insert(f, PointFn { value: f0, grad, hess });
    }

    /// Binds `h` and `H = Tr h` (a polynomial in `u` on `V`).
    pub fn bind_deform(&mut self, h: &BasisCoeffs) {
        let params = GlobalParams::concrete(self.m() as i64).expect("m ≥ 1");
        self.bind_poly(Func::H, &db::trace_of(&h.at(self.m() as i64).expect("finite at this m"), &params));
        self.deform = Some(h.clone());
    }

    pub fn func(&self, f: Func) -> Result<&PointFn, VariationError> {
        self.funcs.get(&f).ok_or_else(|| VariationError::UnknownFunction(f.name().to_string()))
    }

    fn pair(&self, a: &[f64], b: &[f64]) -> f64 {
        let gi = &self.geom.g_inv;
        let mut s = 0.0;
        for i in 0..a.len() {
            for j in 0..b.len() {
                s += gi[(i, j)] * a[i] * b[j];
            }
        }
        s
    }

    pub fn sym(&self, s: Sym) -> Result<f64, VariationError> {
        Ok(match s {
            Sym::Val(f) => self.func(f)?.value,
            Sym::Lap(f) => self.geom.trace(&self.func(f)?.hess),
            Sym::Grad(a, b) => self.pair(&self.func(a)?.grad, &self.func(b)?.grad),
            Sym::HessPair => self.geom.inner(&self.deform_value()?, &self.func(Func::U)?.hess),
            Sym::Curv => self.geom.trace(&self.geom.ricci()),
            Sym::MeanU3 => 0.0,
        })
    }

    pub fn scalar(&self, s: &Scalar) -> Result<f64, VariationError> {
        let m = self.m() as f64;
        let mut acc = 0.0;
        for (syms, c) in s.terms() {
            let mut t = c.eval_f64(m);
            for x in syms {
                t *= self.sym(*x)?;
            }
            acc += t;
        }
        Ok(acc)
    }

    fn deform_coeffs(&self) -> Result<&BasisCoeffs, VariationError> {
        self.deform.as_ref().ok_or_else(|| VariationError::UnknownFunction("h".into()))
    }

    fn deform_value(&self) -> Result<DMatrix<f64>, VariationError> {
        Ok(realize(self.deform_coeffs()?, &self.point, self.lambda).to_real())
    }

    /// `y ↦ u(y)·h(y)` as a real tensor field.
    fn u_times_h(&self) -> Result<impl Fn(&[f64]) -> DMatrix<f64>, VariationError> {
        let h = self.deform_coeffs()?.clone();
        let (m, lambda) = (self.m(), self.lambda);
        Ok(move |y: &[f64]| {
            let q = chart(m, y);
            realize(&h, &q, lambda).to_real() * u_at(&q, lambda)
        })
    }

    pub fn atom(&self, a: Atom) -> Result<DMatrix<f64>, VariationError> {
        let cfg = &self.cfg;
        Ok(match a {
            Atom::Metric => self.geom.g.clone(),
            Atom::Sym2(p, q) => {
                let (gp, gq) = (&self.func(p)?.grad, &self.func(q)?.grad);
                (outer(gp, gq) + outer(gq, gp)) * 0.5
            }
            Atom::Hess(f) => self.func(f)?.hess.clone(),
            Atom::Deform => self.deform_value()?,
            Atom::RmDeform => self.geom.rm(&self.deform_value()?),
            Atom::LapUDeform => fd_rough_laplacian(&self.u_times_h()?, &self.x, &self.geom, cfg)?,
            Atom::DeltaStarDeltaUDeform => fd_delta_star_delta(&self.u_times_h()?, &self.x, self.m(), cfg)?,
            Atom::ChristoffelDu => {
                let h = self.deform_coeffs()?.clone();
                let (m, lambda) = (self.m(), self.lambda);
                let field = move |y: &[f64]| realize(&h, &chart(m, y), lambda).to_real();
                christoffel_variation_du(&field, &self.x, &self.geom, &self.func(Func::U)?.grad, cfg)?
            }
            Atom::Metric1 | Atom::Metric2 => return Err(VariationError::UnsupportedAtom(a.to_string())),
        })
    }

    pub fn tensor(&self, e: &TensorExpr) -> Result<DMatrix<f64>, VariationError> {
        let d = self.geom.d;
        let mut out = DMatrix::zeros(d, d);
        for (a, c) in e.terms() {
            out += self.atom(*a)? * self.scalar(c)?;
        }
        Ok(out)
    }
}

/// `∇_c T_ab` from a first-order jet, indexed `[c][a + d·b]`.
fn covariant_two_tensor(
    field: &dyn Fn(&[f64]) -> DMatrix<f64>,
    x: &[f64],
    geom: &LocalGeometry,
    cfg: &FDConfig,
) -> Result<Vec<DMatrix<f64>>, StepError> {
    let d = geom.d;
    let f = |y: &[f64]| flat(&field(y));
    let jet = fd_jet(&f, x, cfg, false)?;
    let t = |a: usize, b: usize| jet.value[a + d * b];
    Ok((0..d)
        .map(|c| {
            DMatrix::from_fn(d, d, |a, b| {
                let mut v = jet.first[c][a + d * b];
                for k in 0..d {
                    v -= geom.gamma.get(k, c, a) * t(k, b) + geom.gamma.get(k, c, b) * t(a, k);
                }
                v
            })
        })
        .collect())
}

/// `C^k_ij u_k` with `C^k_ij = ½g^{kl}(∇_i h_jl + ∇_j h_il − ∇_l h_ij)`.
pub fn christoffel_variation_du(
    field: &dyn Fn(&[f64]) -> DMatrix<f64>,
    x: &[f64],
    geom: &LocalGeometry,
    du: &[f64],
    cfg: &FDConfig,
) -> Result<DMatrix<f64>, StepError> {
    let d = geom.d;
    let nabla = covariant_two_tensor(field, x, geom, cfg)?;
    let up: Vec<f64> = (0..d).map(|l| (0..d).map(|k| geom.g_inv[(l, k)] * du[k]).sum()).collect();
    Ok(DMatrix::from_fn(d, d, |i, j| {
        let mut s = 0.0;
        for l in 0..d {
            s += up[l] * (nabla[i][(j, l)] + nabla[j][(i, l)] - nabla[l][(i, j)]);
        }
        0.5 * s
    }))
}

/// `δ*δT` with `δ` the divergence and `δ*α = −½(∇α + ∇αᵀ)`, by nested differences.
pub fn fd_delta_star_delta(field: &dyn Fn(&[f64]) -> DMatrix<f64>, x: &[f64], m: usize, cfg: &FDConfig) -> Result<DMatrix<f64>, StepError> {
    let inner = FDConfig { step: cfg.step * 0.1, ..*cfg };
    inner.validate()?;
    let fs = FubiniStudy { m };
    let div = |y: &[f64]| {
        let g = LocalGeometry::at(&fs, y);
        fd_divergence(field, y, &g, &inner).expect("validated step")
    };
    let geom = LocalGeometry::at(&fs, x);
    let nabla = fd_covariant_oneform(&div, x, &geom, cfg)?;
    Ok((&nabla + nabla.transpose()) * -0.5)
}

/// `Φ′(h) = ½(Lh + 2δ*δh + ∇²X)` at a point for `h ∈ V`, with `L` and `δ*δ`
/// by finite differences and `X` from the exact Helmholtz solve.
pub fn fd_phi_prime(h: &BasisCoeffs, p: &ChartPoint, lambda: f64, cfg: &FDConfig) -> Result<DMatrix<f64>, VariationError> {
    let m = p.m();
    let params = GlobalParams::concrete(m as i64)?;
    let hm = h.at(m as i64)?;
    let field = |y: &[f64]| realize(&hm, &chart(m, y), lambda).to_real();
    let x = p.to_real();
    let geom = LocalGeometry::at(&FubiniStudy { m }, &x);
    let lh = db::numeric::fd_l_apply(&field, &x, &geom, cfg)?;
    let ddh = fd_delta_star_delta(&field, &x, m, cfg)?;
    let div_udu = &params.grad_u_sq() - &UPoly::u().pow(2);
    let xs = UPoly::solve_helmholtz(&RatFn::ratio(1, 2), &div_udu.scale(&db::divergence_of(&hm, &params)), &params)?;
    let mut env = PointEnv::new(p, lambda, *cfg);
    env.bind_poly(Func::W, &xs);
    let hx = env.func(Func::W)?.hess.clone();
    Ok((lh + ddh * 2.0 + hx) * 0.5)
}

/// Finite-difference check of one conformal curvature variation at one point.
#[derive(Clone, Debug, Serialize)]
pub struct FdVariationReport {
    pub quantity: &'static str,
    pub order: u32,
    pub step: f64,
    pub max_abs_error: f64,
    /// Largest entry of the predicted value, for scale.
    pub magnitude: f64,
}

/// Compares `Rc` or `R` of `(1 + tu)g` against the stored variation.
///
/// Orders 1 and 2 use the five-point stencils (the Richardson combination
/// of the three-point ones, error `O(h⁴)`); order 3 uses the four-point
/// stencil with error `O(h²)`.
pub fn fd_validate_variation(q: Quantity, order: u32, p: &ChartPoint, step: f64, lambda: f64) -> Result<FdVariationReport, VariationError> {
    FDConfig::with_step(step).validate()?;
    if !matches!(q, Quantity::Ricci | Quantity::ScalarCurvature) {
        return Err(VariationError::UnsupportedOrder { quantity: q.name(), order });
    }
    let m = p.m();
    let x = p.to_real();
    let base = FubiniStudy { m };
    let sample = |t: f64| {
        let geom = LocalGeometry::at(&ConformalU { base, t, lambda }, &x);
        let rc = geom.ricci();
        match q {
            Quantity::ScalarCurvature => DMatrix::from_element(1, 1, geom.trace(&rc)),
            _ => rc,
        }
    };
    let h = step;
    let s: BTreeMap<i32, DMatrix<f64>> = [-2, -1, 0, 1, 2].into_iter().map(|k| (k, sample(f64::from(k) * h))).collect();
    let fd = match order {
        1 => ((&s[&1] - &s[&-1]) * 8.0 - (&s[&2] - &s[&-2])) / (12.0 * h),
        2 => (-&s[&2] + &s[&1] * 16.0 - &s[&0] * 30.0 + &s[&-1] * 16.0 - &s[&-2]) / (12.0 * h * h),
        3 => (&s[&2] - &s[&1] * 2.0 + &s[&-1] * 2.0 - &s[&-2]) / (2.0 * h * h * h),
        _ => return Err(VariationError::UnsupportedOrder { quantity: q.name(), order }),
    };
    let params = GlobalParams::concrete(m as i64)?;
    let env = PointEnv::new(p, lambda, FDConfig::default());
    let predicted = match conformal_variation(q, order, &params.n)? {
        Variation::Tensor(t) => env.tensor(&t)?,
        Variation::Scalar(sc) => DMatrix::from_element(1, 1, env.scalar(&sc)?),
    };
    Ok(FdVariationReport {
        quantity: q.name(),
        order,
        step,
        max_abs_error: (&fd - &predicted).amax(),
        magnitude: predicted.amax(),
    })
}
