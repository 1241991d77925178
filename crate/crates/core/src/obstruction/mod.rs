//! The third-order obstruction `I(h₀) = ∫⟨Φ⁽³⁾(ug,ug,ug) + 3Φ⁽²⁾(h₀,ug), ug⟩`
//! as an exact rational function of `m`, with its intermediate integrals.
//!
//! Every integral is a normalized average in units of `λ⁴`. Intermediates
//! are kept in the split form `a⨍u⁴ + bλ²⨍u²` as well as totals.

pub mod criterion;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::deformation_basis::{self as db, DeformationError};
use crate::exact::{Poly, Rat, RatFn};
use crate::scalar_algebra::{moment, GlobalParams, UPoly};
use crate::variational::expr::{Atom, Func, Scalar, Sym};
use crate::variational::formulas::{self, FtttRoute};
use crate::variational::reduce::{mixed_trace, UPolyEnv};
use crate::variational::VariationError;

pub use criterion::{diagonal_criterion, reduction_to_h0, second_order_criterion, ReductionChecklist, SecondOrderVerdict};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObstructionError {
    #[error("the obstruction is only defined for m ≥ 2 (got m = {0}); ℂP¹ is excluded")]
    InvalidM(i64),
    #[error("integrand {0} is not of the form a·u⁴ + b·λ²u²")]
    NotSplit(String),
    #[error(transparent)]
    Variation(#[from] VariationError),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
}

fn half() -> RatFn {
    RatFn::ratio(1, 2)
}

fn check_m(params: &GlobalParams) -> Result<(), ObstructionError> {
    match params.m_int() {
        Some(m) if m < 2 => Err(ObstructionError::InvalidM(m)),
        _ => Ok(()),
    }
}

/// `a⨍u⁴ + bλ²⨍u²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub u4: RatFn,
    pub u2: RatFn,
}

impl Split {
    /// Reads `a u⁴ + b λ²u²`; any other monomial is an error.
    pub fn from_upoly(p: &UPoly) -> Result<Split, ObstructionError> {
        let mut out = Split { u4: RatFn::zero(), u2: RatFn::zero() };
        for (&(i, j), c) in p.terms() {
            match (i, j) {
                (4, 0) => out.u4 = c.clone(),
                (2, 1) => out.u2 = c.clone(),
                _ => return Err(ObstructionError::NotSplit(p.to_string())),
            }
        }
        Ok(out)
    }

    /// Coefficient of `λ⁴` after integration.
    pub fn total(&self, params: &GlobalParams) -> RatFn {
        &self.u4 * &moment(4, params) + &self.u2 * &moment(2, params)
    }

    pub fn scale(&self, k: &RatFn) -> Split {
        Split { u4: &self.u4 * k, u2: &self.u2 * k }
    }

    pub fn add(&self, o: &Split) -> Split {
        Split { u4: &self.u4 + &o.u4, u2: &self.u2 + &o.u2 }
    }

    pub fn record(&self) -> SplitRecord {
        SplitRecord { u4: self.u4.to_string(), lambda2_u2: self.u2.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SplitRecord {
    pub u4: String,
    pub lambda2_u2: String,
}

/// Integrand of `∫ w·S` with every `q·Δf` (`f` auxiliary) integrated by parts to
/// `(Δq)·f̃`, where `f̃` drops the constant part of `f` (`⨍Δq = 0`).
fn by_parts_integrand(s: &Scalar, weight: &UPoly, env: &UPolyEnv, aux: &[Func]) -> Result<UPoly, ObstructionError> {
    let p = &env.params;
    let mut out = UPoly::zero();
    for (syms, c) in s.terms() {
        let lap = syms.iter().position(|x| matches!(x, Sym::Lap(f) if aux.contains(f)));
        let mut q = weight.scale(c);
        for (k, x) in syms.iter().enumerate() {
            if Some(k) != lap {
                q = &q * &env.sym(*x)?;
            }
        }
        match lap {
            None => out = &out + &q,
            Some(k) => {
                let Sym::Lap(f) = syms[k] else { unreachable!() };
                let fv = env.func(f)?;
                let nonconst = fv.terms().filter(|(key, _)| key.0 > 0).fold(UPoly::zero(), |acc, (key, c)| &acc + &UPoly::monomial(key.0, key.1, c.clone()));
                out = &out + &(&q.laplacian(p) * &nonconst);
            }
        }
    }
    Ok(out)
}

/// The pieces of `I₁ = ∫⟨Φ_ttt, ug⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct I1Parts {
    /// `−∫⟨∇²f_ttt, ug⟩ = −2∫u(Δ + ½)f_ttt`, with `u²Δf_tt` moved to `Δ(u²) f_tt`.
    pub i11: Split,
    /// The remaining terms of `Φ_ttt` paired with `ug`, pointwise.
    pub i12: Split,
    /// `I₁₁` as `⨍u f_ttt` with `f_ttt` solved exactly.
    pub i11_direct: RatFn,
    pub i1: RatFn,
}

/// `I₁` through either right-hand side of the `f_ttt` equation.
pub fn compute_i1_route(params: &GlobalParams, route: FtttRoute) -> Result<I1Parts, ObstructionError> {
    check_m(params)?;
    let n = &params.n;
    let tt = formulas::phi_tt(n);
    let (env, _) = UPolyEnv::new(params).solve_aux(&tt)?;
    let ttt = formulas::phi_ttt(n, route)?;
    let u = UPoly::u();
    let i11_poly = by_parts_integrand(&ttt.aux_rhs, &u.scale(&RatFn::int(-2)), &env, &[Func::Ftt])?;
    let i11 = Split::from_upoly(&i11_poly)?;
    let (env3, f_ttt) = env.clone().solve_aux(&ttt)?;
    let i11_direct = (&u * &f_ttt).integrate(params).coefficient(4);
    let mut rest = ttt.tensor.clone();
    rest = &rest - &crate::variational::TensorExpr::term(Atom::Hess(Func::Fttt), rest.coeff(Atom::Hess(Func::Fttt)));
    let i12 = Split::from_upoly(&(&u * &env3.trace(&rest)?))?;
    let i1 = &i11.total(params) + &i12.total(params);
    Ok(I1Parts { i11, i12, i11_direct, i1 })
}

/// `I₁` with the displayed `f_ttt` equation.
pub fn compute_i1(params: &GlobalParams) -> Result<I1Parts, ObstructionError> {
    compute_i1_route(params, FtttRoute::Printed)
}

/// The pieces of `I₂ = 3∫⟨Φ_st, ug⟩` along `(1 + tu)g + sh₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct I2Parts {
    /// `∫u⟨h₀, ∇²u⟩`.
    pub i21: Split,
    /// `∫u²H₀/2`.
    pub h0_term: Split,
    /// `H₀ = Tr h₀` as `a λ² + b u²`.
    pub h0_trace: UPoly,
    /// `⅓I₂ = −(n−2)/2·I₂₁ + ∫u²H₀/2`.
    pub third: Split,
    /// `3⨍u⟨Φ_st, g⟩` with `f_st` solved exactly.
    pub i2_direct: RatFn,
    pub i2: RatFn,
}

pub fn compute_i2(params: &GlobalParams) -> Result<I2Parts, ObstructionError> {
    check_m(params)?;
    let h0 = db::solve_h0(params)?;
    let env = UPolyEnv::new(params).with_deform(&h0);
    let u = UPoly::u();
    let i21 = Split::from_upoly(&(&u * &env.sym(Sym::HessPair)?))?;
    let h0_trace = env.func(Func::H)?.clone();
    let h0_term = Split::from_upoly(&(&u.pow(2) * &h0_trace).scale(&half()))?;
    let k = -(&params.n - 2) * half();
    let third = i21.scale(&k).add(&h0_term);
    let i2 = third.total(params) * 3;
    let i2_direct = (&u * &mixed_trace(&h0, params)?).integrate(params).coefficient(4) * 3;
    Ok(I2Parts { i21, h0_term, h0_trace, third, i2_direct, i2 })
}

/// Closed forms stated for the obstruction.
pub mod closed {
    use crate::exact::RatFn;

    fn m() -> RatFn {
        RatFn::m()
    }

    fn p(c: &[i64]) -> RatFn {
        RatFn::from_poly(crate::exact::Poly::from_ints(c))
    }

    /// `−6(20m³−15m²−9m+6)/((2m+1)(2m+3)(3m+2))`.
    pub fn i1() -> RatFn {
        let den = (m() * 2 + 1) * (m() * 2 + 3) * (m() * 3 + 2);
        p(&[6, -9, -15, 20]) * -6 / den
    }

    /// `6(4m⁴+25m³−32m²−7m+14)/((m+1)(2m+1)(2m+3)(3m+2))`.
    pub fn i2() -> RatFn {
        let den = (m() + 1) * (m() * 2 + 1) * (m() * 2 + 3) * (m() * 3 + 2);
        p(&[14, -7, -32, 25, 4]) * 6 / den
    }

    /// `−24(m−1)(4m³−m²+m+2)/((m+1)(2m+1)(2m+3)(3m+2))`.
    pub fn total() -> RatFn {
        let den = (m() + 1) * (m() * 2 + 1) * (m() * 2 + 3) * (m() * 3 + 2);
        (m() - 1) * p(&[2, 1, -1, 4]) * -24 / den
    }

    /// Total with the `f_ttt` equation re-derived: `48(m−1)²/((m+1)(2m+1)(2m+3))`.
    pub fn total_derived() -> RatFn {
        (m() - 1) * (m() - 1) * 48 / ((m() + 1) * (m() * 2 + 1) * (m() * 2 + 3))
    }
}

/// Integer roots `r ≥ lo` of a nonzero polynomial, by exact evaluation up to the Cauchy bound.
pub fn integer_roots_from(p: &Poly, lo: i64) -> Vec<i64> {
    let Some(deg) = p.degree() else { return Vec::new() };
    let lead = p.lead();
    let bound = (0..deg).map(|k| (p.coeff(k) / &lead).abs()).fold(Rat::zero(), |a, b| if b > a { b } else { a });
    let hi = bound.ceil().to_integer().to_i64().unwrap_or(i64::MAX - 1) + 1;
    (lo..=hi).filter(|&r| p.eval(&Rat::from_integer(r.into())) == Rat::zero()).collect()
}

/// Sign and vanishing of one obstruction value over a range of `m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    /// Integer roots `m ≥ 2` of the numerator (rigorous, via the Cauchy bound).
    pub roots_from_2: Vec<i64>,
    pub nonzero_for_all_m_ge_2: bool,
    /// `(m, value)` for `m = 2..=50`.
    pub table: Vec<(i64, String)>,
    /// Every tabulated value is negative.
    pub negative_on_table: bool,
}

pub fn verdict(total: &RatFn) -> Result<Verdict, ObstructionError> {
    let roots = integer_roots_from(total.numer(), 2);
    let mut table = Vec::new();
    let mut negative = true;
    for m in 2..=50 {
        let v = total.eval_int(m).map_err(VariationError::from)?;
        negative &= v < Rat::zero();
        table.push((m, v.to_string()));
    }
    Ok(Verdict { nonzero_for_all_m_ge_2: roots.is_empty(), roots_from_2: roots, table, negative_on_table: negative })
}

/// Everything computed about `I(h₀)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ObstructionReport {
    pub m: String,
    pub i11: SplitRecord,
    pub i12: SplitRecord,
    pub i1: String,
    pub i21: SplitRecord,
    pub h0_term: SplitRecord,
    pub i2_third: SplitRecord,
    pub i2: String,
    pub total: String,
    /// Totals agree between the by-parts and direct Helmholtz routes.
    pub routes_agree: bool,
    pub verdict: Option<Verdict>,
    pub derived: DerivedRoute,
}

/// The same pipeline with the `f_ttt` right-hand side re-derived from the
/// Euler–Lagrange equation (no `⟨∇f_tt, ∇u⟩` term).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DerivedRoute {
    pub i11: SplitRecord,
    pub i1: String,
    pub total: String,
    /// `total_derived − total`.
    pub shift: String,
    pub nonzero_for_all_m_ge_2: bool,
}

pub fn total_obstruction(params: &GlobalParams) -> Result<ObstructionReport, ObstructionError> {
    check_m(params)?;
    let a = compute_i1(params)?;
    let b = compute_i2(params)?;
    let d = compute_i1_route(params, FtttRoute::Derived)?;
    let total = &a.i1 + &b.i2;
    let total_d = &d.i1 + &b.i2;
    let routes_agree = a.i11_direct == a.i11.total(params) && d.i11_direct == d.i11.total(params) && b.i2_direct == b.i2;
    let verdict = if params.is_symbolic() { Some(verdict(&total)?) } else { None };
    let derived_ok = if params.is_symbolic() { integer_roots_from(total_d.numer(), 2).is_empty() } else { !total_d.is_zero() };
    Ok(ObstructionReport {
        m: params.m.to_string(),
        i11: a.i11.record(),
        i12: a.i12.record(),
        i1: a.i1.to_string(),
        i21: b.i21.record(),
        h0_term: b.h0_term.record(),
        i2_third: b.third.record(),
        i2: b.i2.to_string(),
        total: total.to_string(),
        routes_agree,
        verdict,
        derived: DerivedRoute {
            i11: d.i11.record(),
            i1: d.i1.to_string(),
            shift: (&total_d - &total).to_string(),
            total: total_d.to_string(),
            nonzero_for_all_m_ge_2: derived_ok,
        },
    })
}

/// Monte Carlo average of the `I₁₂` integrand `u·tr(Φ_ttt + ∇²f_ttt)` at concrete `m`.
pub fn mc_i12(m: usize, samples: usize, seed: u64) -> Result<(crate::chart_geometry::McEstimate, f64), ObstructionError> {
    use crate::numeric_harness::FDConfig;
    use crate::variational::pointwise::PointEnv;
    let params = GlobalParams::concrete(m as i64).map_err(VariationError::from)?;
    check_m(&params)?;
    let tt = formulas::phi_tt(&params.n);
    let (_, f_tt) = UPolyEnv::new(&params).solve_aux(&tt)?;
    let ttt = formulas::phi_ttt(&params.n, FtttRoute::Printed)?;
    let rest = &ttt.tensor - &crate::variational::TensorExpr::term(Atom::Hess(Func::Fttt), ttt.tensor.coeff(Atom::Hess(Func::Fttt)));
    let exact = compute_i1(&params)?.i12.total(&params).to_f64();
    let est = crate::chart_geometry::mc_integrate(
        |q| {
            let mut env = PointEnv::new(q, 1.0, FDConfig::default());
            env.bind_poly(Func::Ftt, &f_tt);
            let t = env.tensor(&rest).expect("pointwise atoms only");
            env.func(Func::U).expect("bound").value * env.geom.trace(&t)
        },
        m,
        samples,
        seed,
    );
    Ok((est, exact))
}
