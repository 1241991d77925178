//! Exact reduction of variational expressions.
//!
//! With a single eigenfunction `u`, every function in sight is a [`UPoly`]
//! and every tensor lies in `V`, so formulas reduce to coordinates and
//! averages. With several eigenfunctions the reduction is to averages of
//! triple products `⨍abw`.

use std::collections::BTreeMap;

use super::expr::{Atom, Func, Scalar, Sym, TensorExpr};
use super::formulas::{self, Formula, FtttRoute};
use super::VariationError;
use crate::deformation_basis::{self as db, BasisCoeffs};
use crate::exact::{RatFn, RatMatrix};
use crate::scalar_algebra::{moment, GlobalParams, UPoly};

fn half() -> RatFn {
    RatFn::ratio(1, 2)
}

/// Values of the named functions as polynomials in `u`, and optionally a
/// deformation `h ∈ V`.
#[derive(Clone, Debug)]
pub struct UPolyEnv {
    pub params: GlobalParams,
    funcs: BTreeMap<Func, UPoly>,
    deform: Option<BasisCoeffs>,
}

/// `T = a·g + b·(∂u⊗∂̄u + c.c.) + c·(∂u⊗∂u + c.c.) + d·∇²u` with function coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VComponents {
    pub metric: UPoly,
    pub mixed: UPoly,
    pub pure: UPoly,
    pub hess: UPoly,
}

impl VComponents {
    fn add_dudu(&mut self, c: &UPoly) {
        self.mixed = &self.mixed + c;
        self.pure = &self.pure + c;
    }

    /// Coordinates in `V`, or an error if some coefficient has the wrong degree.
    pub fn to_basis(&self) -> Result<BasisCoeffs, VariationError> {
        let fail = |what: &str, p: &UPoly| VariationError::NotRepresentable(format!("{what} coefficient {p}"));
        let mut c: [RatFn; 5] = std::array::from_fn(|_| RatFn::zero());
        for (&(i, j), v) in self.metric.terms() {
            match (i, j) {
                (0, 1) => c[0] = v.clone(),
                (2, 0) => c[1] = v.clone(),
                _ => return Err(fail("metric", &self.metric)),
            }
        }
        c[2] = constant_of(&self.mixed).ok_or_else(|| fail("mixed", &self.mixed))?;
        c[4] = constant_of(&self.pure).ok_or_else(|| fail("pure", &self.pure))?;
        for (&(i, j), v) in self.hess.terms() {
            match (i, j) {
                (1, 0) => c[3] = v.clone(),
                _ => return Err(fail("hessian", &self.hess)),
            }
        }
        Ok(BasisCoeffs::new(c))
    }
}

fn constant_of(p: &UPoly) -> Option<RatFn> {
    let mut out = RatFn::zero();
    for (&(i, j), v) in p.terms() {
        if (i, j) != (0, 0) {
            return None;
        }
        out = v.clone();
    }
    Some(out)
}

impl UPolyEnv {
    /// `u` bound to itself; nothing else.
    pub fn new(params: &GlobalParams) -> Self {
        let mut funcs = BTreeMap::new();
        funcs.insert(Func::U, UPoly::u());
        UPolyEnv { params: params.clone(), funcs, deform: None }
    }

    pub fn with(mut self, f: Func, p: UPoly) -> Self {
        self.funcs.insert(f, p);
        self
    }

    /// Binds `h` and its trace `H`.
    pub fn with_deform(mut self, h: &BasisCoeffs) -> Self {
        self.funcs.insert(Func::H, db::trace_of(h, &self.params));
        self.deform = Some(h.clone());
        self
    }

    pub fn func(&self, f: Func) -> Result<&UPoly, VariationError> {
        self.funcs.get(&f).ok_or_else(|| VariationError::UnknownFunction(f.name().to_string()))
    }

    fn deform(&self) -> Result<&BasisCoeffs, VariationError> {
        self.deform.as_ref().ok_or_else(|| VariationError::UnknownFunction("h".into()))
    }

    pub fn sym(&self, s: Sym) -> Result<UPoly, VariationError> {
        let p = &self.params;
        Ok(match s {
            Sym::Val(f) => self.func(f)?.clone(),
            Sym::Lap(f) => self.func(f)?.laplacian(p),
            Sym::Grad(a, b) => UPoly::grad_inner(self.func(a)?, self.func(b)?, p),
            Sym::HessPair => {
                let h = self.deform()?;
                db::inner_with_hess_u(p).iter().zip(&h.c).fold(UPoly::zero(), |acc, (e, c)| &acc + &e.scale(c))
            }
            Sym::Curv => UPoly::constant(&p.n * half()),
            // odd moment: the coefficient is zero, so the missing λ³ grading never shows
            Sym::MeanU3 => {
                let mk = moment(3, p);
                if !mk.is_zero() {
                    return Err(VariationError::NotRepresentable("⨍u³".into()));
                }
                UPoly::zero()
            }
        })
    }

    pub fn scalar(&self, s: &Scalar) -> Result<UPoly, VariationError> {
        let mut out = UPoly::zero();
        for (syms, c) in s.terms() {
            let mut term = UPoly::constant(c.clone());
            for x in syms {
                term = &term * &self.sym(*x)?;
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Decomposes a tensor over `{g, ∂u⊗∂̄u + c.c., ∂u⊗∂u + c.c., ∇²u}`.
    pub fn components(&self, e: &TensorExpr) -> Result<VComponents, VariationError> {
        let mut out = VComponents::default();
        for (atom, c) in e.terms() {
            let c = self.scalar(c)?;
            match *atom {
                Atom::Metric => out.metric = &out.metric + &c,
                Atom::Sym2(a, b) => {
                    let k = &self.func(a)?.derivative() * &self.func(b)?.derivative();
                    out.add_dudu(&(&c * &k));
                }
                Atom::Hess(a) => {
                    // ∇²F(u) = F′∇²u + F″du⊗du
                    let f = self.func(a)?;
                    out.hess = &out.hess + &(&c * &f.derivative());
                    out.add_dudu(&(&c * &f.derivative().derivative()));
                }
                Atom::Deform => {
                    let h = self.deform()?;
                    let u = UPoly::u();
                    let g = &UPoly::lambda2().scale(&h.c[0]) + &u.pow(2).scale(&h.c[1]);
                    out.metric = &out.metric + &(&c * &g);
                    out.mixed = &out.mixed + &c.scale(&h.c[2]);
                    out.hess = &out.hess + &(&c * &u.scale(&h.c[3]));
                    out.pure = &out.pure + &c.scale(&h.c[4]);
                }
                other => return Err(VariationError::UnsupportedAtom(other.to_string())),
            }
        }
        Ok(out)
    }

    pub fn project(&self, e: &TensorExpr) -> Result<BasisCoeffs, VariationError> {
        self.components(e)?.to_basis()
    }

    /// `⟨T, g⟩` as a polynomial in `u`.
    pub fn trace(&self, e: &TensorExpr) -> Result<UPoly, VariationError> {
        let c = self.components(e)?;
        let p = &self.params;
        let tr = db::basis_traces(p);
        // tr(∂u⊗∂̄u + c.c.) = |∇u|², tr(∂u⊗∂u + c.c.) = 0, tr ∇²u = −u
        Ok(&(&c.metric.scale(&p.n) + &(&c.mixed * &tr[2])) - &(&c.hess * &UPoly::u()))
    }

    /// Solves the auxiliary equation of a formula and binds the result.
    pub fn solve_aux(self, f: &Formula) -> Result<(UPolyEnv, UPoly), VariationError> {
        let rhs = self.scalar(&f.aux_rhs)?;
        let sol = UPoly::solve_helmholtz(&half(), &rhs, &self.params)?;
        Ok((self.with(f.aux, sol.clone()), sol))
    }
}

/// `(Δ + ½) f − rhs`, which must vanish exactly.
pub fn helmholtz_residual(f: &UPoly, rhs: &UPoly, params: &GlobalParams) -> UPoly {
    &(&f.laplacian(params) + &f.scale(&half())) - rhs
}

/// The potentials along the conformal direction, and along `h₀` mixed with it.
#[derive(Clone, Debug, PartialEq)]
pub struct VariationScalars {
    pub f_t: UPoly,
    pub f_tt: UPoly,
    pub f_ttt: UPoly,
    /// `f_ttt` from the displayed right-hand side.
    pub f_ttt_printed: UPoly,
    pub f_st: UPoly,
    /// Largest number of nonzero terms left in any Helmholtz residual (0 when exact).
    pub residual_terms: usize,
}

/// Solves every auxiliary equation on the invariant space and re-applies `Δ + ½`.
pub fn variation_scalars(params: &GlobalParams) -> Result<VariationScalars, VariationError> {
    let n = &params.n;
    let mut residual_terms = 0;
    let mut check = |f: &UPoly, rhs: &UPoly| residual_terms = residual_terms.max(helmholtz_residual(f, rhs, params).terms().count());
    let env = UPolyEnv::new(params);
    let f_t = UPoly::u().scale(&formulas::f_t_coefficient(n));
    let tt = formulas::phi_tt(n);
    let rhs_tt = env.scalar(&tt.aux_rhs)?;
    let (env, f_tt) = env.solve_aux(&tt)?;
    check(&f_tt, &rhs_tt);
    let mut ttt = BTreeMap::new();
    for route in [FtttRoute::Derived, FtttRoute::Printed] {
        let f = formulas::phi_ttt(n, route)?;
        let rhs = env.scalar(&f.aux_rhs)?;
        let (_, sol) = env.clone().solve_aux(&f)?;
        check(&sol, &rhs);
        ttt.insert(route as u8, sol);
    }
    let h0 = db::solve_h0(params)?;
    let st = formulas::phi_st_mixed(n);
    let env_h = UPolyEnv::new(params).with_deform(&h0);
    let rhs_st = env_h.scalar(&st.aux_rhs)?;
    let (_, f_st) = env_h.solve_aux(&st)?;
    check(&f_st, &rhs_st);
    Ok(VariationScalars {
        f_t,
        f_tt,
        f_ttt: ttt.remove(&(FtttRoute::Derived as u8)).expect("solved"),
        f_ttt_printed: ttt.remove(&(FtttRoute::Printed as u8)).expect("solved"),
        f_st,
        residual_terms,
    })
}

/// `Φ′` on `V`: `Φ′(h) = ½(Lh + 2δ*δh + ∇²X)` with `(Δ + ½)X = δδh`.
///
/// Here `δ` is the divergence and `δ*` its formal adjoint `−½(∇α + ∇αᵀ)`;
/// `δe_k = d_k·u du`, `δ*(u du) = −(e₃ + e₄ + e₅)` and
/// `δ(u du) = |∇u|² − u²`.
pub fn phi_prime_matrix(params: &GlobalParams) -> Result<RatMatrix, VariationError> {
    let l = db::l_matrix(params);
    let d = db::divergence_coeffs(params);
    let div_udu = &params.grad_u_sq() - &UPoly::u().pow(2);
    let mut cols = Vec::with_capacity(5);
    for k in 0..5 {
        let mut col: Vec<RatFn> = l.column(k).iter().map(|x| x * half()).collect();
        for i in [2, 3, 4] {
            col[i] = &col[i] - &d[k];
        }
        let x = UPoly::solve_helmholtz(&half(), &div_udu.scale(&d[k]), params)?;
        let hx = db::hessian_of(&x)?;
        for (c, h) in col.iter_mut().zip(&hx.c) {
            *c = &*c + &(h * half());
        }
        cols.push(col);
    }
    let rows = (0..5).map(|i| (0..5).map(|k| cols[k][i].clone()).collect()).collect();
    Ok(RatMatrix::from_rows(rows)?)
}

/// Exact defect `PᵀG − GP` of `Φ′` against the averaged Gram matrix of `V`.
pub fn phi_prime_symmetry_defect(params: &GlobalParams) -> Result<RatMatrix, VariationError> {
    let p = phi_prime_matrix(params)?;
    let g = db::gram_average(params);
    let a = p.transpose().mul(&g)?;
    let b = g.mul(&p)?;
    let entries = (0..5).flat_map(|i| (0..5).map(move |j| (i, j))).map(|(i, j)| a.get(i, j) - b.get(i, j)).collect();
    Ok(RatMatrix::new(5, 5, entries)?)
}

/// Averages `⨍ S·w` over eigenfunctions with `Δa = −a`, as coefficients of
/// the triple products `T(a,b,c) = ⨍abc`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossAverage {
    terms: BTreeMap<[Func; 3], RatFn>,
}

impl CrossAverage {
    fn add(&mut self, mut key: [Func; 3], c: &RatFn) {
        key.sort();
        let e = self.terms.entry(key).or_insert_with(RatFn::zero);
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn coeff(&self, a: Func, b: Func, c: Func) -> RatFn {
        let mut key = [a, b, c];
        key.sort();
        self.terms.get(&key).cloned().unwrap_or_else(RatFn::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Func; 3], &RatFn)> {
        self.terms.iter()
    }

    pub fn scaled(&self, k: &RatFn) -> CrossAverage {
        let mut out = CrossAverage::default();
        out.merge(self, k);
        out
    }

    fn merge(&mut self, o: &CrossAverage, k: &RatFn) {
        for (key, c) in &o.terms {
            self.add(*key, &(c * k));
        }
    }
}

/// Reduces `⨍ S·w`.
///
/// Rules, for eigenfunctions `a`, `b`, `w` and an auxiliary `f` with
/// `(Δ + ½) f = R`:
/// `⨍⟨∇a,∇b⟩w = ½⨍abw` (integrate `Δ(ab)` against `w`),
/// `⨍f w = −2⨍Rw` and `⨍(Δf) w = 2⨍Rw` (move `Δ + ½` onto `w`).
pub fn cross_average(s: &Scalar, weight: Func, eigen: &[Func], aux: &[(Func, Scalar)]) -> Result<CrossAverage, VariationError> {
    let is_eigen = |f: &Func| eigen.contains(f);
    let aux_rhs = |f: Func| aux.iter().find(|(g, _)| *g == f).map(|(_, r)| r);
    let fail = |syms: &[Sym]| {
        let names: Vec<String> = syms.iter().map(Sym::to_string).collect();
        VariationError::NotRepresentable(format!("⨍({})·{}", names.join("·"), weight.name()))
    };
    let mut out = CrossAverage::default();
    for (syms, c) in s.terms() {
        match syms.as_slice() {
            [Sym::Val(a), Sym::Val(b)] if is_eigen(a) && is_eigen(b) => out.add([*a, *b, weight], c),
            [Sym::Lap(a), Sym::Val(b)] | [Sym::Val(b), Sym::Lap(a)] if is_eigen(a) && is_eigen(b) => out.add([*a, *b, weight], &-c),
            [Sym::Lap(a), Sym::Lap(b)] if is_eigen(a) && is_eigen(b) => out.add([*a, *b, weight], c),
            [Sym::Grad(a, b)] if is_eigen(a) && is_eigen(b) => out.add([*a, *b, weight], &(c * half())),
            [Sym::Val(f)] | [Sym::Lap(f)] if aux_rhs(*f).is_some() => {
                let inner = cross_average(aux_rhs(*f).expect("checked"), weight, eigen, aux)?;
                let k = if matches!(syms[0], Sym::Val(_)) { RatFn::int(-2) } else { RatFn::int(2) };
                out.merge(&inner, &(c * &k));
            }
            _ => return Err(fail(syms)),
        }
    }
    Ok(out)
}

/// `Φ_tt` projected to `V` and negated; equals the right side of the second-order equation.
pub fn second_order_rhs_from_phi_tt(params: &GlobalParams) -> Result<BasisCoeffs, VariationError> {
    let f = formulas::phi_tt(&params.n);
    let (env, _) = UPolyEnv::new(params).solve_aux(&f)?;
    Ok(env.project(&f.tensor)?.scale(&RatFn::int(-1)))
}

/// `⟨Φ_st, g⟩` along `(1 + tu)g + sh` for `h ∈ V`, as a polynomial in `u`.
///
/// The formula assumes `δh = 0`; any other `h` is rejected.
pub fn mixed_trace(h: &BasisCoeffs, params: &GlobalParams) -> Result<UPoly, VariationError> {
    let div = db::divergence_of(h, params);
    if !div.is_zero() {
        return Err(VariationError::NonzeroDivergence(div.to_string()));
    }
    let f = formulas::phi_st_mixed(&params.n);
    let (env, _) = UPolyEnv::new(params).with_deform(h).solve_aux(&f)?;
    env.scalar(&formulas::phi_st_mixed_trace_closed(&params.n))
}
