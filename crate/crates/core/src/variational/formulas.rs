//! Variations of curvature and of the shrinker operator along conformal and
//! mixed deformations, in general dimension `n`.
//!
//! Each operator variation comes in two forms: the displayed closed form,
//! and (where the ingredients allow it) the same object assembled from the
//! conformal variations of `Rc`, `∇²` and `Δ` together with the
//! differentiated Euler–Lagrange equation `2Δf − |∇f|² + R + f − n = μ`.

use serde::Serialize;

use super::expr::{cst, Atom, Func, Scalar, Sym, TensorExpr};
use super::VariationError;
use crate::exact::RatFn;

/// Geometric quantity whose conformal variation is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quantity {
    Ricci,
    ScalarCurvature,
    /// `∇²ψ` for a fixed function ψ.
    HessianPsi,
    /// `Δψ` for a fixed function ψ.
    LaplacianPsi,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Ricci => "Rc",
            Quantity::ScalarCurvature => "R",
            Quantity::HessianPsi => "hess_psi",
            Quantity::LaplacianPsi => "lap_psi",
        }
    }

    fn max_order(self) -> u32 {
        match self {
            Quantity::Ricci | Quantity::ScalarCurvature => 3,
            Quantity::HessianPsi | Quantity::LaplacianPsi => 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Variation {
    Tensor(TensorExpr),
    Scalar(Scalar),
}

impl Variation {
    pub fn tensor(self) -> Option<TensorExpr> {
        match self {
            Variation::Tensor(t) => Some(t),
            Variation::Scalar(_) => None,
        }
    }

    pub fn scalar(self) -> Option<Scalar> {
        match self {
            Variation::Scalar(s) => Some(s),
            Variation::Tensor(_) => None,
        }
    }
}

fn r(n: i64, d: i64) -> RatFn {
    RatFn::ratio(n, d)
}

fn u() -> Scalar {
    Scalar::val(Func::U)
}

fn upow(k: u32) -> Scalar {
    (0..k).fold(Scalar::int(1), |acc, _| &acc * &u())
}

fn lap_u() -> Scalar {
    Scalar::lap(Func::U)
}

fn grad_uu() -> Scalar {
    Scalar::grad(Func::U, Func::U)
}

fn t(a: Atom, c: Scalar) -> TensorExpr {
    TensorExpr::term(a, c)
}

fn sum(parts: &[TensorExpr]) -> TensorExpr {
    parts.iter().fold(TensorExpr::zero(), |acc, p| &acc + p)
}

fn ssum(parts: &[Scalar]) -> Scalar {
    parts.iter().fold(Scalar::zero(), |acc, p| &acc + p)
}

/// `k`-th `t`-derivative at `t = 0` along `g(t) = (1 + t·u)g`.
pub fn conformal_variation(q: Quantity, order: u32, n: &RatFn) -> Result<Variation, VariationError> {
    if order == 0 || order > q.max_order() {
        return Err(VariationError::UnsupportedOrder { quantity: q.name(), order });
    }
    let n2 = n - 2;
    let n1 = n - 1;
    let n4 = n - 4;
    let n6 = n - 6;
    let curv = Scalar::sym(Sym::Curv);
    let psi = Func::Psi;
    Ok(match (q, order) {
        (Quantity::Ricci, 1) => Variation::Tensor(sum(&[
            t(Atom::Hess(Func::U), cst(&(&n2 * r(-1, 2)))),
            t(Atom::Metric, lap_u().scale(&r(-1, 2))),
        ])),
        (Quantity::Ricci, 2) => Variation::Tensor(sum(&[
            t(Atom::Hess(Func::U), u().scale(&n2)),
            t(Atom::sym2(Func::U, Func::U), cst(&(&n2 * r(3, 2)))),
            t(Atom::Metric, &(&u() * &lap_u()) - &grad_uu().scale(&(&n4 * r(1, 2)))),
        ])),
        (Quantity::Ricci, 3) => Variation::Tensor(sum(&[
            t(Atom::Hess(Func::U), upow(2).scale(&(&n2 * -3))),
            t(Atom::sym2(Func::U, Func::U), u().scale(&(&n2 * -9))),
            t(
                Atom::Metric,
                &(&upow(2) * &lap_u()).scale(&RatFn::int(-3)) + &(&u() * &grad_uu()).scale(&(&n4 * 3)),
            ),
        ])),
        (Quantity::ScalarCurvature, 1) => Variation::Scalar(&(-&(&u() * &curv)) - &lap_u().scale(&n1)),
        (Quantity::ScalarCurvature, 2) => Variation::Scalar(ssum(&[
            (&upow(2) * &curv).scale(&RatFn::int(2)),
            (&u() * &lap_u()).scale(&(&n1 * 4)),
            grad_uu().scale(&(&(&n1 * &n6) * r(-1, 2))),
        ])),
        (Quantity::ScalarCurvature, 3) => Variation::Scalar(ssum(&[
            (&upow(3) * &curv).scale(&RatFn::int(-6)),
            (&upow(2) * &lap_u()).scale(&(&n1 * -18)),
            (&u() * &grad_uu()).scale(&(&(&n1 * &n6) * r(9, 2))),
        ])),
        (Quantity::HessianPsi, 1) => Variation::Tensor(sum(&[
            t(Atom::sym2(Func::U, psi), Scalar::int(-1)),
            t(Atom::Metric, Scalar::grad(psi, Func::U).scale(&r(1, 2))),
        ])),
        (Quantity::HessianPsi, 2) => Variation::Tensor(sum(&[
            t(Atom::sym2(Func::U, psi), u().scale(&RatFn::int(2))),
            t(Atom::Metric, -&(&u() * &Scalar::grad(psi, Func::U))),
        ])),
        (Quantity::LaplacianPsi, 1) => {
            Variation::Scalar(&(-&(&u() * &Scalar::lap(psi))) + &Scalar::grad(Func::U, psi).scale(&(&n2 * r(1, 2))))
        }
        (Quantity::LaplacianPsi, 2) => Variation::Scalar(
            &(&upow(2) * &Scalar::lap(psi)).scale(&RatFn::int(2)) - &(&u() * &Scalar::grad(Func::U, psi)).scale(&(&n2 * 2)),
        ),
        _ => unreachable!("order range checked above"),
    })
}

/// Replaces ψ by `k·a` in a scalar.
pub fn substitute_scalar(s: &Scalar, from: Func, to: Func, k: &Scalar) -> Scalar {
    s.substitute(&|sym| match sym {
        Sym::Val(x) if x == from => k * &Scalar::val(to),
        Sym::Lap(x) if x == from => k * &Scalar::lap(to),
        Sym::Grad(x, y) if x == from && y == from => &(k * k) * &Scalar::grad(to, to),
        Sym::Grad(x, y) if x == from => k * &Scalar::grad(to, y),
        Sym::Grad(x, y) if y == from => k * &Scalar::grad(x, to),
        other => Scalar::sym(other),
    })
}

/// Replaces ψ by `k·a` (constant `k`) in a tensor.
pub fn substitute_tensor(e: &TensorExpr, from: Func, to: Func, k: &Scalar) -> TensorExpr {
    let mut out = TensorExpr::zero();
    for (atom, c) in e.terms() {
        let c = substitute_scalar(c, from, to, k);
        let (atom, c) = match *atom {
            Atom::Sym2(x, y) if x == from && y == from => (Atom::sym2(to, to), &(k * k) * &c),
            Atom::Sym2(x, y) if x == from => (Atom::sym2(to, y), k * &c),
            Atom::Sym2(x, y) if y == from => (Atom::sym2(x, to), k * &c),
            Atom::Hess(x) if x == from => (Atom::Hess(to), k * &c),
            other => (other, c),
        };
        out = &out + &TensorExpr::term(atom, c);
    }
    out
}

/// Imposes `Δa = −a` for the listed eigenfunctions.
pub fn impose_eigen(s: &Scalar, eigen: &[Func]) -> Scalar {
    s.substitute(&|sym| match sym {
        Sym::Lap(x) if eigen.contains(&x) => -&Scalar::val(x),
        other => Scalar::sym(other),
    })
}

pub fn impose_eigen_tensor(e: &TensorExpr, eigen: &[Func]) -> TensorExpr {
    e.map_coeffs(&|c| impose_eigen(c, eigen))
}

/// Scalar curvature `n/2` of an Einstein background with constant ½.
pub fn impose_einstein(s: &Scalar, n: &RatFn) -> Scalar {
    s.substitute(&|sym| match sym {
        Sym::Curv => cst(&(n * r(1, 2))),
        other => Scalar::sym(other),
    })
}

/// A tensor with an auxiliary potential `f` determined by `(Δ + ½) f = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct Formula {
    pub tensor: TensorExpr,
    pub aux: Func,
    pub aux_rhs: Scalar,
}

impl Formula {
    /// `⟨Φ, g⟩`.
    pub fn trace(&self, dims: &super::expr::Dims) -> Result<Scalar, VariationError> {
        self.tensor.trace(dims)
    }
}

/// `f_t = (n − 2)u/2`, the first variation of the potential.
pub fn f_t_coefficient(n: &RatFn) -> RatFn {
    (n - 2) * r(1, 2)
}

/// `Φ_tt` along `(1 + tu)g`.
pub fn phi_tt(n: &RatFn) -> Formula {
    let n2 = n - 2;
    Formula {
        tensor: sum(&[
            t(Atom::Hess(Func::Ftt), Scalar::int(-1)),
            t(Atom::sym2(Func::U, Func::U), cst(&(&n2 * r(-1, 2)))),
            t(Atom::Metric, &upow(2) - &grad_uu()),
            t(Atom::Hess(Func::U), u().scale(&-&n2)),
        ]),
        aux: Func::Ftt,
        aux_rhs: &upow(2).scale(&(n * r(1, 2))) - &grad_uu().scale(&((n * 3 - 2) * r(1, 4))),
    }
}

/// `Φ_tt = −Rc_tt − ∇²f_tt − 2∇²_t f_t`, with `f_tt` from the twice
/// differentiated Euler–Lagrange equation
/// `2Δf_tt + 4Δ_t f_t − 2|∇f_t|² + R_tt + f_tt = 0`.
pub fn phi_tt_derived(n: &RatFn) -> Result<Formula, VariationError> {
    let k = cst(&f_t_coefficient(n));
    let eig = [Func::U];
    let rc2 = conformal_variation(Quantity::Ricci, 2, n)?.tensor().expect("tensor");
    let hess1 = conformal_variation(Quantity::HessianPsi, 1, n)?.tensor().expect("tensor");
    let hess1_ft = substitute_tensor(&hess1, Func::Psi, Func::U, &k);
    let tensor = sum(&[rc2.scale(&Scalar::int(-1)), t(Atom::Hess(Func::Ftt), Scalar::int(-1)), hess1_ft.scale(&Scalar::int(-2))]);
    let lap1 = conformal_variation(Quantity::LaplacianPsi, 1, n)?.scalar().expect("scalar");
    let lap1_ft = substitute_scalar(&lap1, Func::Psi, Func::U, &k);
    let grad_ft_sq = &(&k * &k) * &grad_uu();
    let r_tt = conformal_variation(Quantity::ScalarCurvature, 2, n)?.scalar().expect("scalar");
    let rest = ssum(&[lap1_ft.scale(&RatFn::int(4)), grad_ft_sq.scale(&RatFn::int(-2)), r_tt]);
    let rhs = impose_eigen(&impose_einstein(&rest, n), &eig).scale(&r(-1, 2));
    Ok(Formula { tensor: impose_eigen_tensor(&tensor, &eig), aux: Func::Ftt, aux_rhs: rhs })
}

/// How the right-hand side of the `f_ttt` equation is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FtttRoute {
    /// The displayed equation, which carries a `−3(n−2)/2·⟨∇f_tt, ∇u⟩` term.
    Printed,
    /// Three `t`-derivatives of the Euler–Lagrange equation; the
    /// `⟨∇f_tt, ∇u⟩` contributions of `6Δ_t f_tt` and `−6⟨∇f_t, ∇f_tt⟩` cancel.
    Derived,
}

/// `Φ_ttt` along `(1 + tu)g`, with `f_ttt` solving `(Δ + ½) f_ttt = rhs`.
pub fn phi_ttt(n: &RatFn, route: FtttRoute) -> Result<Formula, VariationError> {
    let n2 = n - 2;
    let tensor = sum(&[
        t(Atom::Hess(Func::Fttt), Scalar::int(-1)),
        t(Atom::sym2(Func::U, Func::Ftt), Scalar::int(3)),
        t(Atom::Metric, Scalar::grad(Func::Ftt, Func::U).scale(&r(-3, 2))),
        t(Atom::sym2(Func::U, Func::U), u().scale(&(&n2 * 6))),
        t(Atom::Hess(Func::U), upow(2).scale(&(&n2 * 3))),
        t(Atom::Metric, &upow(3).scale(&RatFn::int(-3)) - &(&u() * &grad_uu()).scale(&((n - 6) * r(3, 2)))),
    ]);
    let aux_rhs = match route {
        FtttRoute::Printed => {
            let n32 = n * 3 - 2;
            ssum(&[
                (&u() * &Scalar::lap(Func::Ftt)).scale(&RatFn::int(3)),
                Scalar::grad(Func::Ftt, Func::U).scale(&(&n2 * r(-3, 2))),
                upow(3).scale(&(&n32 * r(-3, 2))),
                (&u() * &grad_uu()).scale(&(&n32 * r(9, 4))),
                Scalar::sym(Sym::MeanU3).scale(&(&n2 * r(1, 2))),
            ])
        }
        FtttRoute::Derived => derived_fttt_rhs(n)?,
    };
    Ok(Formula { tensor, aux: Func::Fttt, aux_rhs })
}

/// `(Δ + ½) f_ttt` from
/// `2Δf_ttt + 6Δ_t f_tt + 6Δ_tt f_t + 6u|∇f_t|² − 6⟨∇f_t, ∇f_tt⟩ + R_ttt + f_ttt = μ_ttt`
/// with `μ_ttt = (n − 2)⨍u³`.
pub fn derived_fttt_rhs(n: &RatFn) -> Result<Scalar, VariationError> {
    let k = cst(&f_t_coefficient(n));
    let lap1 = conformal_variation(Quantity::LaplacianPsi, 1, n)?.scalar().expect("scalar");
    let lap2 = conformal_variation(Quantity::LaplacianPsi, 2, n)?.scalar().expect("scalar");
    let r_ttt = conformal_variation(Quantity::ScalarCurvature, 3, n)?.scalar().expect("scalar");
    let lap_t_ftt = substitute_scalar(&lap1, Func::Psi, Func::Ftt, &Scalar::int(1));
    let lap_tt_ft = substitute_scalar(&lap2, Func::Psi, Func::U, &k);
    let mu = Scalar::sym(Sym::MeanU3).scale(&(n - 2));
    let rest = ssum(&[
        lap_t_ftt.scale(&RatFn::int(6)),
        lap_tt_ft.scale(&RatFn::int(6)),
        (&u() * &(&(&k * &k) * &grad_uu())).scale(&RatFn::int(6)),
        (&k * &Scalar::grad(Func::U, Func::Ftt)).scale(&RatFn::int(-6)),
        r_ttt,
        -&mu,
    ]);
    Ok(impose_eigen(&impose_einstein(&rest, n), &[Func::U]).scale(&r(-1, 2)))
}

/// `Φ_ttt = −Rc_ttt − ∇²f_ttt − 3∇²_t f_tt − 3∇²_tt f_t`.
pub fn phi_ttt_tensor_derived(n: &RatFn) -> Result<TensorExpr, VariationError> {
    let k = cst(&f_t_coefficient(n));
    let rc3 = conformal_variation(Quantity::Ricci, 3, n)?.tensor().expect("tensor");
    let h1 = conformal_variation(Quantity::HessianPsi, 1, n)?.tensor().expect("tensor");
    let h2 = conformal_variation(Quantity::HessianPsi, 2, n)?.tensor().expect("tensor");
    let tensor = sum(&[
        rc3.scale(&Scalar::int(-1)),
        t(Atom::Hess(Func::Fttt), Scalar::int(-1)),
        substitute_tensor(&h1, Func::Psi, Func::Ftt, &Scalar::int(1)).scale(&Scalar::int(-3)),
        substitute_tensor(&h2, Func::Psi, Func::U, &k).scale(&Scalar::int(-3)),
    ]);
    Ok(impose_eigen_tensor(&tensor, &[Func::U]))
}

/// `Φ_st` along `(1 + tu + sv)g` for two eigenfunctions `u`, `v`.
pub fn phi_st_conformal(n: &RatFn) -> Formula {
    let n2 = n - 2;
    let uv = &u() * &Scalar::val(Func::V);
    Formula {
        tensor: sum(&[
            t(Atom::Hess(Func::Fst), Scalar::int(-1)),
            t(Atom::sym2(Func::U, Func::V), cst(&(&n2 * r(-1, 2)))),
            t(Atom::Metric, &uv - &Scalar::grad(Func::U, Func::V)),
            t(Atom::Hess(Func::V), u().scale(&(&n2 * r(-1, 2)))),
            t(Atom::Hess(Func::U), Scalar::val(Func::V).scale(&(&n2 * r(-1, 2)))),
        ]),
        aux: Func::Fst,
        aux_rhs: &uv.scale(&(n * r(1, 2))) - &Scalar::grad(Func::U, Func::V).scale(&((n * 3 - 2) * r(1, 4))),
    }
}

/// `Rc_st` along `(1 + tu)g + sh` with `δh = 0`.
pub fn ricci_st_mixed(n: &RatFn) -> TensorExpr {
    let n2 = n - 2;
    let half = r(1, 2);
    // ∇²(uH) = u∇²H + H∇²u + du⊗dH + dH⊗du
    let hess_uh = sum(&[
        t(Atom::Hess(Func::H), u()),
        t(Atom::Hess(Func::U), Scalar::val(Func::H)),
        t(Atom::sym2(Func::U, Func::H), Scalar::int(2)),
    ]);
    let bracket = sum(&[
        TensorExpr::atom(Atom::LapUDeform),
        t(Atom::RmDeform, u().scale(&RatFn::int(2))),
        t(Atom::Deform, -&u()),
        hess_uh,
        t(Atom::DeltaStarDeltaUDeform, Scalar::int(2)),
    ]);
    sum(&[
        t(Atom::ChristoffelDu, cst(&(&n2 * &half))),
        t(Atom::Deform, u().scale(&half)),
        t(Atom::Metric, Scalar::sym(Sym::HessPair).scale(&half)),
        t(Atom::Metric, Scalar::grad(Func::H, Func::U).scale(&r(-1, 4))),
        bracket.scale_rat(&half),
    ])
}

/// `Φ_st` along `(1 + tu)g + sh` with `δh = 0`.
pub fn phi_st_mixed(n: &RatFn) -> Formula {
    let n2 = n - 2;
    let tensor = sum(&[
        ricci_st_mixed(n).scale(&Scalar::int(-1)),
        t(Atom::Hess(Func::Fst), Scalar::int(-1)),
        t(Atom::ChristoffelDu, cst(&(&n2 * r(1, 2)))),
        t(Atom::sym2(Func::U, Func::H), cst(&r(1, 2))),
        t(Atom::Metric, Scalar::grad(Func::U, Func::H).scale(&r(-1, 4))),
    ]);
    Formula {
        tensor: impose_eigen_tensor(&tensor, &[Func::U]),
        aux: Func::Fst,
        aux_rhs: &(&u() * &Scalar::lap(Func::H)).scale(&r(-1, 2)) - &Scalar::grad(Func::U, Func::H).scale(&r(3, 4)),
    }
}

/// `R_st` along `(1 + tu)g + sh` with `δh = 0`.
pub fn scalar_st_mixed(n: &RatFn) -> Scalar {
    ssum(&[
        Scalar::sym(Sym::HessPair).scale(&(n - 2)),
        Scalar::grad(Func::H, Func::U).scale(&((-n + 5) * r(1, 2))),
        (&u() * &Scalar::lap(Func::H)).scale(&RatFn::int(2)),
    ])
}

/// `(Δ + ½) f_st` from `2Δf_st + 2Δ_t f_s + 2Δ_s f_t − 2⟨∇f_s, ∇f_t⟩ + R_st + f_st = 0`,
/// with `f_s = H/2`, `f_t = (n−2)u/2` and `Δ_s ψ = −⟨h, ∇²ψ⟩ + ½⟨∇H, ∇ψ⟩`.
pub fn derived_fst_mixed_rhs(n: &RatFn) -> Result<Scalar, VariationError> {
    let k = f_t_coefficient(n);
    let lap1 = conformal_variation(Quantity::LaplacianPsi, 1, n)?.scalar().expect("scalar");
    let lap_t_fs = substitute_scalar(&lap1, Func::Psi, Func::H, &cst(&r(1, 2)));
    let lap_s_ft = &Scalar::sym(Sym::HessPair).scale(&-&k) + &Scalar::grad(Func::H, Func::U).scale(&(&k * r(1, 2)));
    let cross = Scalar::grad(Func::H, Func::U).scale(&(&k * r(1, 2)));
    let rest = ssum(&[lap_t_fs.scale(&RatFn::int(2)), lap_s_ft.scale(&RatFn::int(2)), cross.scale(&RatFn::int(-2)), scalar_st_mixed(n)]);
    Ok(impose_eigen(&rest, &[Func::U]).scale(&r(-1, 2)))
}

/// Trace of `Φ_st` for the mixed variation as displayed:
/// `−(n−2)/2⟨h,∇²u⟩ − 3/2⟨∇H,∇u⟩ − uΔH + uH/2 − Δf_st`.
pub fn phi_st_mixed_trace_closed(n: &RatFn) -> Scalar {
    ssum(&[
        Scalar::sym(Sym::HessPair).scale(&((n - 2) * r(-1, 2))),
        Scalar::grad(Func::H, Func::U).scale(&r(-3, 2)),
        (&u() * &Scalar::lap(Func::H)).scale(&RatFn::int(-1)),
        (&u() * &Scalar::val(Func::H)).scale(&r(1, 2)),
        Scalar::lap(Func::Fst).scale(&RatFn::int(-1)),
    ])
}

/// Trace of `Φ_st` for the conformal pair with the corrected coefficient:
/// `−Δf_st + (2−3n)/2⟨∇u,∇v⟩ + 2(n−1)uv`.
pub fn phi_st_conformal_trace_closed(n: &RatFn) -> Scalar {
    ssum(&[
        Scalar::lap(Func::Fst).scale(&RatFn::int(-1)),
        Scalar::grad(Func::U, Func::V).scale(&((-(n * 3) + 2) * r(1, 2))),
        (&u() * &Scalar::val(Func::V)).scale(&((n - 1) * 2)),
    ])
}

/// `R⁽ᵏ⁾/k! − Σ_j (−u)^{k−j} tr Rc⁽ʲ⁾/j!`, which vanishes because
/// `g(t)⁻¹ = g⁻¹/(1 + tu)`; `Rc⁽⁰⁾` has trace `R`.
pub fn trace_consistency_defect(order: u32, n: &RatFn) -> Result<Scalar, VariationError> {
    let dims = super::expr::Dims::single(n.clone());
    let fact = |k: u32| RatFn::int((1..=i64::from(k)).product::<i64>());
    let lhs = conformal_variation(Quantity::ScalarCurvature, order, n)?.scalar().expect("scalar").scale(&fact(order).inv()?);
    let mut rhs = Scalar::zero();
    for j in 0..=order {
        let tr = if j == 0 {
            Scalar::sym(Sym::Curv)
        } else {
            conformal_variation(Quantity::Ricci, j, n)?.tensor().expect("tensor").trace(&dims)?.scale(&fact(j).inv()?)
        };
        let k = order - j;
        let w = (0..k).fold(Scalar::int(1), |acc, _| &acc * &-&u());
        rhs = &rhs + &(&w * &tr);
    }
    Ok(&lhs - &rhs)
}
