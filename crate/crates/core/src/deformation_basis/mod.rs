//! The five-dimensional space `V` of symmetric 2-tensors built from `u`, the
//! exact action of `L = Δ + 2Rm` on it, and the particular solution `h₀` of
//! the second-order equation `½Lh = Φ′`-data.
//!
//! Basis order: `e₁ = λ²g`, `e₂ = u²g`, `e₃ = ∂u⊗∂̄u + ∂̄u⊗∂u`, `e₄ = u∇²u`,
//! `e₅ = ∂u⊗∂u + ∂̄u⊗∂̄u`. Column `k` of every matrix holds the coordinates
//! of the image of `e_k`.

pub mod numeric;

use std::fmt;

use serde::Serialize;

use crate::exact::{ExactError, RatFn, RatMatrix};
use crate::scalar_algebra::{GlobalParams, ScalarError, UPoly};

pub use numeric::{fd_l_columns, fd_l_images, realize, realize_f64, FdLColumns, FdLImages};

pub const BASIS_LABELS: [&str; 5] = ["lambda^2 g", "u^2 g", "du*dbar(u) + dbar(u)*du", "u hess(u)", "du*du + dbar(u)*dbar(u)"];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DeformationError {
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("L is not invertible on V at m = {0}")]
    Pole(i64),
    #[error("the Hessian of {0} does not lie in V")]
    NotRepresentable(String),
}

/// Coordinates of an element of `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisCoeffs {
    pub c: [RatFn; 5],
}

impl BasisCoeffs {
    pub fn new(c: [RatFn; 5]) -> Self {
        BasisCoeffs { c }
    }

    pub fn zero() -> Self {
        BasisCoeffs { c: std::array::from_fn(|_| RatFn::zero()) }
    }

    pub fn unit(k: usize) -> Self {
        let mut z = Self::zero();
        z.c[k] = RatFn::one();
        z
    }

    pub fn from_vec(v: Vec<RatFn>) -> Self {
        let arr: [RatFn; 5] = v.try_into().expect("five coordinates");
        BasisCoeffs { c: arr }
    }

    pub fn as_slice(&self) -> &[RatFn] {
        &self.c
    }

    pub fn scale(&self, k: &RatFn) -> Self {
        BasisCoeffs { c: std::array::from_fn(|i| &self.c[i] * k) }
    }

    pub fn add(&self, o: &Self) -> Self {
        BasisCoeffs { c: std::array::from_fn(|i| &self.c[i] + &o.c[i]) }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(RatFn::is_zero)
    }

    pub fn eval_f64(&self, m: f64) -> [f64; 5] {
        std::array::from_fn(|i| self.c[i].eval_f64(m))
    }

    /// Substitutes a concrete `m`, keeping the coordinates exact.
    pub fn at(&self, m: i64) -> Result<BasisCoeffs, ExactError> {
        let mut out = Vec::with_capacity(5);
        for c in &self.c {
            out.push(RatFn::constant(c.eval_int(m)?));
        }
        Ok(Self::from_vec(out))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.c.iter().map(RatFn::to_string).collect()
    }
}

impl fmt::Display for BasisCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.to_strings().join(", "))
    }
}

impl Serialize for BasisCoeffs {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

fn m_of(params: &GlobalParams) -> &RatFn {
    &params.m
}

fn r(n: i64, d: i64) -> RatFn {
    RatFn::ratio(n, d)
}

/// Matrix of `L` on `V`, entered from the hand computation of each `L(e_k)`.
pub fn l_matrix(params: &GlobalParams) -> RatMatrix {
    let m = m_of(params);
    let inv_m = RatFn::one() / m;
    let q = RatFn::one() / &(m * m * 4);
    let z = RatFn::zero;
    let one = RatFn::one;
    RatMatrix::from_rows(vec![
        vec![one(), inv_m.clone(), q.clone(), -&q, z()],
        vec![z(), -(one() + &inv_m), -&q, q.clone(), z()],
        vec![z(), z(), -one(), -&inv_m, z()],
        vec![z(), z(), -&inv_m, -one(), z()],
        vec![z(), z(), z(), z(), -(one() + &inv_m)],
    ])
    .expect("5x5")
}

/// `L⁻¹` by exact elimination. Fails at `m = 1`, where `L` degenerates on `V`.
pub fn l_inverse(params: &GlobalParams) -> Result<RatMatrix, DeformationError> {
    if params.m_int() == Some(1) {
        return Err(DeformationError::Pole(1));
    }
    Ok(l_matrix(params).inverse()?)
}

/// The closed form of `L⁻¹`, entry by entry; compared against [`l_inverse`].
pub fn l_inverse_closed(params: &GlobalParams) -> Result<RatMatrix, DeformationError> {
    let m = m_of(params);
    let d = m * m - 1;
    if d.is_zero() {
        return Err(DeformationError::Pole(1));
    }
    let q = RatFn::one().checked_div(&(&d * 4))?;
    let mp1 = m + 1;
    let z = RatFn::zero;
    let a = (m * m).checked_div(&-&d)?;
    let b = m.checked_div(&d)?;
    Ok(RatMatrix::from_rows(vec![
        vec![RatFn::one(), RatFn::one() / &mp1, q.clone(), -&q, z()],
        vec![z(), -(m / &mp1), q.clone(), -&q, z()],
        vec![z(), z(), a.clone(), b.clone(), z()],
        vec![z(), z(), b, a, z()],
        vec![z(), z(), z(), z(), -(m / &mp1)],
    ])?)
}

/// Coordinates of the right side of `½Lh = ∇²f_tt + 2(m−1)du⊗du + (|∇u|²−u²)g + 4(m−1)u∇²u`.
pub fn second_order_rhs(params: &GlobalParams) -> BasisCoeffs {
    let m = m_of(params);
    let den = m * 3 + 2;
    let dd = -(m * &(m + 2) * 2) / &den;
    BasisCoeffs::new([
        RatFn::one() / &(m * 2),
        -(RatFn::one() + RatFn::one() / &(m * 2)),
        dd.clone(),
        (m * m * 4 - m * 6 - 4) / &den,
        dd,
    ])
}

/// `f_tt` solving `(Δ + ½) f = (2m−1)u² − (3m−2)|∇u|²`.
pub fn f_tt(params: &GlobalParams) -> Result<UPoly, DeformationError> {
    let m = m_of(params);
    let rhs = &UPoly::u().pow(2).scale(&(m * 2 - 1)) - &params.grad_u_sq().scale(&(m * 3 - 2));
    Ok(UPoly::solve_helmholtz(&r(1, 2), &rhs, params)?)
}

/// `∇²F(u) = F′(u)∇²u + F″(u) du⊗du` for `F = αu² + βλ²`.
pub fn hessian_of(f: &UPoly) -> Result<BasisCoeffs, DeformationError> {
    let fail = || DeformationError::NotRepresentable(f.to_string());
    let mut alpha = RatFn::zero();
    for (&(i, j), c) in f.terms() {
        match (i, j) {
            (0, _) => {}
            (2, 0) => alpha = c.clone(),
            _ => return Err(fail()),
        }
    }
    let two_a = &alpha * 2;
    Ok(BasisCoeffs::new([RatFn::zero(), RatFn::zero(), two_a.clone(), two_a.clone(), two_a]))
}

/// [`second_order_rhs`] recomputed from `f_tt` and the term-by-term expansion.
pub fn derived_second_order_rhs(params: &GlobalParams) -> Result<BasisCoeffs, DeformationError> {
    let m = m_of(params);
    let hess = hessian_of(&f_tt(params)?)?;
    let two_m = m * 2;
    // (|∇u|² − u²) g with |∇u|² = (λ² − u²)/(2m)
    let metric_part = BasisCoeffs::new([
        RatFn::one() / &two_m,
        -(RatFn::one() / &two_m) - 1,
        RatFn::zero(),
        RatFn::zero(),
        RatFn::zero(),
    ]);
    let k = (m - 1) * 2;
    let dudu = BasisCoeffs::new([RatFn::zero(), RatFn::zero(), k.clone(), RatFn::zero(), k.clone()]);
    let uhess = BasisCoeffs::unit(3).scale(&(k * 2));
    Ok(hess.add(&metric_part).add(&dudu).add(&uhess))
}

/// `h₀ = 2 L⁻¹ (right side)`.
pub fn solve_h0(params: &GlobalParams) -> Result<BasisCoeffs, DeformationError> {
    let inv = l_inverse(params)?;
    let half = inv.mul_vec(second_order_rhs(params).as_slice())?;
    Ok(BasisCoeffs::from_vec(half.into_iter().map(|c| c * 2).collect()))
}

/// The closed form of `h₀`.
pub fn h0_closed(params: &GlobalParams) -> BasisCoeffs {
    let m = m_of(params);
    let mp1 = m + 1;
    let den = &mp1 * &(m * 3 + 2);
    BasisCoeffs::new([
        RatFn::int(-2) / &mp1,
        (m * 2) / &mp1,
        (m * &(m * m + m * 5 + 2) * 4) / &den,
        -(m * m * m * 8) / &den,
        (m * m * &(m + 2) * 4) / &den,
    ])
}

/// `δ(e_k) = d_k · u∇u`.
pub fn divergence_coeffs(params: &GlobalParams) -> [RatFn; 5] {
    let m = m_of(params);
    let k = -(RatFn::one() / &(m * 2)) - r(1, 2);
    [RatFn::zero(), RatFn::int(2), r(-1, 2), k.clone(), k]
}

/// Coefficient of `u∇u` in `δh`.
pub fn divergence_of(c: &BasisCoeffs, params: &GlobalParams) -> RatFn {
    divergence_coeffs(params).iter().zip(&c.c).map(|(d, x)| d * x).sum()
}

/// `tr(e_k)` as functions of `u`: `nλ², nu², |∇u|², −u², 0`.
pub fn basis_traces(params: &GlobalParams) -> [UPoly; 5] {
    let n = &params.n;
    [
        UPoly::lambda2().scale(n),
        UPoly::u().pow(2).scale(n),
        params.grad_u_sq(),
        -&UPoly::u().pow(2),
        UPoly::zero(),
    ]
}

pub fn trace_of(c: &BasisCoeffs, params: &GlobalParams) -> UPoly {
    basis_traces(params).iter().zip(&c.c).fold(UPoly::zero(), |acc, (t, x)| &acc + &t.scale(x))
}

/// `|∇²u|² = ((m−1)λ² + (m+1)u²)/(4m²)`.
pub fn hess_u_norm_sq(params: &GlobalParams) -> UPoly {
    let m = m_of(params);
    let q = m * m * 4;
    &UPoly::lambda2().scale(&((m - 1) / &q)) + &UPoly::u().pow(2).scale(&((m + 1) / &q))
}

/// `⟨e_k, ∇²u⟩` as functions of `u`.
pub fn inner_with_hess_u(params: &GlobalParams) -> [UPoly; 5] {
    let m = m_of(params);
    let u = UPoly::u();
    let q = RatFn::one() / &(m * m * 4);
    [
        -&(&UPoly::lambda2() * &u),
        -&u.pow(3),
        -&(&u * &(&UPoly::lambda2() - &u.pow(2))).scale(&q),
        &u * &hess_u_norm_sq(params),
        UPoly::zero(),
    ]
}

/// Pointwise Gram matrix `⟨e_i, e_j⟩`.
pub fn gram_pointwise(params: &GlobalParams) -> Vec<Vec<UPoly>> {
    let u = UPoly::u();
    let l2 = UPoly::lambda2();
    let grad = params.grad_u_sq();
    let grad2_half = grad.pow(2).scale(&r(1, 2));
    let hess = inner_with_hess_u(params);
    // ⟨g, e_k⟩ = tr e_k
    let tr = basis_traces(params);
    let mut gm = vec![vec![UPoly::zero(); 5]; 5];
    let l2u2 = [l2.clone(), u.pow(2)];
    for i in 0..2 {
        for j in 0..5 {
            gm[i][j] = &l2u2[i] * &tr[j];
            gm[j][i] = gm[i][j].clone();
        }
    }
    gm[2][2] = grad2_half.clone();
    gm[2][3] = &u * &hess[2];
    gm[3][2] = gm[2][3].clone();
    gm[3][3] = &u * &hess[3];
    gm[4][4] = grad2_half;
    gm
}

/// `⨍⟨e_i, e_j⟩` over ℂP^{2m−1}, as coefficients of `λ⁴`.
pub fn gram_average(params: &GlobalParams) -> RatMatrix {
    let gm = gram_pointwise(params);
    let rows = gm.iter().map(|row| row.iter().map(|p| p.integrate(params).coefficient(4)).collect()).collect();
    RatMatrix::from_rows(rows).expect("5x5")
}

/// `Mᵀ G − G M`; zero iff `L` is symmetric for the `L²` product restricted to `V`.
pub fn self_adjoint_defect(params: &GlobalParams) -> RatMatrix {
    let g = gram_average(params);
    let mm = l_matrix(params);
    let a = mm.transpose().mul(&g).expect("5x5");
    let b = g.mul(&mm).expect("5x5");
    let entries: Vec<RatFn> = (0..5).flat_map(|i| (0..5).map(move |j| (i, j))).map(|(i, j)| a.get(i, j) - b.get(i, j)).collect();
    RatMatrix::new(5, 5, entries).expect("5x5")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_matches_closed_form() {
        let p = GlobalParams::symbolic();
        assert_eq!(l_inverse(&p).unwrap(), l_inverse_closed(&p).unwrap());
        assert_eq!(l_inverse(&p).unwrap().get(2, 2).to_string(), "-m^2/((m-1)(m+1))");
    }

    #[test]
    fn m_one_has_a_pole() {
        let p = GlobalParams::concrete(1).unwrap();
        assert_eq!(l_inverse(&p), Err(DeformationError::Pole(1)));
    }

    #[test]
    fn h0_at_two() {
        let h = solve_h0(&GlobalParams::symbolic()).unwrap().at(2).unwrap();
        assert_eq!(h.to_strings(), ["-2/3", "4/3", "16/3", "-8/3", "8/3"]);
    }
}
