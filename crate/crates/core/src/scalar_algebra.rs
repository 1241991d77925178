//! Exact calculus on polynomials in the distinguished eigenfunction `u`.
//!
//! A [`UPoly`] is `Σ c_ij λ^{2j} u^i` with rational-function coefficients.
//! On the invariant function space spanned by powers of `u` the Laplacian,
//! gradient pairings and integration close up exactly because
//! `Δu = −u` and `|∇u|² = (λ² − u²)/(2m)`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::exact::{Rat, RatFn};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("Δ + c is singular on u-degree {degree}")]
    Singular { degree: u32 },
    #[error("m must be at least 1, got {0}")]
    InvalidM(i64),
}

/// Dimension data shared by every exact computation.
///
/// `m` is either the symbol or a constant; `n` is the real dimension entering
/// the general variational formulas (default `4m − 2`, the real dimension of
/// ℂP^{2m−1}). The eigenfunction amplitude λ is not a number here but the
/// grading of [`UPoly`], and every integral is a normalized average, so the
/// volume is an implicit unit. `lambda` is the value used by float evaluators.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalParams {
    pub m: RatFn,
    pub n: RatFn,
    pub lambda: f64,
}

impl GlobalParams {
    pub fn symbolic() -> Self {
        let m = RatFn::m();
        let n = &m * 4 - 2;
        GlobalParams { m, n, lambda: 1.0 }
    }

    pub fn concrete(m: i64) -> Result<Self, ScalarError> {
        if m < 1 {
            return Err(ScalarError::InvalidM(m));
        }
        Ok(GlobalParams { m: RatFn::int(m), n: RatFn::int(4 * m - 2), lambda: 1.0 })
    }

    /// Replaces the real dimension used by the general-`n` formulas.
    pub fn with_n(mut self, n: RatFn) -> Self {
        self.n = n;
        self
    }

    /// `Some(m)` when `m` is a concrete integer.
    pub fn m_int(&self) -> Option<i64> {
        use num_traits::ToPrimitive;
        let c = self.m.as_constant()?;
        c.is_integer().then(|| c.to_integer().to_i64()).flatten()
    }

    pub fn is_symbolic(&self) -> bool {
        self.m_int().is_none()
    }

    /// `|∇u|²` as a polynomial in `u`.
    pub fn grad_u_sq(&self) -> UPoly {
        let k = RatFn::one() / (&self.m * 2);
        &UPoly::lambda2().scale(&k) - &UPoly::u().pow(2).scale(&k)
    }
}

/// Polynomial in `u` with λ²-graded rational-function coefficients.
///
/// Keys are `(u-power, λ²-power)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UPoly {
    terms: BTreeMap<(u32, u32), RatFn>,
}

/// Serialized form of one UPoly term.
#[derive(Serialize, Clone, Debug, PartialEq)]
pub struct UPolyRecord {
    pub u_power: u32,
    pub lambda2_power: u32,
    pub num_poly: String,
    pub den_poly: String,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly::default()
    }

    pub fn constant(c: RatFn) -> Self {
        UPoly::monomial(0, 0, c)
    }

    pub fn one() -> Self {
        UPoly::constant(RatFn::one())
    }

    pub fn u() -> Self {
        UPoly::monomial(1, 0, RatFn::one())
    }

    pub fn lambda2() -> Self {
        UPoly::monomial(0, 1, RatFn::one())
    }

    /// `c λ^{2j} u^i`.
    pub fn monomial(i: u32, j: u32, c: RatFn) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((i, j), c);
        }
        UPoly { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &RatFn)> {
        self.terms.iter()
    }

    pub fn coeff(&self, i: u32, j: u32) -> RatFn {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(RatFn::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn u_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.0).max()
    }

    fn add_term(&mut self, key: (u32, u32), c: &RatFn) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key).or_insert_with(RatFn::zero);
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, c: &RatFn) -> UPoly {
        if c.is_zero() {
            return UPoly::zero();
        }
        UPoly { terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> UPoly {
        (0..e).fold(UPoly::one(), |acc, _| &acc * self)
    }

    /// Applies `f` to every coefficient, e.g. to substitute a value for `m`.
    pub fn map_coeffs(&self, f: impl Fn(&RatFn) -> RatFn) -> UPoly {
        let mut out = UPoly::zero();
        for (k, v) in &self.terms {
            out.add_term(*k, &f(v));
        }
        out
    }

    /// `∂/∂u`.
    pub fn derivative(&self) -> UPoly {
        let mut out = UPoly::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                out.add_term((i - 1, j), &(c * i64::from(i)));
            }
        }
        out
    }

    /// Float value at given `u`, λ and `m`.
    pub fn eval_f64(&self, u: f64, lambda: f64, m: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| c.eval_f64(m) * lambda.powi(2 * j as i32) * u.powi(i as i32))
            .sum()
    }

    /// Laplacian on the invariant space:
    /// `Δ(λ^{2j}u^k) = λ^{2j}[(−k − k(k−1)/(2m)) u^k + k(k−1)/(2m) λ² u^{k−2}]`.
    pub fn laplacian(&self, params: &GlobalParams) -> UPoly {
        let mut out = UPoly::zero();
        for (&(k, j), c) in &self.terms {
            let (diag, sub) = lap_coefficients(k, &params.m);
            out.add_term((k, j), &(c * &diag));
            if k >= 2 {
                out.add_term((k - 2, j + 1), &(c * &sub));
            }
        }
        out
    }

    /// `⟨∇p, ∇q⟩ = p′(u) q′(u) (λ² − u²)/(2m)`.
    pub fn grad_inner(p: &UPoly, q: &UPoly, params: &GlobalParams) -> UPoly {
        &(&p.derivative() * &q.derivative()) * &params.grad_u_sq()
    }

    /// Solves `(Δ + c) f = rhs` by back-substitution from the top u-degree down.
    ///
    /// `Δ + c` maps `λ^{2j}u^k` to a multiple of itself plus a `λ^{2j+2}u^{k−2}`
    /// term, so the system is triangular with diagonal `d_k + c`.
    pub fn solve_helmholtz(c: &RatFn, rhs: &UPoly, params: &GlobalParams) -> Result<UPoly, ScalarError> {
        let mut residual = rhs.clone();
        let mut result = UPoly::zero();
        while let Some((&(k, j), coef)) = residual.terms.iter().max_by_key(|(key, _)| (key.0, std::cmp::Reverse(key.1))) {
            let (diag, _) = lap_coefficients(k, &params.m);
            let pivot = &diag + c;
            if pivot.is_zero() {
                return Err(ScalarError::Singular { degree: k });
            }
            let term = UPoly::monomial(k, j, coef / &pivot);
            let image = &term.laplacian(params) + &term.scale(c);
            residual = &residual - &image;
            result = &result + &term;
        }
        Ok(result)
    }

    /// Normalized average `⨍p`, as coefficients of powers of λ.
    pub fn integrate(&self, params: &GlobalParams) -> Average {
        let mut out = Average::default();
        for (&(i, j), c) in &self.terms {
            let mk = moment(i, params);
            out.add(2 * j + i, &(c * &mk));
        }
        out
    }

    pub fn records(&self) -> Vec<UPolyRecord> {
        self.terms
            .iter()
            .map(|(&(i, j), c)| UPolyRecord {
                u_power: i,
                lambda2_power: j,
                num_poly: c.numer().to_string(),
                den_poly: c.denom().to_string(),
            })
            .collect()
    }
}

/// Diagonal and sub-diagonal coefficients of Δ on `u^k`.
fn lap_coefficients(k: u32, m: &RatFn) -> (RatFn, RatFn) {
    let kk = i64::from(k);
    let sub = RatFn::int(kk * (kk - 1)) / (m * 2);
    (-(RatFn::int(kk) + &sub), sub)
}

/// `⨍u^k / λ^k` from the recurrence `⨍u^k = (k−1)λ²/(2m+k−1) ⨍u^{k−2}`.
///
/// Odd moments vanish: the block swap is an isometry sending `u` to `−u`;
/// the recurrence started from `⨍u = 0` gives the same.
pub fn moment(k: u32, params: &GlobalParams) -> RatFn {
    if k % 2 == 1 {
        return RatFn::zero();
    }
    let mut acc = RatFn::one();
    let mut i = 2;
    while i <= k {
        let ii = i64::from(i);
        acc = acc * RatFn::int(ii - 1) / (&params.m * 2 + (ii - 1));
        i += 2;
    }
    acc
}

/// A normalized integral: `Σ_p c_p λ^p`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Average {
    by_power: BTreeMap<u32, RatFn>,
}

impl Average {
    fn add(&mut self, p: u32, c: &RatFn) {
        if c.is_zero() {
            return;
        }
        let e = self.by_power.entry(p).or_insert_with(RatFn::zero);
        *e = &*e + c;
        if e.is_zero() {
            self.by_power.remove(&p);
        }
    }

    pub fn coefficient(&self, lambda_power: u32) -> RatFn {
        self.by_power.get(&lambda_power).cloned().unwrap_or_else(RatFn::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.by_power.is_empty()
    }

    /// The single `(power, coefficient)` when the result is homogeneous in λ.
    pub fn homogeneous(&self) -> Option<(u32, RatFn)> {
        match self.by_power.len() {
            0 => Some((0, RatFn::zero())),
            1 => self.by_power.iter().next().map(|(p, c)| (*p, c.clone())),
            _ => None,
        }
    }

    pub fn eval_f64(&self, lambda: f64, m: f64) -> f64 {
        self.by_power.iter().map(|(p, c)| c.eval_f64(m) * lambda.powi(*p as i32)).sum()
    }
}

impl Add for &UPoly {
    type Output = UPoly;
    fn add(self, rhs: &UPoly) -> UPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.add_term(*k, v);
        }
        out
    }
}

impl Sub for &UPoly {
    type Output = UPoly;
    fn sub(self, rhs: &UPoly) -> UPoly {
        self + &(-rhs)
    }
}

impl Mul for &UPoly {
    type Output = UPoly;
    fn mul(self, rhs: &UPoly) -> UPoly {
        let mut out = UPoly::zero();
        for (&(i1, j1), a) in &self.terms {
            for (&(i2, j2), b) in &rhs.terms {
                out.add_term((i1 + i2, j1 + j2), &(a * b));
            }
        }
        out
    }
}

impl Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
}

macro_rules! owned_upoly_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<UPoly> for UPoly {
            type Output = UPoly;
            fn $f(self, rhs: UPoly) -> UPoly { (&self).$f(&rhs) }
        }
        impl $tr<&UPoly> for UPoly {
            type Output = UPoly;
            fn $f(self, rhs: &UPoly) -> UPoly { (&self).$f(rhs) }
        }
    )*};
}
owned_upoly_ops!(Add add, Sub sub, Mul mul);

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "[{c}]")?;
            match i {
                0 => {}
                1 => f.write_str("u")?,
                _ => write!(f, "u^{i}")?,
            }
            match j {
                0 => {}
                1 => f.write_str("lambda^2")?,
                _ => write!(f, "lambda^{}", 2 * j)?,
            }
        }
        Ok(())
    }
}

/// `⨍u^k` as an exact rational at a concrete `m`.
pub fn moment_at(k: u32, m: i64) -> Rat {
    moment(k, &GlobalParams::concrete(m).expect("m >= 1")).eval_int(m).expect("moments have no poles for m >= 1")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> GlobalParams {
        GlobalParams::symbolic()
    }

    fn m() -> RatFn {
        RatFn::m()
    }

    #[test]
    fn laplacian_examples() {
        let u = UPoly::u();
        assert_eq!(u.laplacian(&p()), -&u);
        let l2 = u.pow(2).laplacian(&p());
        let expect = &UPoly::lambda2().scale(&(RatFn::one() / m())) - &u.pow(2).scale(&(RatFn::int(2) + RatFn::one() / m()));
        assert_eq!(l2, expect);
        let l4 = u.pow(4).laplacian(&p());
        let expect = &UPoly::monomial(2, 1, RatFn::int(6) / m()) - &u.pow(4).scale(&(RatFn::int(4) + RatFn::int(6) / m()));
        assert_eq!(l4, expect);
    }

    #[test]
    fn grad_inner_examples() {
        let u = UPoly::u();
        assert_eq!(UPoly::grad_inner(&u, &u, &p()), p().grad_u_sq());
        let lhs = UPoly::grad_inner(&u.pow(2), &u, &p());
        let rhs = (&UPoly::monomial(1, 1, RatFn::one()) - &u.pow(3)).scale(&(RatFn::one() / m()));
        assert_eq!(lhs, rhs);
        assert!(UPoly::grad_inner(&UPoly::constant(RatFn::int(7)), &u, &p()).is_zero());
    }

    #[test]
    fn helmholtz_recovers_ftt() {
        let rhs = &UPoly::monomial(2, 0, m() * 2 - RatFn::one() / m() + RatFn::ratio(1, 2))
            + &UPoly::monomial(0, 1, RatFn::one() / m() - RatFn::ratio(3, 2));
        let f = UPoly::solve_helmholtz(&RatFn::ratio(1, 2), &rhs, &p()).unwrap();
        let den = m() * 3 + 2;
        assert_eq!(f.coeff(2, 0), -(m() * m() * 4 + m() - 2) / &den);
        assert_eq!(f.coeff(0, 1), -(m() - 2) / &den);
        assert!(UPoly::solve_helmholtz(&RatFn::ratio(1, 2), &UPoly::zero(), &p()).unwrap().is_zero());
    }

    #[test]
    fn helmholtz_reports_singular_degree() {
        // Δ + 1 kills u itself.
        let err = UPoly::solve_helmholtz(&RatFn::one(), &UPoly::u(), &p()).unwrap_err();
        assert_eq!(err, ScalarError::Singular { degree: 1 });
    }

    #[test]
    fn moment_examples() {
        let u = UPoly::u();
        assert_eq!(u.pow(2).integrate(&p()).coefficient(2), RatFn::one() / (m() * 2 + 1));
        assert_eq!(u.pow(4).integrate(&p()).coefficient(4), RatFn::int(3) / ((m() * 2 + 1) * (m() * 2 + 3)));
        assert!(u.pow(3).integrate(&p()).is_zero());
        assert_eq!(moment_at(2, 2), crate::exact::rat(1, 5));
    }

    #[test]
    fn display_is_readable() {
        let f = UPoly::monomial(2, 0, RatFn::ratio(-1, 2)) + UPoly::lambda2();
        assert_eq!(f.to_string(), "[-1/2]u^2 + [1]lambda^2");
    }
}
