use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{ExactError, Poly, Rat};

/// Rational function of the symbol `m`.
///
/// Canonical form: numerator and denominator coprime, both with integer
/// coefficients whose joint content is 1, and a positive leading
/// denominator coefficient. Two equal functions are therefore
/// structurally equal, so `==` is mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn {
    num: Poly,
    den: Poly,
}

impl Default for RatFn {
    fn default() -> Self {
        RatFn::zero()
    }
}

impl RatFn {
    pub fn zero() -> Self {
        RatFn { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFn::int(1)
    }

    pub fn int(n: i64) -> Self {
        RatFn::constant(Rat::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        RatFn::constant(Rat::new(n.into(), d.into()))
    }

    pub fn constant(c: Rat) -> Self {
        RatFn::from_polys(Poly::constant(c), Poly::one()).expect("nonzero denominator")
    }

    /// The symbol `m`.
    pub fn m() -> Self {
        RatFn::from_polys(Poly::m(), Poly::one()).expect("nonzero denominator")
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFn::from_polys(p, Poly::one()).expect("nonzero denominator")
    }

    pub fn from_polys(num: Poly, den: Poly) -> Result<Self, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(RatFn::normalize(num, den))
    }

    fn normalize(num: Poly, den: Poly) -> Self {
        if num.is_zero() {
            return RatFn::zero();
        }
        if num.is_constant() && den.is_constant() {
            let q = num.coeff(0) / den.coeff(0);
            return RatFn { num: Poly::constant(Rat::from_integer(q.numer().clone())), den: Poly::constant(Rat::from_integer(q.denom().clone())) };
        }
        let g = Poly::gcd(&num, &den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let l = num.denominator_lcm().lcm(&den.denominator_lcm());
        let lr = Rat::from_integer(l);
        let (num, den) = (num.scale(&lr), den.scale(&lr));
        let mut content = num.numerator_gcd().gcd(&den.numerator_gcd());
        if den.lead().is_negative() {
            content = -content;
        }
        let cr = Rat::from_integer(content).recip();
        RatFn { num: num.scale(&cr), den: den.scale(&cr) }
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The value when the function does not depend on `m`.
    pub fn as_constant(&self) -> Option<Rat> {
        self.is_constant().then(|| self.num.coeff(0) / self.den.coeff(0))
    }

    pub fn inv(&self) -> Result<RatFn, ExactError> {
        RatFn::from_polys(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &RatFn) -> Result<RatFn, ExactError> {
        Ok(self * &rhs.inv()?)
    }

    pub fn pow(&self, e: u32) -> RatFn {
        RatFn::normalize(self.num.pow(e), self.den.pow(e))
    }

    pub fn eval(&self, m0: &Rat) -> Result<Rat, ExactError> {
        let d = self.den.eval(m0);
        if d.is_zero() {
            return Err(ExactError::Pole { at: m0.to_string() });
        }
        Ok(self.num.eval(m0) / d)
    }

    pub fn eval_int(&self, m0: i64) -> Result<Rat, ExactError> {
        self.eval(&Rat::from_integer(m0.into()))
    }

    pub fn eval_f64(&self, m0: f64) -> f64 {
        self.num.eval_f64(m0) / self.den.eval_f64(m0)
    }

    /// Float value of a constant function; NaN if it depends on `m`.
    pub fn to_f64(&self) -> f64 {
        self.as_constant().and_then(|c| c.to_f64()).unwrap_or(f64::NAN)
    }

    /// `f(m + c)`.
    pub fn shift(&self, c: &Rat) -> RatFn {
        RatFn::normalize(self.num.shift(c), self.den.shift(c))
    }

    /// Factored display, e.g. `-24(m-1)(4m^3-m^2+m+2)/((m+1)(2m+1)(2m+3)(3m+2))`.
    ///
    /// Rational roots are split off as integer linear factors; what remains
    /// is printed as one primitive factor. This is the canonical text form:
    /// it is unique for a given function and parses back with `FromStr`.
    pub fn to_factored(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let (cn, fnum) = factor_integer_poly(&self.num);
        let (cd, fden) = factor_integer_poly(&self.den);
        let c = cn / cd;
        let mut out = String::new();
        let p = c.numer().clone();
        let q = c.denom().clone();
        let nf = render_factors(&fnum);
        if nf.is_empty() {
            out.push_str(&p.to_string());
        } else {
            if p == -BigInt::one() {
                out.push('-');
            } else if !p.is_one() {
                out.push_str(&p.to_string());
            }
            out.push_str(&nf);
        }
        let df = render_factors(&fden);
        if !fden.is_empty() || !q.is_one() {
            out.push('/');
            let body = if q.is_one() { df } else { format!("{q}{df}") };
            if fden.is_empty() || (q.is_one() && fden.len() == 1) {
                out.push_str(&body);
            } else {
                out.push('(');
                out.push_str(&body);
                out.push(')');
            }
        }
        out
    }

    /// Expanded canonical form `(num)/(den)` with integer coefficients.
    pub fn to_expanded(&self) -> String {
        if self.den == Poly::one() {
            return self.num.to_string();
        }
        format!("({})/({})", self.num, self.den)
    }
}

/// One factor of an integer polynomial: base (primitive, positive lead) and multiplicity.
struct Factor {
    base: Poly,
    power: u32,
}

/// `p = c * prod(factors)` with rational-root linear factors first (sorted
/// by leading coefficient then constant term) and at most one residual factor.
fn factor_integer_poly(p: &Poly) -> (Rat, Vec<Factor>) {
    let (c, mut rest) = p.primitive_part();
    let mut linear: Vec<(Poly, u32)> = Vec::new();
    while rest.degree().unwrap_or(0) >= 1 {
        let Some(root) = rational_root(&rest) else { break };
        let lin = Poly::from_coeffs(vec![-root.numer().clone(), root.denom().clone()].into_iter().map(Rat::from_integer).collect());
        let (q, r) = rest.div_rem(&lin);
        debug_assert!(r.is_zero());
        rest = q;
        match linear.iter_mut().find(|(b, _)| *b == lin) {
            Some(entry) => entry.1 += 1,
            None => linear.push((lin, 1)),
        }
    }
    let (c2, rest) = rest.primitive_part();
    let c = c * c2;
    linear.sort_by(|(a, _), (b, _)| (a.coeff(1), a.coeff(0)).cmp(&(b.coeff(1), b.coeff(0))));
    let mut factors: Vec<Factor> = linear.into_iter().map(|(base, power)| Factor { base, power }).collect();
    if rest.degree().unwrap_or(0) >= 1 {
        factors.push(Factor { base: rest, power: 1 });
    }
    (c, factors)
}

/// A rational root of a primitive integer polynomial, if any.
fn rational_root(p: &Poly) -> Option<Rat> {
    if p.coeff(0).is_zero() {
        return Some(Rat::zero());
    }
    let a0 = p.coeff(0).numer().abs();
    let an = p.lead().numer().abs();
    let pd = divisors(&a0);
    let qd = divisors(&an);
    let mut cands: Vec<Rat> = Vec::new();
    for q in &qd {
        for d in &pd {
            let r = Rat::new(d.clone(), q.clone());
            cands.push(r.clone());
            cands.push(-r);
        }
    }
    cands.sort();
    cands.dedup();
    cands.into_iter().find(|r| p.eval(r).is_zero())
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.to_u64().expect("coefficient too large to factor");
    let mut out = Vec::new();
    let mut k = 1u64;
    while k * k <= n {
        if n % k == 0 {
            out.push(BigInt::from(k));
            if k * k != n {
                out.push(BigInt::from(n / k));
            }
        }
        k += 1;
    }
    out
}

fn render_factors(fs: &[Factor]) -> String {
    let mut s = String::new();
    for f in fs {
        let body = if f.base == Poly::m() { "m".to_string() } else { format!("({})", f.base) };
        s.push_str(&body);
        if f.power > 1 {
            s.push_str(&format!("^{}", f.power));
        }
    }
    s
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_factored())
    }
}

impl FromStr for RatFn {
    type Err = ExactError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        super::parse::parse_ratfn(s)
    }
}

impl From<i64> for RatFn {
    fn from(n: i64) -> Self {
        RatFn::int(n)
    }
}

impl From<Rat> for RatFn {
    fn from(c: Rat) -> Self {
        RatFn::constant(c)
    }
}

impl From<Poly> for RatFn {
    fn from(p: Poly) -> Self {
        RatFn::from_poly(p)
    }
}

impl Add for &RatFn {
    type Output = RatFn;
    fn add(self, rhs: &RatFn) -> RatFn {
        if self.den == rhs.den {
            return RatFn::normalize(&self.num + &rhs.num, self.den.clone());
        }
        RatFn::normalize(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub for &RatFn {
    type Output = RatFn;
    fn sub(self, rhs: &RatFn) -> RatFn {
        self + &(-rhs)
    }
}

impl Mul for &RatFn {
    type Output = RatFn;
    fn mul(self, rhs: &RatFn) -> RatFn {
        if self.is_zero() || rhs.is_zero() {
            return RatFn::zero();
        }
        RatFn::normalize(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

/// Panics on division by the zero function; use [`RatFn::checked_div`] to handle it.
impl Div for &RatFn {
    type Output = RatFn;
    fn div(self, rhs: &RatFn) -> RatFn {
        self.checked_div(rhs).expect("division by the zero rational function")
    }
}

impl Neg for &RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        RatFn { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFn {
    type Output = RatFn;
    fn neg(self) -> RatFn {
        -&self
    }
}

macro_rules! owned_binops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<RatFn> for RatFn {
            type Output = RatFn;
            fn $f(self, rhs: RatFn) -> RatFn { (&self).$f(&rhs) }
        }
        impl $tr<&RatFn> for RatFn {
            type Output = RatFn;
            fn $f(self, rhs: &RatFn) -> RatFn { (&self).$f(rhs) }
        }
        impl $tr<RatFn> for &RatFn {
            type Output = RatFn;
            fn $f(self, rhs: RatFn) -> RatFn { self.$f(&rhs) }
        }
    )*};
}
owned_binops!(Add add, Sub sub, Mul mul, Div div);

macro_rules! int_binops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<i64> for RatFn {
            type Output = RatFn;
            fn $f(self, rhs: i64) -> RatFn { (&self).$f(&RatFn::int(rhs)) }
        }
        impl $tr<i64> for &RatFn {
            type Output = RatFn;
            fn $f(self, rhs: i64) -> RatFn { self.$f(&RatFn::int(rhs)) }
        }
    )*};
}
int_binops!(Add add, Sub sub, Mul mul, Div div);

impl std::iter::Sum for RatFn {
    fn sum<I: Iterator<Item = RatFn>>(iter: I) -> RatFn {
        iter.fold(RatFn::zero(), |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> RatFn {
        RatFn::m()
    }

    #[test]
    fn additive_inverse_is_zero() {
        let a = RatFn::one() / m();
        assert!((&a + &(-&a)).is_zero());
    }

    #[test]
    fn canonical_form_is_unique() {
        let a = (m() * 2 - RatFn::int(2)) / (m() * m() - RatFn::one());
        let b = RatFn::int(2) / (m() + RatFn::one());
        assert_eq!(a, b);
        let c = RatFn::int(-1) / (RatFn::int(1) - m());
        assert_eq!(c, RatFn::one() / (m() - RatFn::one()));
        assert!(c.denom().lead() > Rat::zero());
    }

    #[test]
    fn evaluation_examples() {
        let a = (m() - RatFn::int(2)) / (m() * 3 + RatFn::int(2));
        assert_eq!(a.eval_int(2).unwrap(), Rat::zero());
        let b = -(m() * m() * 4 + m() - RatFn::int(2)) / (m() * 3 + RatFn::int(2));
        assert_eq!(b.eval_int(2).unwrap(), Rat::from_integer((-2).into()));
        let pole = RatFn::one() / (m() - RatFn::one());
        assert!(matches!(pole.eval_int(1), Err(ExactError::Pole { .. })));
    }

    #[test]
    fn factored_display() {
        let lin = |a: i64, b: i64| m() * a + RatFn::int(b);
        let cubic = RatFn::from_poly(Poly::from_ints(&[2, 1, -1, 4]));
        let total = RatFn::int(-24) * lin(1, -1) * cubic / (lin(1, 1) * lin(2, 1) * lin(2, 3) * lin(3, 2));
        assert_eq!(total.to_factored(), "-24(m-1)(4m^3-m^2+m+2)/((m+1)(2m+1)(2m+3)(3m+2))");
        assert_eq!((RatFn::int(-2) / lin(1, 1)).to_factored(), "-2/(m+1)");
        let h3 = RatFn::int(4) * m() * RatFn::from_poly(Poly::from_ints(&[2, 5, 1])) / (lin(1, 1) * lin(3, 2));
        assert_eq!(h3.to_factored(), "4m(m^2+5m+2)/((m+1)(3m+2))");
        assert_eq!((RatFn::int(-8) * m().pow(3) / (lin(1, 1) * lin(3, 2))).to_factored(), "-8m^3/((m+1)(3m+2))");
        assert_eq!(RatFn::ratio(-32, 35).to_factored(), "-32/35");
        assert_eq!((m() / RatFn::int(2)).to_factored(), "m/2");
        assert_eq!((RatFn::one() / (m() * 4)).to_factored(), "1/(4m)");
        assert_eq!((RatFn::int(3) / (m() * m() * 4)).to_factored(), "3/(4m^2)");
    }

    #[test]
    fn expanded_display() {
        let a = (m() - RatFn::int(2)) / (m() * 3 + RatFn::int(2));
        assert_eq!(a.to_expanded(), "(m-2)/(3m+2)");
    }
}
