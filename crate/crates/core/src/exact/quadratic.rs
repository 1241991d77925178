use std::ops::{Add, Mul, Neg, Sub};

use super::{ExactError, RatFn};

/// Element `a + b·s` of the quadratic extension `RatFn[s]/(s² − d)`.
///
/// Used to keep square roots of non-square rational functions exact.
/// Mixing elements of different extensions panics.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuadExt {
    pub a: RatFn,
    pub b: RatFn,
    d: RatFn,
}

impl QuadExt {
    pub fn new(a: RatFn, b: RatFn, d: RatFn) -> Self {
        QuadExt { a, b, d }
    }

    pub fn from_base(a: RatFn, d: &RatFn) -> Self {
        QuadExt { a, b: RatFn::zero(), d: d.clone() }
    }

    /// The adjoined square root `s`.
    pub fn sqrt_of(d: &RatFn) -> Self {
        QuadExt { a: RatFn::zero(), b: RatFn::one(), d: d.clone() }
    }

    pub fn radicand(&self) -> &RatFn {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conj(&self) -> QuadExt {
        QuadExt { a: self.a.clone(), b: -&self.b, d: self.d.clone() }
    }

    /// `a² − d b²`; the element is invertible iff this is nonzero.
    pub fn norm(&self) -> RatFn {
        &(&self.a * &self.a) - &(&self.d * &(&self.b * &self.b))
    }

    pub fn inv(&self) -> Result<QuadExt, ExactError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        let c = self.conj();
        Ok(QuadExt { a: c.a.checked_div(&n)?, b: c.b.checked_div(&n)?, d: self.d.clone() })
    }

    pub fn scale(&self, k: &RatFn) -> QuadExt {
        QuadExt { a: &self.a * k, b: &self.b * k, d: self.d.clone() }
    }

    /// Float value choosing the positive square root, at the given `m`.
    pub fn eval_f64(&self, m0: f64) -> f64 {
        self.a.eval_f64(m0) + self.b.eval_f64(m0) * self.d.eval_f64(m0).sqrt()
    }

    fn check(&self, o: &QuadExt) {
        assert_eq!(self.d, o.d, "elements of different quadratic extensions");
    }
}

impl Add for &QuadExt {
    type Output = QuadExt;
    fn add(self, o: &QuadExt) -> QuadExt {
        self.check(o);
        QuadExt { a: &self.a + &o.a, b: &self.b + &o.b, d: self.d.clone() }
    }
}

impl Sub for &QuadExt {
    type Output = QuadExt;
    fn sub(self, o: &QuadExt) -> QuadExt {
        self.check(o);
        QuadExt { a: &self.a - &o.a, b: &self.b - &o.b, d: self.d.clone() }
    }
}

impl Mul for &QuadExt {
    type Output = QuadExt;
    fn mul(self, o: &QuadExt) -> QuadExt {
        self.check(o);
        let a = &(&self.a * &o.a) + &(&self.d * &(&self.b * &o.b));
        let b = &(&self.a * &o.b) + &(&self.b * &o.a);
        QuadExt { a, b, d: self.d.clone() }
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_squares_to_radicand() {
        let d = RatFn::m() + RatFn::int(5);
        let s = QuadExt::sqrt_of(&d);
        assert_eq!(&s * &s, QuadExt::from_base(d.clone(), &d));
    }

    #[test]
    fn inverse_roundtrip() {
        let d = RatFn::int(3);
        let x = QuadExt::new(RatFn::int(1), RatFn::m(), d.clone());
        let y = x.inv().unwrap();
        assert_eq!(&x * &y, QuadExt::from_base(RatFn::one(), &d));
    }
}
