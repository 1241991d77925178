//! Exact averages of diagonal polynomials over ℂP^{s−1}.
//!
//! On the unit sphere of ℂ^s the moduli `x_i = |w_i|²` are Dirichlet(1,…,1)
//! distributed, so every average of a polynomial in the `x_i` is rational.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::exact::{rat, Rat};

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `⨍ Π x_i^{a_i} = (s−1)! Π a_i! / (s−1+Σa)!` with `s = a.len()` slots.
pub fn sphere_moment(a: &[u32]) -> Rat {
    let s = a.len() as u64;
    assert!(s > 0, "at least one slot");
    let total: u64 = a.iter().map(|&k| u64::from(k)).sum();
    let num = a.iter().fold(factorial(s - 1), |acc, &k| acc * factorial(u64::from(k)));
    Rat::new(num, factorial(s - 1 + total))
}

/// A polynomial in the moduli `x_0, …, x_{s−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentPoly {
    slots: usize,
    terms: BTreeMap<Vec<u32>, Rat>,
}

impl MomentPoly {
    pub fn zero(slots: usize) -> Self {
        MomentPoly { slots, terms: BTreeMap::new() }
    }

    pub fn constant(slots: usize, c: Rat) -> Self {
        let mut p = Self::zero(slots);
        p.add_term(vec![0; slots], c);
        p
    }

    /// `Σ c_i x_i`.
    pub fn linear(coeffs: &[Rat]) -> Self {
        let slots = coeffs.len();
        let mut p = Self::zero(slots);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; slots];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    /// `r² = Σ x_i`.
    pub fn r2(slots: usize) -> Self {
        Self::linear(&vec![Rat::one(); slots])
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Rat> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms.get(exps).cloned().unwrap_or_else(Rat::zero)
    }

    fn add_term(&mut self, exps: Vec<u32>, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&exps);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.slots, other.slots);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> Self {
        let mut out = Self::zero(self.slots);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.slots, other.slots);
        let mut out = Self::zero(self.slots);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.slots, Rat::one()), |acc, _| acc.mul(self))
    }

    /// Exact average over the sphere.
    pub fn average(&self) -> Rat {
        self.terms.iter().map(|(e, c)| c * sphere_moment(e)).sum()
    }

    /// Euclidean Laplacian on ℂ^s, acting through the moduli:
    /// `Δ_E F = 4 Σ (x_k ∂²F/∂x_k² + ∂F/∂x_k)`.
    pub fn euclid_laplacian(&self) -> Self {
        let mut out = Self::zero(self.slots);
        for (e, c) in &self.terms {
            for k in 0..self.slots {
                let a = e[k];
                if a == 0 {
                    continue;
                }
                // x ∂² x^a + ∂ x^a = a² x^{a−1}
                let mut f = e.clone();
                f[k] -= 1;
                out.add_term(f, c * Rat::from_integer(BigInt::from(4 * a * a)));
            }
        }
        out
    }
}

impl fmt::Display for MomentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &a)| a > 0)
                .map(|(i, &a)| if a == 1 { format!("x{i}") } else { format!("x{i}^{a}") })
                .collect();
            let abs = c.abs();
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{abs}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

/// `⨍ u² w` for diagonal `u = Σ u_i x_i`, `w = Σ w_i x_i` over ℂP^{s−1}.
pub fn criterion_integral(u: &[Rat], w: &[Rat]) -> Rat {
    let pu = MomentPoly::linear(u);
    pu.mul(&pu).mul(&MomentPoly::linear(w)).average()
}

/// `⨍ u^k` for `u = Σ ε_i x_i`, straight from the moment formula.
pub fn power_average(u: &[Rat], k: u32) -> Rat {
    MomentPoly::linear(u).pow(k).average()
}

/// Result of testing whether `Δ_E f²` is a multiple of `Δ_E r⁴ = 8(s+1) r²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EuclidCheck {
    pub lap_f2: String,
    pub lap_r4: String,
    /// `Δ_E f² / Δ_E r⁴` when it is a constant.
    pub ratio: Option<String>,
    /// All `|f_i|` coincide.
    pub abs_equal: bool,
    /// `ratio.is_some() == abs_equal`, the two sides of the equivalence.
    pub consistent: bool,
}

pub fn euclid_laplacian_check(f: &[Rat]) -> EuclidCheck {
    let s = f.len();
    let pf = MomentPoly::linear(f);
    let lap_f2 = pf.mul(&pf).euclid_laplacian();
    let lap_r4 = MomentPoly::r2(s).pow(2).euclid_laplacian();
    let r4_coeff = rat(8 * (s as i64 + 1), 1);
    // lap_r4 is 8(s+1) Σ x_i; lap_f2 must be a multiple of Σ x_i
    let ratio = {
        let mut c: Option<Rat> = None;
        let mut ok = true;
        if lap_f2.is_zero() {
            c = Some(Rat::zero());
        } else {
            for i in 0..s {
                let mut e = vec![0; s];
                e[i] = 1;
                let v = lap_f2.coeff(&e);
                match &c {
                    None => c = Some(v),
                    Some(prev) if *prev != v => ok = false,
                    _ => {}
                }
            }
            let linear_part = lap_f2.terms().keys().all(|e| e.iter().sum::<u32>() == 1);
            ok &= linear_part;
        }
        if ok {
            c.map(|c| c / &r4_coeff)
        } else {
            None
        }
    };
    let abs_equal = f.windows(2).all(|w| w[0].abs() == w[1].abs());
    let consistent = ratio.is_some() == abs_equal;
    EuclidCheck {
        lap_f2: lap_f2.to_string(),
        lap_r4: lap_r4.to_string(),
        ratio: ratio.map(|r| r.to_string()),
        abs_equal,
        consistent,
    }
}

/// Verdict for a ±1 sign pattern on the diagonal.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PatternVerdict {
    pub pattern: Vec<i8>,
    pub balanced: bool,
    /// Traceless projection of the pattern is zero; not an eigenfunction.
    pub degenerate: bool,
    /// Some traceless diagonal `w` has `⨍ u² w ≠ 0`.
    pub obstructed: bool,
    /// Index `k` with `⨍ u² (x_k − x_0) ≠ 0`, if any.
    pub witness: Option<usize>,
    pub witness_value: Option<String>,
}

/// Tests a sign pattern: `u` is the traceless part of `diag(ε)`, and the
/// second-order criterion `⨍ u² w = 0` is checked on the basis `w = x_k − x_0`.
pub fn pattern_verdict(pattern: &[i8]) -> PatternVerdict {
    let s = pattern.len();
    let sum: i64 = pattern.iter().map(|&e| i64::from(e)).sum();
    let mean = rat(sum, s as i64);
    let u: Vec<Rat> = pattern.iter().map(|&e| rat(i64::from(e), 1) - &mean).collect();
    let degenerate = u.iter().all(Zero::is_zero);
    let balanced = sum == 0;
    let mut witness = None;
    let mut witness_value = None;
    if !degenerate {
        for k in 1..s {
            let mut w = vec![Rat::zero(); s];
            w[k] = Rat::one();
            w[0] = -Rat::one();
            let v = criterion_integral(&u, &w);
            if !v.is_zero() {
                witness = Some(k);
                witness_value = Some(v.to_string());
                break;
            }
        }
    }
    PatternVerdict { pattern: pattern.to_vec(), balanced, degenerate, obstructed: witness.is_some(), witness, witness_value }
}

/// Every sign pattern on `s` slots with first entry `+` (the overall sign is irrelevant).
pub fn landscape(s: usize) -> Vec<PatternVerdict> {
    assert!((2..=16).contains(&s), "slot count out of range");
    (0..1u32 << (s - 1))
        .map(|bits| {
            let pattern: Vec<i8> = (0..s).map(|i| if i == 0 || bits >> (i - 1) & 1 == 0 { 1 } else { -1 }).collect();
            pattern_verdict(&pattern)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moment_examples() {
        assert_eq!(sphere_moment(&[1, 0, 0, 0]), rat(1, 4));
        assert_eq!(sphere_moment(&[2, 0, 0, 0]), rat(1, 10));
        assert_eq!(sphere_moment(&[1, 1, 0, 0]), rat(1, 20));
    }

    #[test]
    fn laplacian_of_r4() {
        let r4 = MomentPoly::r2(4).pow(2);
        assert_eq!(r4.euclid_laplacian(), MomentPoly::r2(4).scale(&rat(40, 1)));
    }

    #[test]
    fn balanced_pattern_passes() {
        let v = pattern_verdict(&[1, 1, -1, -1]);
        assert!(v.balanced && !v.obstructed);
        let v = pattern_verdict(&[1, 1, 1, -1]);
        assert!(v.obstructed);
        assert!(pattern_verdict(&[1, 1, 1, 1]).degenerate);
    }
}
