//! Formal scalars and symmetric 2-tensors over a closed set of ingredients.
//!
//! A [`Scalar`] is a polynomial in [`Sym`]s (function values, gradient
//! pairings, Laplacians) with rational-function coefficients. A
//! [`TensorExpr`] attaches a scalar coefficient to each [`Atom`]; products
//! such as `u∇²u` or `u·h` are an atom times a scalar, so the atom set stays
//! small and equality of expressions is decidable term by term.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::VariationError;
use crate::exact::RatFn;

/// Named scalar functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Func {
    U,
    V,
    W,
    Psi,
    /// Trace `H = Tr h` of the deformation `h`.
    H,
    Ftt,
    Fttt,
    Fst,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::U => "u",
            Func::V => "v",
            Func::W => "w",
            Func::Psi => "psi",
            Func::H => "H",
            Func::Ftt => "f_tt",
            Func::Fttt => "f_ttt",
            Func::Fst => "f_st",
        }
    }
}

/// Generators of the scalar polynomial ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Val(Func),
    /// `⟨∇a, ∇b⟩`, stored with `a ≤ b`.
    Grad(Func, Func),
    Lap(Func),
    /// `⟨h, ∇²u⟩`.
    HessPair,
    /// Scalar curvature of the background metric.
    Curv,
    /// The constant `⨍u³`.
    MeanU3,
}

impl Sym {
    pub fn grad(a: Func, b: Func) -> Sym {
        if a <= b {
            Sym::Grad(a, b)
        } else {
            Sym::Grad(b, a)
        }
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Val(a) => write!(f, "{}", a.name()),
            Sym::Grad(a, b) if a == b => write!(f, "|∇{}|²", a.name()),
            Sym::Grad(a, b) => write!(f, "<∇{},∇{}>", a.name(), b.name()),
            Sym::Lap(a) => write!(f, "Δ{}", a.name()),
            Sym::HessPair => write!(f, "<h,∇²u>"),
            Sym::Curv => write!(f, "R"),
            Sym::MeanU3 => write!(f, "⨍u³"),
        }
    }
}

/// Polynomial in [`Sym`]s; monomials are sorted lists of generators.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Scalar {
    terms: BTreeMap<Vec<Sym>, RatFn>,
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn constant(c: RatFn) -> Self {
        Scalar::monomial(Vec::new(), c)
    }

    pub fn int(k: i64) -> Self {
        Scalar::constant(RatFn::int(k))
    }

    pub fn monomial(mut syms: Vec<Sym>, c: RatFn) -> Self {
        syms.sort();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(syms, c);
        }
        Scalar { terms }
    }

    pub fn sym(s: Sym) -> Self {
        Scalar::monomial(vec![s], RatFn::one())
    }

    pub fn val(a: Func) -> Self {
        Scalar::sym(Sym::Val(a))
    }

    pub fn grad(a: Func, b: Func) -> Self {
        Scalar::sym(Sym::grad(a, b))
    }

    pub fn lap(a: Func) -> Self {
        Scalar::sym(Sym::Lap(a))
    }

    /// `Δ(ab) = aΔb + 2⟨∇a,∇b⟩ + bΔa`.
    pub fn lap_of_product(a: Func, b: Func) -> Self {
        &(&(&Scalar::val(a) * &Scalar::lap(b)) + &Scalar::grad(a, b).scale(&RatFn::int(2))) + &(&Scalar::val(b) * &Scalar::lap(a))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Sym>, &RatFn)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, syms: &[Sym]) -> RatFn {
        let mut key = syms.to_vec();
        key.sort();
        self.terms.get(&key).cloned().unwrap_or_else(RatFn::zero)
    }

    fn add_term(&mut self, key: Vec<Sym>, c: &RatFn) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert_with(RatFn::zero);
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn scale(&self, c: &RatFn) -> Scalar {
        let mut out = Scalar::zero();
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &(v * c));
        }
        out
    }

    /// Replaces every generator by a scalar and expands.
    pub fn substitute(&self, f: &impl Fn(Sym) -> Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (k, c) in &self.terms {
            let prod = k.iter().fold(Scalar::constant(c.clone()), |acc, s| &acc * &f(*s));
            out = &out + &prod;
        }
        out
    }

    /// Renames functions; gradient pairs are re-normalized.
    pub fn rename(&self, map: &impl Fn(Func) -> Func) -> Scalar {
        self.substitute(&|s| Scalar::sym(rename_sym(s, map)))
    }

    /// Maps every monomial to a value in a commutative ring.
    pub fn evaluate<T: Clone>(
        &self,
        zero: T,
        coeff: &impl Fn(&RatFn) -> T,
        sym: &mut impl FnMut(Sym) -> Result<T, VariationError>,
        add: &impl Fn(&T, &T) -> T,
        mul: &impl Fn(&T, &T) -> T,
    ) -> Result<T, VariationError> {
        let mut acc = zero;
        for (k, c) in &self.terms {
            let mut term = coeff(c);
            for s in k {
                term = mul(&term, &sym(*s)?);
            }
            acc = add(&acc, &term);
        }
        Ok(acc)
    }

    /// Generators that occur.
    pub fn symbols(&self) -> Vec<Sym> {
        let mut out: Vec<Sym> = self.terms.keys().flatten().copied().collect();
        out.sort();
        out.dedup();
        out
    }
}

fn rename_sym(s: Sym, map: &impl Fn(Func) -> Func) -> Sym {
    match s {
        Sym::Val(a) => Sym::Val(map(a)),
        Sym::Grad(a, b) => Sym::grad(map(a), map(b)),
        Sym::Lap(a) => Sym::Lap(map(a)),
        other => other,
    }
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c);
        }
        out
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &-rhs
    }
}

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.scale(&RatFn::int(-1))
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        let mut out = Scalar::zero();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &rhs.terms {
                let mut k: Vec<Sym> = k1.iter().chain(k2).copied().collect();
                k.sort();
                out.add_term(k, &(c1 * c2));
            }
        }
        out
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| {
                let c = c.to_string();
                if k.is_empty() {
                    c
                } else {
                    let syms: Vec<String> = k.iter().map(Sym::to_string).collect();
                    format!("({c})*{}", syms.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Tensor building blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// The metric `g`.
    Metric,
    /// `g₁`, the first factor of a product metric.
    Metric1,
    /// `g₂`, the second factor.
    Metric2,
    /// `½(da⊗db + db⊗da)`, stored with `a ≤ b`; `Sym2(u,u) = du⊗du`.
    Sym2(Func, Func),
    /// `∇²a`.
    Hess(Func),
    /// The deformation `h`.
    Deform,
    /// `Rm(h)`.
    RmDeform,
    /// `Δ(uh)`.
    LapUDeform,
    /// `δ*δ(uh)`.
    DeltaStarDeltaUDeform,
    /// `C^k_ij u_k` with `C^k_ij = ½g^{kl}(∇_i h_jl + ∇_j h_il − ∇_l h_ij)`.
    ChristoffelDu,
}

impl Atom {
    pub fn sym2(a: Func, b: Func) -> Atom {
        if a <= b {
            Atom::Sym2(a, b)
        } else {
            Atom::Sym2(b, a)
        }
    }

    fn rename(self, map: &impl Fn(Func) -> Func) -> Atom {
        match self {
            Atom::Sym2(a, b) => Atom::sym2(map(a), map(b)),
            Atom::Hess(a) => Atom::Hess(map(a)),
            other => other,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Metric => write!(f, "g"),
            Atom::Metric1 => write!(f, "g1"),
            Atom::Metric2 => write!(f, "g2"),
            Atom::Sym2(a, b) if a == b => write!(f, "d{0}⊗d{0}", a.name()),
            Atom::Sym2(a, b) => write!(f, "sym(d{}⊗d{})", a.name(), b.name()),
            Atom::Hess(a) => write!(f, "∇²{}", a.name()),
            Atom::Deform => write!(f, "h"),
            Atom::RmDeform => write!(f, "Rm(h)"),
            Atom::LapUDeform => write!(f, "Δ(uh)"),
            Atom::DeltaStarDeltaUDeform => write!(f, "δ*δ(uh)"),
            Atom::ChristoffelDu => write!(f, "C(h)·∇u"),
        }
    }
}

/// Dimensions used when contracting with a metric.
#[derive(Clone, Debug, PartialEq)]
pub struct Dims {
    pub n: RatFn,
    /// Dimensions of the two factors when the metric is a product.
    pub factors: Option<(RatFn, RatFn)>,
}

impl Dims {
    pub fn single(n: RatFn) -> Self {
        Dims { n, factors: None }
    }

    pub fn product(n1: RatFn, n2: RatFn) -> Self {
        Dims { n: &n1 + &n2, factors: Some((n1, n2)) }
    }

    fn factor_dims(&self) -> Result<(&RatFn, &RatFn), VariationError> {
        self.factors.as_ref().map(|(a, b)| (a, b)).ok_or(VariationError::NotAProduct)
    }
}

/// Symmetric 2-tensor `Σ c_a · a` over [`Atom`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorExpr {
    terms: BTreeMap<Atom, Scalar>,
}

impl TensorExpr {
    pub fn zero() -> Self {
        TensorExpr::default()
    }

    pub fn atom(a: Atom) -> Self {
        TensorExpr::term(a, Scalar::int(1))
    }

    pub fn term(a: Atom, c: Scalar) -> Self {
        let mut t = TensorExpr::zero();
        t.add_term(a, &c);
        t
    }

    fn add_term(&mut self, a: Atom, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(a).or_default();
        *e = &*e + c;
        if e.is_zero() {
            self.terms.remove(&a);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Atom, &Scalar)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: Atom) -> Scalar {
        self.terms.get(&a).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn atoms(&self) -> Vec<Atom> {
        self.terms.keys().copied().collect()
    }

    pub fn scale(&self, c: &Scalar) -> TensorExpr {
        let mut out = TensorExpr::zero();
        for (a, v) in &self.terms {
            out.add_term(*a, &(v * c));
        }
        out
    }

    pub fn scale_rat(&self, c: &RatFn) -> TensorExpr {
        self.scale(&Scalar::constant(c.clone()))
    }

    /// Applies a substitution to every coefficient.
    pub fn map_coeffs(&self, f: &impl Fn(&Scalar) -> Scalar) -> TensorExpr {
        let mut out = TensorExpr::zero();
        for (a, v) in &self.terms {
            out.add_term(*a, &f(v));
        }
        out
    }

    pub fn rename(&self, map: &impl Fn(Func) -> Func) -> TensorExpr {
        let mut out = TensorExpr::zero();
        for (a, v) in &self.terms {
            out.add_term(a.rename(map), &v.rename(map));
        }
        out
    }

    /// Replaces `∇²a` by a tensor expression, e.g. to expand the Hessian of a
    /// function of `u`.
    pub fn expand_hessian(&self, a: Func, by: &TensorExpr) -> TensorExpr {
        let mut out = TensorExpr::zero();
        for (atom, c) in &self.terms {
            if *atom == Atom::Hess(a) {
                out = &out + &by.scale(c);
            } else {
                out.add_term(*atom, c);
            }
        }
        out
    }

    /// `⟨T, g⟩` on an Einstein background with constant ½.
    ///
    /// Atoms involving `h` use `δh = 0`:
    /// `tr Rm(h) = Rc·h = H/2`, `tr Δ(uh) = Δ(uH)`,
    /// `tr δ*δ(uh) = −⟨h, ∇²u⟩`, `tr C(h)·∇u = −½⟨∇H, ∇u⟩`.
    pub fn trace(&self, dims: &Dims) -> Result<Scalar, VariationError> {
        let mut out = Scalar::zero();
        for (a, c) in &self.terms {
            let t = match a {
                Atom::Metric => Scalar::constant(dims.n.clone()),
                Atom::Metric1 => Scalar::constant(dims.factor_dims()?.0.clone()),
                Atom::Metric2 => Scalar::constant(dims.factor_dims()?.1.clone()),
                Atom::Sym2(x, y) => Scalar::grad(*x, *y),
                Atom::Hess(x) => Scalar::lap(*x),
                Atom::Deform => Scalar::val(Func::H),
                Atom::RmDeform => Scalar::val(Func::H).scale(&RatFn::ratio(1, 2)),
                Atom::LapUDeform => Scalar::lap_of_product(Func::U, Func::H),
                Atom::DeltaStarDeltaUDeform => -&Scalar::sym(Sym::HessPair),
                Atom::ChristoffelDu => Scalar::grad(Func::H, Func::U).scale(&RatFn::ratio(-1, 2)),
            };
            out = &out + &(c * &t);
        }
        Ok(out)
    }

    /// `⟨T, g₁⟩` on a product, for tensors built from functions on the first
    /// factor: `⟨g, g₁⟩ = ⟨g₁, g₁⟩ = n₁`, `⟨g₂, g₁⟩ = 0`, and derivative atoms
    /// of first-factor functions are tangent to it.
    pub fn pair_first_factor(&self, dims: &Dims) -> Result<Scalar, VariationError> {
        let (n1, _) = dims.factor_dims()?;
        let mut out = Scalar::zero();
        for (a, c) in &self.terms {
            let t = match a {
                Atom::Metric | Atom::Metric1 => Scalar::constant(n1.clone()),
                Atom::Metric2 => Scalar::zero(),
                Atom::Sym2(x, y) => Scalar::grad(*x, *y),
                Atom::Hess(x) => Scalar::lap(*x),
                other => return Err(VariationError::UnsupportedAtom(other.to_string())),
            };
            out = &out + &(c * &t);
        }
        Ok(out)
    }
}

impl std::ops::Add for &TensorExpr {
    type Output = TensorExpr;
    fn add(self, rhs: &TensorExpr) -> TensorExpr {
        let mut out = self.clone();
        for (a, c) in &rhs.terms {
            out.add_term(*a, c);
        }
        out
    }
}

impl std::ops::Sub for &TensorExpr {
    type Output = TensorExpr;
    fn sub(self, rhs: &TensorExpr) -> TensorExpr {
        self + &rhs.scale(&Scalar::int(-1))
    }
}

impl fmt::Display for TensorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(a, c)| format!("[{c}] {a}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Shorthand for building coefficients.
pub(crate) fn cst(k: &RatFn) -> Scalar {
    Scalar::constant(k.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_expands_and_normalizes() {
        let a = &Scalar::val(Func::U) + &Scalar::int(1);
        let sq = &a * &a;
        assert_eq!(sq.coeff(&[Sym::Val(Func::U), Sym::Val(Func::U)]), RatFn::int(1));
        assert_eq!(sq.coeff(&[Sym::Val(Func::U)]), RatFn::int(2));
        assert_eq!(Scalar::grad(Func::V, Func::U), Scalar::grad(Func::U, Func::V));
    }

    #[test]
    fn trace_rules() {
        let dims = Dims::single(RatFn::int(6));
        let t = &TensorExpr::atom(Atom::Metric) + &TensorExpr::atom(Atom::sym2(Func::V, Func::U));
        let tr = t.trace(&dims).unwrap();
        assert_eq!(tr.coeff(&[]), RatFn::int(6));
        assert_eq!(tr.coeff(&[Sym::grad(Func::U, Func::V)]), RatFn::int(1));
        assert!(TensorExpr::atom(Atom::Metric1).trace(&dims).is_err());
    }
}
