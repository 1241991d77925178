//! Pointwise closed forms for first eigenfunctions `w_H = λ ζ*Hζ/|ζ|²`, `ζ = (1, z)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::chart_geometry::metric::hermitian_trace;
use crate::chart_geometry::{metric_at, CMat, ChartPoint, MetricData, TensorValue};

/// A first eigenfunction of the Fubini–Study Laplacian, given by a traceless
/// Hermitian `2m × 2m` matrix on homogeneous coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenFn {
    h: CMat,
    lambda: f64,
    pattern: Option<Vec<i8>>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EigenError {
    #[error("matrix must be square of size 2m = {expected}, got {got}")]
    Size { expected: usize, got: usize },
    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not traceless (trace {0:e})")]
    NotTraceless(f64),
}

impl EigenFn {
    pub fn new(m: usize, h: CMat, lambda: f64) -> Result<Self, EigenError> {
        if h.nrows() != 2 * m || h.ncols() != 2 * m {
            return Err(EigenError::Size { expected: 2 * m, got: h.nrows() });
        }
        let scale = h.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let defect = (&h - h.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if defect > 1e-12 * scale {
            return Err(EigenError::NotHermitian(defect));
        }
        let tr = h.trace().norm();
        if tr > 1e-12 * scale {
            return Err(EigenError::NotTraceless(tr));
        }
        Ok(EigenFn { h, lambda, pattern: None })
    }

    pub fn diagonal(diag: &[f64], lambda: f64) -> Result<Self, EigenError> {
        let n = diag.len();
        let h = CMat::from_fn(n, n, |i, j| if i == j { Complex64::new(diag[i], 0.0) } else { Complex64::new(0.0, 0.0) });
        EigenFn::new(n / 2, h, lambda)
    }

    /// The distinguished `u = λ(A − B)/S`: sign pattern `(+^m, −^m)`.
    pub fn balanced(m: usize, lambda: f64) -> Self {
        let pattern: Vec<i8> = (0..2 * m).map(|k| if k < m { 1 } else { -1 }).collect();
        let diag: Vec<f64> = pattern.iter().map(|&e| f64::from(e)).collect();
        let mut f = EigenFn::diagonal(&diag, lambda).expect("balanced pattern is traceless");
        f.pattern = Some(pattern);
        f
    }

    pub fn matrix(&self) -> &CMat {
        &self.h
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn pattern(&self) -> Option<&[i8]> {
        self.pattern.as_deref()
    }

    fn parts(&self, p: &ChartPoint) -> (Vec<Complex64>, Complex64, Vec<Complex64>, Vec<Complex64>, f64) {
        let zeta = p.homogeneous();
        let n = zeta.len();
        let s: f64 = zeta.iter().map(Complex64::norm_sqr).sum();
        // (ζ*H)_a and (Hζ)_a
        let row: Vec<Complex64> = (0..n).map(|a| (0..n).map(|b| zeta[b].conj() * self.h[(b, a)]).sum()).collect();
        let col: Vec<Complex64> = (0..n).map(|a| (0..n).map(|b| self.h[(a, b)] * zeta[b]).sum()).collect();
        let big_n: Complex64 = (0..n).map(|a| zeta[a].conj() * col[a]).sum();
        (zeta, big_n, row, col, s)
    }

    pub fn value(&self, p: &ChartPoint) -> f64 {
        let (_, big_n, _, _, s) = self.parts(p);
        self.lambda * big_n.re / s
    }

    /// `∂_i w`, holomorphic components.
    pub fn grad(&self, p: &ChartPoint) -> Vec<Complex64> {
        let (_, big_n, row, _, s) = self.parts(p);
        let z = p.z();
        (0..p.nc()).map(|i| (row[i + 1] / s - big_n * z[i].conj() / (s * s)) * self.lambda).collect()
    }

    /// `∇²w`; only the (1,1) block is nonzero for first eigenfunctions.
    pub fn hess(&self, p: &ChartPoint) -> TensorValue {
        let (_, big_n, row, col, s) = self.parts(p);
        let z = p.z();
        let n = p.nc();
        let herm = CMat::from_fn(n, n, |i, j| {
            let mut v = self.h[(j + 1, i + 1)] / s - row[i + 1] * z[j] / (s * s) - col[j + 1] * z[i].conj() / (s * s)
                + big_n * 2.0 * z[i].conj() * z[j] / (s * s * s);
            if i == j {
                v -= big_n / (s * s);
            }
            v * self.lambda
        });
        TensorValue::hermitian(herm)
    }
}

/// `u = λ(A − B)/S`.
pub fn u_at(p: &ChartPoint, lambda: f64) -> f64 {
    lambda * (p.a() - p.b()) / p.s()
}

/// `u_i = 2λB z̄_i/S²` on the "+" block, `−2λA z̄_i/S²` on the "−" block.
pub fn grad_u_at(p: &ChartPoint, lambda: f64) -> Vec<Complex64> {
    let s2 = p.s() * p.s();
    p.z()
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let k = if p.in_plus_block(i) { p.b() } else { -p.a() };
            z.conj() * (2.0 * lambda * k / s2)
        })
        .collect()
}

/// Block-wise closed form of `u_{ij̄}`; the (2,0) part vanishes.
pub fn hess_u_at(p: &ChartPoint, lambda: f64) -> TensorValue {
    let n = p.nc();
    let (a, b, s) = (p.a(), p.b(), p.s());
    let z = p.z();
    let herm = CMat::from_fn(n, n, |i, j| {
        let zz = z[i].conj() * z[j];
        let delta = if i == j { 1.0 } else { 0.0 };
        match (p.in_plus_block(i), p.in_plus_block(j)) {
            (true, true) => (Complex64::new(delta, 0.0) - zz * (2.0 / s)) * (2.0 * lambda * b / (s * s)),
            (false, false) => (Complex64::new(delta, 0.0) - zz * (2.0 / s)) * (-2.0 * lambda * a / (s * s)),
            _ => zz * (2.0 * lambda * (a - b) / (s * s * s)),
        }
    });
    TensorValue::hermitian(herm)
}

/// `ξ_{ij̄} = g^{k̄l} u_{ik̄} u_{lj̄}` by contraction and by its closed combination.
#[derive(Clone, Debug)]
pub struct XiValue {
    pub contraction: CMat,
    pub combination: CMat,
}

impl XiValue {
    pub fn mismatch(&self) -> f64 {
        (&self.contraction - &self.combination).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

pub fn xi_at(p: &ChartPoint, lambda: f64) -> XiValue {
    let md = metric_at(p);
    let h = hess_u_at(p, lambda).herm;
    let n = p.nc();
    let contraction = CMat::from_fn(n, n, |i, j| {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            for l in 0..n {
                acc += h[(i, k)] * md.g_inv[(l, k)] * h[(l, j)];
            }
        }
        acc
    });
    let m = p.m() as f64;
    let u = u_at(p, lambda);
    let du = grad_u_at(p, lambda);
    let combination = CMat::from_fn(n, n, |i, j| {
        md.g[(i, j)] * ((lambda * lambda - u * u) / (16.0 * m * m)) - du[i] * du[j].conj() / (4.0 * m) - h[(i, j)] * (u / (2.0 * m))
    });
    XiValue { contraction, combination }
}

/// `2 g^{ij̄} ξ_{ij̄}`.
pub fn xi_trace(p: &ChartPoint, xi: &XiValue) -> f64 {
    hermitian_trace(&metric_at(p), &xi.contraction)
}

/// Real components of `du` from holomorphic components: `(2 Re u_i, −2 Im u_i)`.
pub fn real_covector(grad: &[Complex64]) -> Vec<f64> {
    grad.iter().map(|c| 2.0 * c.re).chain(grad.iter().map(|c| -2.0 * c.im)).collect()
}

/// `|∇φ|²` from holomorphic components.
pub fn grad_norm_sq(md: &MetricData, grad: &[Complex64]) -> f64 {
    crate::chart_geometry::metric::covector_inner(md, grad, grad)
}

/// Outer product `a ⊗ b` of real covectors.
pub fn outer(a: &[f64], b: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(a.len(), b.len(), |i, j| a[i] * b[j])
}
