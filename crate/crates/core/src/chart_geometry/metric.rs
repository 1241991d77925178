//! Closed-form Fubini–Study geometry in the chart, normalized to Einstein constant ½.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::point::{CMat, ChartPoint};
use super::tensor::{real_christoffel_from_holomorphic, real_four_tensor, TensorValue};

/// Pointwise metric data from the closed forms
/// `g_{ij̄} = 4m(δ_ij/S − z̄_i z_j/S²)`, `g^{ij̄} = (S/4m)(δ_ij + z_i z̄_j)`,
/// `Γ^k_{ij} = −(δ_ik z̄_j + δ_jk z̄_i)/S`.
#[derive(Clone, Debug)]
pub struct MetricData {
    m: usize,
    /// `g[(i, j)] = g_{ij̄}`.
    pub g: CMat,
    /// `g_inv[(i, j)] = g^{ij̄}`, so that `g · g_invᵀ = I`.
    pub g_inv: CMat,
    christoffel: Vec<Complex64>,
}

pub fn metric_at(p: &ChartPoint) -> MetricData {
    let n = p.nc();
    let m = p.m() as f64;
    let s = p.s();
    let z = p.z();
    let g = CMat::from_fn(n, n, |i, j| {
        let d = if i == j { 1.0 / s } else { 0.0 };
        (Complex64::new(d, 0.0) - z[i].conj() * z[j] / (s * s)) * (4.0 * m)
    });
    let g_inv = CMat::from_fn(n, n, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        (Complex64::new(d, 0.0) + z[i] * z[j].conj()) * (s / (4.0 * m))
    });
    let mut christoffel = vec![Complex64::new(0.0, 0.0); n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut v = Complex64::new(0.0, 0.0);
                if i == k {
                    v += z[j].conj();
                }
                if j == k {
                    v += z[i].conj();
                }
                christoffel[(k * n + i) * n + j] = -v / s;
            }
        }
    }
    MetricData { m: p.m(), g, g_inv, christoffel }
}

impl MetricData {
    pub fn nc(&self) -> usize {
        self.g.nrows()
    }

    /// `Γ^k_{ij}`.
    pub fn christoffel(&self, k: usize, i: usize, j: usize) -> Complex64 {
        let n = self.nc();
        self.christoffel[(k * n + i) * n + j]
    }

    /// `R_{ij̄kl̄} = (1/4m)(g_{ij̄} g_{kl̄} + g_{il̄} g_{kj̄})`.
    pub fn curvature(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        (self.g[(i, j)] * self.g[(k, l)] + self.g[(i, l)] * self.g[(k, j)]) / (4.0 * self.m as f64)
    }

    pub fn real_metric(&self) -> DMatrix<f64> {
        TensorValue::hermitian(self.g.clone()).to_real()
    }

    /// Real Christoffel symbols, `Γ^f_{ab}` at `[(f·d + a)·d + b]`.
    pub fn real_christoffel(&self) -> Vec<f64> {
        real_christoffel_from_holomorphic(&self.christoffel, self.nc())
    }

    /// Real covariant curvature `R_abcd = ⟨R(∂_a,∂_b)∂_c, ∂_d⟩` from the closed form.
    ///
    /// On the complex basis only the components with one barred index in
    /// each antisymmetric pair survive; they all follow from `R_{ij̄kl̄}`.
    pub fn real_curvature(&self) -> Vec<f64> {
        let n = self.nc();
        real_four_tensor(n, |a, b, c, d| {
            let (ab, bb, cb, db) = (a >= n, b >= n, c >= n, d >= n);
            if ab == bb || cb == db {
                return Complex64::new(0.0, 0.0);
            }
            let (i, j, sign1) = if !ab { (a, b - n, 1.0) } else { (b, a - n, -1.0) };
            let (k, l, sign2) = if !cb { (c, d - n, 1.0) } else { (d, c - n, -1.0) };
            self.curvature(i, j, k, l) * (sign1 * sign2)
        })
    }

    /// Real inverse metric.
    pub fn real_metric_inverse(&self) -> DMatrix<f64> {
        self.real_metric().try_inverse().expect("Fubini-Study metric is positive definite")
    }
}

/// `2 g^{ij̄} h_{ij̄}`, the trace of a (1,1) tensor.
pub fn hermitian_trace(md: &MetricData, herm: &CMat) -> f64 {
    let n = md.nc();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += md.g_inv[(i, j)] * herm[(i, j)];
        }
    }
    2.0 * acc.re
}

/// `2 g^{ij̄} a_i b̄_j` for holomorphic covectors; `|∇φ|²` when `a = b = ∂φ`.
pub fn covector_inner(md: &MetricData, a: &[Complex64], b: &[Complex64]) -> f64 {
    let n = md.nc();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += md.g_inv[(i, j)] * a[i] * b[j].conj();
        }
    }
    2.0 * acc.re
}
