//! Complex block tensors and their real-coordinate components.
//!
//! Real coordinates are ordered `(x₁…x_n, y₁…y_n)` with `z = x + iy`, so
//! `∂_x = ∂ + ∂̄` and `∂_y = i(∂ − ∂̄)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::point::CMat;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Symmetric real 2-tensor split by type: `herm[i][j] = h_{ij̄}`,
/// `holo[i][j] = h_{ij}`, with `h_{īj̄}` the conjugate of `h_{ij}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorValue {
    pub herm: CMat,
    pub holo: CMat,
}

impl TensorValue {
    pub fn zero(nc: usize) -> Self {
        TensorValue { herm: CMat::zeros(nc, nc), holo: CMat::zeros(nc, nc) }
    }

    pub fn hermitian(herm: CMat) -> Self {
        let n = herm.nrows();
        TensorValue { herm, holo: CMat::zeros(n, n) }
    }

    pub fn holomorphic(holo: CMat) -> Self {
        let n = holo.nrows();
        TensorValue { herm: CMat::zeros(n, n), holo }
    }

    pub fn nc(&self) -> usize {
        self.herm.nrows()
    }

    pub fn scale(&self, c: f64) -> TensorValue {
        TensorValue { herm: &self.herm * Complex64::new(c, 0.0), holo: &self.holo * Complex64::new(c, 0.0) }
    }

    pub fn add(&self, o: &TensorValue) -> TensorValue {
        TensorValue { herm: &self.herm + &o.herm, holo: &self.holo + &o.holo }
    }

    /// Components in the real coordinate basis.
    pub fn to_real(&self) -> DMatrix<f64> {
        let n = self.nc();
        let mut t = DMatrix::zeros(2 * n, 2 * n);
        for j in 0..n {
            for k in 0..n {
                let h = self.herm[(j, k)];
                let hk = self.herm[(k, j)];
                let q = self.holo[(j, k)];
                // T(∂_a, ∂_b) with ∂_x = ∂ + ∂̄, ∂_y = i(∂ − ∂̄).
                let xx = q + h + hk + q.conj();
                let xy = I * q - I * h + I * hk - I * q.conj();
                let yx = I * q + I * h - I * hk - I * q.conj();
                let yy = -q + h + hk - q.conj();
                t[(j, k)] = xx.re;
                t[(j, n + k)] = xy.re;
                t[(n + j, k)] = yx.re;
                t[(n + j, n + k)] = yy.re;
            }
        }
        t
    }

    /// Inverse of [`TensorValue::to_real`] for a symmetric real tensor.
    pub fn from_real(t: &DMatrix<f64>) -> TensorValue {
        let n = t.nrows() / 2;
        let mut herm = CMat::zeros(n, n);
        let mut holo = CMat::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                let xx = t[(j, k)];
                let xy = t[(j, n + k)];
                let yx = t[(n + j, k)];
                let yy = t[(n + j, n + k)];
                // ∂ = ½(∂_x − i∂_y), ∂̄ = ½(∂_x + i∂_y).
                holo[(j, k)] = Complex64::new(xx - yy, -(xy + yx)) * 0.25;
                herm[(j, k)] = Complex64::new(xx + yy, xy - yx) * 0.25;
            }
        }
        TensorValue { herm, holo }
    }

    pub fn max_abs(&self) -> f64 {
        self.herm.iter().chain(self.holo.iter()).map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Real components `(Re, Im)` of `Σ_{ij} α_i β_j Γ^k_{ij} ∂_k + c.c.` for the
/// real coordinate directions `a`, `b`: the real Christoffel symbols of a
/// Kähler metric built from its holomorphic ones.
pub fn real_christoffel_from_holomorphic(gamma: &[Complex64], n: usize) -> Vec<f64> {
    let d = 2 * n;
    let mut out = vec![0.0; d * d * d];
    let coef = |a: usize| -> (usize, Complex64) {
        if a < n {
            (a, Complex64::new(1.0, 0.0))
        } else {
            (a - n, I)
        }
    };
    for a in 0..d {
        let (i, ca) = coef(a);
        for b in 0..d {
            let (j, cb) = coef(b);
            for k in 0..n {
                let v = ca * cb * gamma[(k * n + i) * n + j];
                out[(k * d + a) * d + b] = v.re;
                out[((n + k) * d + a) * d + b] = v.im;
            }
        }
    }
    out
}

/// Covariant 4-tensor components in the real basis from a function giving
/// them on the complex basis `∂_1…∂_n, ∂_1̄…∂_n̄` (indices `0..2n`).
pub fn real_four_tensor(n: usize, complex: impl Fn(usize, usize, usize, usize) -> Complex64) -> Vec<f64> {
    let d = 2 * n;
    // Each real direction expands into two complex basis vectors.
    let expand = |a: usize| -> [(usize, Complex64); 2] {
        if a < n {
            [(a, Complex64::new(1.0, 0.0)), (n + a, Complex64::new(1.0, 0.0))]
        } else {
            [(a - n, I), (a, -I)]
        }
    };
    let mut out = vec![0.0; d * d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (ia, ca) in expand(a) {
                        for (ib, cb) in expand(b) {
                            for (ic, cc) in expand(c) {
                                for (ie, ce) in expand(e) {
                                    acc += ca * cb * cc * ce * complex(ia, ib, ic, ie);
                                }
                            }
                        }
                    }
                    out[((a * d + b) * d + c) * d + e] = acc.re;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize) -> TensorValue {
        let mut herm = CMat::zeros(n, n);
        let mut holo = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let a = (i * 3 + j) as f64 * 0.1;
                let b = (j * 5 + i) as f64 * 0.07;
                holo[(i, j)] += Complex64::new(a + b, a - b);
                holo[(j, i)] += Complex64::new(a + b, a - b);
                if i == j {
                    herm[(i, j)] = Complex64::new(1.0 + a, 0.0);
                } else if i < j {
                    herm[(i, j)] = Complex64::new(a, b);
                    herm[(j, i)] = Complex64::new(a, -b);
                }
            }
        }
        TensorValue { herm, holo }
    }

    #[test]
    fn real_roundtrip() {
        let t = sample(3);
        let r = t.to_real();
        assert!((&r - r.transpose()).abs().max() < 1e-14);
        let back = TensorValue::from_real(&r);
        assert!((&back.herm - &t.herm).iter().fold(0.0f64, |e, z| e.max(z.norm())) < 1e-14);
        assert!((&back.holo - &t.holo).iter().fold(0.0f64, |e, z| e.max(z.norm())) < 1e-14);
    }

    #[test]
    fn hermitian_block_has_block_structure() {
        let mut herm = CMat::zeros(1, 1);
        herm[(0, 0)] = Complex64::new(2.0, 0.0);
        let r = TensorValue::hermitian(herm).to_real();
        assert_eq!(r, DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 4.0]));
    }
}
