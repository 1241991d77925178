//! Real-coordinate Riemannian geometry with exact metric derivatives.
//!
//! Metric components are written once, generically over [`DualNum`]; hyper-dual
//! evaluation then yields the metric together with its first and second
//! partial derivatives to machine precision, from which Christoffel symbols,
//! their derivatives and the Riemann tensor follow without finite differences.

use nalgebra::DMatrix;
use num_dual::{DualNum, HyperDual64};

/// A metric in real chart coordinates.
pub trait MetricField: Sync {
    /// Real dimension `d`.
    fn dim(&self) -> usize;

    /// Row-major `d × d` components at `x`.
    fn metric<D: DualNum<f64> + Copy>(&self, x: &[D]) -> Vec<D>;

    fn metric_f64(&self, x: &[f64]) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_row_slice(d, d, &self.metric(x))
    }
}

/// The distinguished eigenfunction `u = λ(A − B)/S` on real coordinates,
/// generic so that conformal factors built from it differentiate exactly.
pub fn u_generic<D: DualNum<f64> + Copy>(m: usize, lambda: f64, x: &[D]) -> D {
    let nc = x.len() / 2;
    let mut a = D::from(1.0);
    let mut b = D::from(0.0);
    for k in 0..nc {
        let r2 = x[k] * x[k] + x[nc + k] * x[nc + k];
        if k + 1 < m {
            a += r2;
        } else {
            b += r2;
        }
    }
    (a - b) / (a + b) * lambda
}

/// Fubini–Study on the chart of ℂP^{2m−1}, Einstein constant ½.
#[derive(Clone, Copy, Debug)]
pub struct FubiniStudy {
    pub m: usize,
}

impl MetricField for FubiniStudy {
    fn dim(&self) -> usize {
        2 * (2 * self.m - 1)
    }

    fn metric<D: DualNum<f64> + Copy>(&self, x: &[D]) -> Vec<D> {
        let nc = 2 * self.m - 1;
        let d = 2 * nc;
        let c = 4.0 * self.m as f64;
        let mut s = D::from(1.0);
        for v in x {
            s += *v * *v;
        }
        let s2 = s * s;
        let mut out = vec![D::from(0.0); d * d];
        let (xs, ys) = x.split_at(nc);
        for j in 0..nc {
            for k in 0..nc {
                // g_{jk̄} = 4m(δ/S − z̄_j z_k/S²), z̄_j z_k = (x_j x_k + y_j y_k) + i(x_j y_k − y_j x_k).
                let mut re = -(xs[j] * xs[k] + ys[j] * ys[k]) / s2;
                if j == k {
                    re += s.recip();
                }
                let im = -(xs[j] * ys[k] - ys[j] * xs[k]) / s2;
                let re = re * (2.0 * c);
                let im = im * (2.0 * c);
                out[j * d + k] = re;
                out[(nc + j) * d + nc + k] = re;
                out[j * d + nc + k] = im;
                out[(nc + j) * d + k] = -im;
            }
        }
        out
    }
}

/// `(1 + t·u) g` for the Fubini–Study `g` and the distinguished `u`.
#[derive(Clone, Copy, Debug)]
pub struct ConformalU {
    pub base: FubiniStudy,
    pub t: f64,
    pub lambda: f64,
}

impl MetricField for ConformalU {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn metric<D: DualNum<f64> + Copy>(&self, x: &[D]) -> Vec<D> {
        let f = u_generic(self.base.m, self.lambda, x) * self.t + 1.0;
        self.base.metric(x).into_iter().map(|g| g * f).collect()
    }
}

/// Christoffel-type array `Γ^f_{ab}` at `[(f·d + a)·d + b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    pub d: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(d: usize) -> Self {
        Christoffel { d, data: vec![0.0; d * d * d] }
    }

    pub fn get(&self, f: usize, a: usize, b: usize) -> f64 {
        self.data[(f * self.d + a) * self.d + b]
    }

    fn set(&mut self, f: usize, a: usize, b: usize, v: f64) {
        self.data[(f * self.d + a) * self.d + b] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Christoffel) -> f64 {
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Everything needed at one point to differentiate tensor fields covariantly.
#[derive(Clone, Debug)]
pub struct LocalGeometry {
    pub d: usize,
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub gamma: Christoffel,
    /// `dgamma[e]` holds `∂_e Γ^f_{ab}`.
    pub dgamma: Vec<Christoffel>,
    /// `R_abcd = ⟨R(∂_a,∂_b)∂_c, ∂_d⟩` at `[((a·d + b)·d + c)·d + e]`.
    pub riemann: Vec<f64>,
}

/// Metric, first and second partials from hyper-dual evaluation.
pub fn metric_jets<F: MetricField>(field: &F, x: &[f64]) -> (DMatrix<f64>, Vec<DMatrix<f64>>, Vec<Vec<DMatrix<f64>>>) {
    let d = field.dim();
    let mut g = DMatrix::zeros(d, d);
    let mut dg = vec![DMatrix::zeros(d, d); d];
    let mut ddg = vec![vec![DMatrix::zeros(d, d); d]; d];
    for a in 0..d {
        for b in a..d {
            let xd: Vec<HyperDual64> = x
                .iter()
                .enumerate()
                .map(|(c, &v)| HyperDual64::new(v, if c == a { 1.0 } else { 0.0 }, if c == b { 1.0 } else { 0.0 }, 0.0))
                .collect();
            let vals = field.metric(&xd);
            for r in 0..d {
                for c in 0..d {
                    let v = vals[r * d + c];
                    if a == 0 && b == 0 {
                        g[(r, c)] = v.re;
                    }
                    if b == a {
                        dg[a][(r, c)] = v.eps1;
                    }
                    ddg[a][b][(r, c)] = v.eps1eps2;
                    ddg[b][a][(r, c)] = v.eps1eps2;
                }
            }
        }
    }
    (g, dg, ddg)
}

/// `Γ^c_{ab} = ½ G^{cd}(∂_a G_bd + ∂_b G_ad − ∂_d G_ab)`.
pub fn christoffel_from(g_inv: &DMatrix<f64>, dg: &[DMatrix<f64>]) -> Christoffel {
    let d = g_inv.nrows();
    let mut gamma = Christoffel::zeros(d);
    for c in 0..d {
        for a in 0..d {
            for b in 0..d {
                let mut acc = 0.0;
                for e in 0..d {
                    acc += g_inv[(c, e)] * (dg[a][(b, e)] + dg[b][(a, e)] - dg[e][(a, b)]);
                }
                gamma.set(c, a, b, 0.5 * acc);
            }
        }
    }
    gamma
}

impl LocalGeometry {
    pub fn at<F: MetricField>(field: &F, x: &[f64]) -> Self {
        let d = field.dim();
        let (g, dg, ddg) = metric_jets(field, x);
        let g_inv = g.clone().try_inverse().expect("metric must be nondegenerate");
        let gamma = christoffel_from(&g_inv, &dg);
        let mut dgamma = Vec::with_capacity(d);
        for e in 0..d {
            let dginv = -(&g_inv * &dg[e] * &g_inv);
            let mut out = Christoffel::zeros(d);
            for c in 0..d {
                for a in 0..d {
                    for b in 0..d {
                        let mut acc = 0.0;
                        for f in 0..d {
                            let t = dg[a][(b, f)] + dg[b][(a, f)] - dg[f][(a, b)];
                            let dt = ddg[e][a][(b, f)] + ddg[e][b][(a, f)] - ddg[e][f][(a, b)];
                            acc += dginv[(c, f)] * t + g_inv[(c, f)] * dt;
                        }
                        out.set(c, a, b, 0.5 * acc);
                    }
                }
            }
            dgamma.push(out);
        }
        let riemann = riemann_from(&g, &gamma, &dgamma);
        LocalGeometry { d, g, g_inv, gamma, dgamma, riemann }
    }

    pub fn riemann(&self, a: usize, b: usize, c: usize, e: usize) -> f64 {
        let d = self.d;
        self.riemann[((a * d + b) * d + c) * d + e]
    }

    /// `Rc_ac = −R_abcd G^{bd}`.
    pub fn ricci(&self) -> DMatrix<f64> {
        let d = self.d;
        DMatrix::from_fn(d, d, |a, c| {
            let mut acc = 0.0;
            for b in 0..d {
                for e in 0..d {
                    acc -= self.riemann(a, b, c, e) * self.g_inv[(b, e)];
                }
            }
            acc
        })
    }

    /// `Rm(h)_ac = −R_abcd h^{bd}`; `Rm(g) = Rc`.
    pub fn rm(&self, h: &DMatrix<f64>) -> DMatrix<f64> {
        rm_action(&self.riemann, &self.g_inv, h)
    }

    pub fn trace(&self, h: &DMatrix<f64>) -> f64 {
        self.g_inv.component_mul(h).sum()
    }

    pub fn inner(&self, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (&self.g_inv * a * &self.g_inv).component_mul(b).sum()
    }
}

/// `R_abcd` from `R_{abc}^f = ∂_aΓ^f_bc − ∂_bΓ^f_ac + Γ^e_bc Γ^f_ae − Γ^e_ac Γ^f_be`, lowered with `G`.
pub fn riemann_from(g: &DMatrix<f64>, gamma: &Christoffel, dgamma: &[Christoffel]) -> Vec<f64> {
    let d = g.nrows();
    let mut up = vec![0.0; d * d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for f in 0..d {
                    let mut v = dgamma[a].get(f, b, c) - dgamma[b].get(f, a, c);
                    for e in 0..d {
                        v += gamma.get(e, b, c) * gamma.get(f, a, e) - gamma.get(e, a, c) * gamma.get(f, b, e);
                    }
                    up[((a * d + b) * d + c) * d + f] = v;
                }
            }
        }
    }
    let mut low = vec![0.0; d * d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                for e in 0..d {
                    let mut v = 0.0;
                    for f in 0..d {
                        v += up[((a * d + b) * d + c) * d + f] * g[(f, e)];
                    }
                    low[((a * d + b) * d + c) * d + e] = v;
                }
            }
        }
    }
    low
}

/// `Rm(h)_ac = −R_abcd G^{be} G^{df} h_ef`.
pub fn rm_action(riemann: &[f64], g_inv: &DMatrix<f64>, h: &DMatrix<f64>) -> DMatrix<f64> {
    let d = g_inv.nrows();
    let raised = g_inv * h * g_inv;
    DMatrix::from_fn(d, d, |a, c| {
        let mut acc = 0.0;
        for b in 0..d {
            for e in 0..d {
                acc -= riemann[((a * d + b) * d + c) * d + e] * raised[(b, e)];
            }
        }
        acc
    })
}
