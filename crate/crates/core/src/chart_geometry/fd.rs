//! Central-difference differential operators in real chart coordinates.
//!
//! Field values are differentiated numerically; the connection comes from a
//! [`LocalGeometry`] (exact unless built by [`fd_local_geometry`]).

use nalgebra::DMatrix;

use super::engine::{christoffel_from, riemann_from, Christoffel, LocalGeometry, MetricField};
use crate::numeric_harness::{FDConfig, StepError};

/// Value, gradient and Hessian of a vector-valued function, by central differences.
#[derive(Clone, Debug)]
pub struct Jet {
    pub value: Vec<f64>,
    /// `first[c][k] = ∂_c f_k`.
    pub first: Vec<Vec<f64>>,
    /// `second[c][e][k] = ∂_c ∂_e f_k`; empty when not requested.
    pub second: Vec<Vec<Vec<f64>>>,
}

fn shifted(x: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut y = x.to_vec();
    for &(i, h) in moves {
        y[i] += h;
    }
    y
}

fn raw_jet(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64, second: bool) -> Jet {
    let d = x.len();
    let value = f(x);
    let len = value.len();
    let plus: Vec<Vec<f64>> = (0..d).map(|c| f(&shifted(x, &[(c, h)]))).collect();
    let minus: Vec<Vec<f64>> = (0..d).map(|c| f(&shifted(x, &[(c, -h)]))).collect();
    let first = (0..d).map(|c| (0..len).map(|k| (plus[c][k] - minus[c][k]) / (2.0 * h)).collect()).collect();
    let mut sec = Vec::new();
    if second {
        sec = vec![vec![vec![0.0; len]; d]; d];
        for c in 0..d {
            for k in 0..len {
                sec[c][c][k] = (plus[c][k] - 2.0 * value[k] + minus[c][k]) / (h * h);
            }
            for e in c + 1..d {
                let pp = f(&shifted(x, &[(c, h), (e, h)]));
                let pm = f(&shifted(x, &[(c, h), (e, -h)]));
                let mp = f(&shifted(x, &[(c, -h), (e, h)]));
                let mm = f(&shifted(x, &[(c, -h), (e, -h)]));
                for k in 0..len {
                    let v = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h);
                    sec[c][e][k] = v;
                    sec[e][c][k] = v;
                }
            }
        }
    }
    Jet { value, first, second: sec }
}

/// Central-difference jet; with Richardson the `h` and `2h` estimates are
/// combined as `(4 D_h − D_{2h})/3`, cancelling the `h²` error term.
pub fn fd_jet(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], cfg: &FDConfig, second: bool) -> Result<Jet, StepError> {
    cfg.validate()?;
    let fine = raw_jet(f, x, cfg.step, second);
    if !cfg.richardson {
        return Ok(fine);
    }
    let coarse = raw_jet(f, x, 2.0 * cfg.step, second);
    let mix = |a: f64, b: f64| (4.0 * a - b) / 3.0;
    let first = fine
        .first
        .iter()
        .zip(&coarse.first)
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| mix(*x, *y)).collect())
        .collect();
    let second = fine
        .second
        .iter()
        .zip(&coarse.second)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a.iter().zip(b).map(|(x, y)| mix(*x, *y)).collect()).collect())
        .collect();
    Ok(Jet { value: fine.value, first, second })
}

fn flat(m: &DMatrix<f64>) -> Vec<f64> {
    m.iter().copied().collect()
}

fn unflat(d: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(d, d, v)
}

/// Christoffel symbols from central differences of the metric alone.
pub fn fd_christoffel<F: MetricField>(field: &F, x: &[f64], cfg: &FDConfig) -> Result<Christoffel, StepError> {
    let d = field.dim();
    let f = |y: &[f64]| flat(&field.metric_f64(y));
    let jet = fd_jet(&f, x, cfg, false)?;
    let g = unflat(d, &jet.value);
    let g_inv = g.try_inverse().expect("metric must be nondegenerate");
    let dg: Vec<DMatrix<f64>> = jet.first.iter().map(|v| unflat(d, v)).collect();
    Ok(christoffel_from(&g_inv, &dg))
}

/// Full local geometry with metric derivatives taken by central differences.
pub fn fd_local_geometry<F: MetricField>(field: &F, x: &[f64], cfg: &FDConfig) -> Result<LocalGeometry, StepError> {
    let d = field.dim();
    let f = |y: &[f64]| flat(&field.metric_f64(y));
    let jet = fd_jet(&f, x, cfg, true)?;
    let g = unflat(d, &jet.value);
    let g_inv = g.clone().try_inverse().expect("metric must be nondegenerate");
    let dg: Vec<DMatrix<f64>> = jet.first.iter().map(|v| unflat(d, v)).collect();
    let gamma = christoffel_from(&g_inv, &dg);
    let mut dgamma = Vec::with_capacity(d);
    for e in 0..d {
        let dginv = -(&g_inv * &dg[e] * &g_inv);
        let mut out = Christoffel::zeros(d);
        for c in 0..d {
            for a in 0..d {
                for b in 0..d {
                    let mut acc = 0.0;
                    for k in 0..d {
                        let t = dg[a][(b, k)] + dg[b][(a, k)] - dg[k][(a, b)];
                        let dt = jet.second[e][a][b + d * k] + jet.second[e][b][a + d * k] - jet.second[e][k][a + d * b];
                        acc += dginv[(c, k)] * t + g_inv[(c, k)] * dt;
                    }
                    out.data[(c * d + a) * d + b] = 0.5 * acc;
                }
            }
        }
        dgamma.push(out);
    }
    let riemann = riemann_from(&g, &gamma, &dgamma);
    Ok(LocalGeometry { d, g, g_inv, gamma, dgamma, riemann })
}

/// Covariant Hessian `∇²φ_ab = ∂_a∂_b φ − Γ^e_ab ∂_e φ`.
pub fn fd_hessian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], geom: &LocalGeometry, cfg: &FDConfig) -> Result<DMatrix<f64>, StepError> {
    let d = geom.d;
    let wrapped = |y: &[f64]| vec![f(y)];
    let jet = fd_jet(&wrapped, x, cfg, true)?;
    Ok(DMatrix::from_fn(d, d, |a, b| {
        let mut v = jet.second[a][b][0];
        for e in 0..d {
            v -= geom.gamma.get(e, a, b) * jet.first[e][0];
        }
        v
    }))
}

pub fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], cfg: &FDConfig) -> Result<Vec<f64>, StepError> {
    let wrapped = |y: &[f64]| vec![f(y)];
    Ok(fd_jet(&wrapped, x, cfg, false)?.first.into_iter().map(|v| v[0]).collect())
}

/// `Δφ = G^{ab} ∇²φ_ab`.
pub fn fd_scalar_laplacian(f: &dyn Fn(&[f64]) -> f64, x: &[f64], geom: &LocalGeometry, cfg: &FDConfig) -> Result<f64, StepError> {
    Ok(geom.trace(&fd_hessian(f, x, geom, cfg)?))
}

/// Rough Laplacian `G^{cd}∇_c∇_d T` of a covariant 2-tensor field.
pub fn fd_rough_laplacian(
    field: &dyn Fn(&[f64]) -> DMatrix<f64>,
    x: &[f64],
    geom: &LocalGeometry,
    cfg: &FDConfig,
) -> Result<DMatrix<f64>, StepError> {
    let d = geom.d;
    let f = |y: &[f64]| flat(&field(y));
    let jet = fd_jet(&f, x, cfg, true)?;
    let t = |a: usize, b: usize| jet.value[a + d * b];
    let dt = |c: usize, a: usize, b: usize| jet.first[c][a + d * b];
    let ddt = |c: usize, e: usize, a: usize, b: usize| jet.second[c][e][a + d * b];
    let gam = |f: usize, a: usize, b: usize| geom.gamma.get(f, a, b);
    // ∇_e T_ab
    let cov = |e: usize, a: usize, b: usize| {
        let mut v = dt(e, a, b);
        for k in 0..d {
            v -= gam(k, e, a) * t(k, b) + gam(k, e, b) * t(a, k);
        }
        v
    };
    let mut out = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let mut acc = 0.0;
            for c in 0..d {
                for e in 0..d {
                    let w = geom.g_inv[(c, e)];
                    if w == 0.0 {
                        continue;
                    }
                    // ∂_c(∇_e T_ab)
                    let mut v = ddt(c, e, a, b);
                    for k in 0..d {
                        v -= geom.dgamma[c].get(k, e, a) * t(k, b) + gam(k, e, a) * dt(c, k, b);
                        v -= geom.dgamma[c].get(k, e, b) * t(a, k) + gam(k, e, b) * dt(c, a, k);
                    }
                    for k in 0..d {
                        v -= gam(k, c, e) * cov(k, a, b) + gam(k, c, a) * cov(e, k, b) + gam(k, c, b) * cov(e, a, k);
                    }
                    acc += w * v;
                }
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// `(δT)_b = G^{ac} ∇_c T_ab`.
pub fn fd_divergence(
    field: &dyn Fn(&[f64]) -> DMatrix<f64>,
    x: &[f64],
    geom: &LocalGeometry,
    cfg: &FDConfig,
) -> Result<Vec<f64>, StepError> {
    let d = geom.d;
    let f = |y: &[f64]| flat(&field(y));
    let jet = fd_jet(&f, x, cfg, false)?;
    let t = |a: usize, b: usize| jet.value[a + d * b];
    Ok((0..d)
        .map(|b| {
            let mut acc = 0.0;
            for a in 0..d {
                for c in 0..d {
                    let mut v = jet.first[c][a + d * b];
                    for k in 0..d {
                        v -= geom.gamma.get(k, c, a) * t(k, b) + geom.gamma.get(k, c, b) * t(a, k);
                    }
                    acc += geom.g_inv[(a, c)] * v;
                }
            }
            acc
        })
        .collect())
}

/// Covariant derivative `∇_a α_b` of a 1-form field.
pub fn fd_covariant_oneform(
    field: &dyn Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
    geom: &LocalGeometry,
    cfg: &FDConfig,
) -> Result<DMatrix<f64>, StepError> {
    let d = geom.d;
    let jet = fd_jet(field, x, cfg, false)?;
    Ok(DMatrix::from_fn(d, d, |a, b| {
        let mut v = jet.first[a][b];
        for k in 0..d {
            v -= geom.gamma.get(k, a, b) * jet.value[k];
        }
        v
    }))
}

/// Rough Laplacian `G^{ce}∇_c∇_e α` of a 1-form field.
pub fn fd_oneform_laplacian(
    field: &dyn Fn(&[f64]) -> Vec<f64>,
    x: &[f64],
    geom: &LocalGeometry,
    cfg: &FDConfig,
) -> Result<Vec<f64>, StepError> {
    let d = geom.d;
    let jet = fd_jet(field, x, cfg, true)?;
    let al = |a: usize| jet.value[a];
    let gam = |f: usize, a: usize, b: usize| geom.gamma.get(f, a, b);
    let cov = |e: usize, a: usize| {
        let mut v = jet.first[e][a];
        for k in 0..d {
            v -= gam(k, e, a) * al(k);
        }
        v
    };
    Ok((0..d)
        .map(|a| {
            let mut acc = 0.0;
            for c in 0..d {
                for e in 0..d {
                    let w = geom.g_inv[(c, e)];
                    if w == 0.0 {
                        continue;
                    }
                    let mut v = jet.second[c][e][a];
                    for k in 0..d {
                        v -= geom.dgamma[c].get(k, e, a) * al(k) + gam(k, e, a) * jet.first[c][k];
                    }
                    for k in 0..d {
                        v -= gam(k, c, e) * cov(k, a) + gam(k, c, a) * cov(e, k);
                    }
                    acc += w * v;
                }
            }
            acc
        })
        .collect())
}
