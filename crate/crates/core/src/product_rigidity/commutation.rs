//! Finite-difference check that `L = Δ + 2Rm` commutes with trace,
//! divergence and `δ*` on an Einstein manifold (`Rc = ½g`):
//! `Tr(Lh) = (Δ + 1) Tr h`, `δLh = (Δ + ½)δh`, `L(δ*α) = δ*((Δ + ½)α)`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::chart_geometry::fd::{fd_covariant_oneform, fd_divergence, fd_oneform_laplacian, fd_scalar_laplacian};
use crate::chart_geometry::{ChartPoint, FubiniStudy, LocalGeometry};
use crate::deformation_basis::numeric::fd_l_apply;
use crate::numeric_harness::{FDConfig, StepError};

/// Largest component of each identity's residual.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CommutationResiduals {
    pub trace: f64,
    pub divergence: f64,
    pub delta_star: f64,
    /// `|Tr h|`, `max|δh|` and `max|α|` at the point; a wrong shift in any
    /// identity would leave a residual of this size.
    pub scale: [f64; 3],
}

impl CommutationResiduals {
    pub fn max(&self) -> f64 {
        self.trace.max(self.divergence).max(self.delta_star)
    }
}

fn geom(m: usize, y: &[f64]) -> LocalGeometry {
    LocalGeometry::at(&FubiniStudy { m }, y)
}

fn delta_star(alpha: &dyn Fn(&[f64]) -> Vec<f64>, y: &[f64], g: &LocalGeometry, cfg: &FDConfig) -> Result<DMatrix<f64>, StepError> {
    let c = fd_covariant_oneform(alpha, y, g, cfg)?;
    Ok((&c + c.transpose()) * -0.5)
}

/// Residuals at one point of the chart of ℂP^{2m−1}, for a tensor field `h`
/// and a 1-form field `α` given in real chart coordinates.
///
/// Inner derivatives use a step ten times smaller than the outer ones.
pub fn einstein_commutation_check(
    p: &ChartPoint,
    h: &dyn Fn(&[f64]) -> DMatrix<f64>,
    alpha: &dyn Fn(&[f64]) -> Vec<f64>,
    cfg: &FDConfig,
) -> Result<CommutationResiduals, StepError> {
    let m = p.m();
    let x = p.to_real();
    let g0 = geom(m, &x);
    let inner = FDConfig { step: cfg.step * 0.1, ..cfg.clone() };

    let lh = fd_l_apply(h, &x, &g0, cfg)?;
    let tr_h = |y: &[f64]| geom(m, y).trace(&h(y));
    let trace = (g0.trace(&lh) - fd_scalar_laplacian(&tr_h, &x, &g0, cfg)? - tr_h(&x)).abs();

    let l_field = |y: &[f64]| fd_l_apply(h, y, &geom(m, y), &inner).expect("inner step");
    let lhs = fd_divergence(&l_field, &x, &g0, cfg)?;
    let div_h = |y: &[f64]| fd_divergence(h, y, &geom(m, y), &inner).expect("inner step");
    let lap = fd_oneform_laplacian(&div_h, &x, &g0, cfg)?;
    let dh = div_h(&x);
    let divergence = (0..lhs.len()).map(|i| (lhs[i] - lap[i] - 0.5 * dh[i]).abs()).fold(0.0, f64::max);

    let ds = |y: &[f64]| delta_star(alpha, y, &geom(m, y), &inner).expect("inner step");
    let lhs = fd_l_apply(&ds, &x, &g0, cfg)?;
    let beta = |y: &[f64]| {
        let gy = geom(m, y);
        let l = fd_oneform_laplacian(alpha, y, &gy, &inner).expect("inner step");
        alpha(y).iter().zip(l).map(|(a, b)| b + 0.5 * a).collect::<Vec<f64>>()
    };
    let rhs = delta_star(&beta, &x, &g0, cfg)?;
    let delta_star = (&lhs - &rhs).amax();

    let a0 = alpha(&x).iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let scale = [tr_h(&x).abs(), dh.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())), a0];
    Ok(CommutationResiduals { trace, divergence, delta_star, scale })
}
