//! Pointwise realization of `V` and a finite-difference estimate of `L` on it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::BasisCoeffs;
use crate::chart_geometry::fd::fd_rough_laplacian;
use crate::chart_geometry::{metric_at, CMat, ChartPoint, FubiniStudy, LocalGeometry, TensorValue};
use crate::eigenfunction::{grad_u_at, hess_u_at, u_at};
use crate::numeric_harness::{FDConfig, StepError};

/// The tensor `Σ c_k e_k` at `p`.
pub fn realize_f64(c: &[f64; 5], p: &ChartPoint, lambda: f64) -> TensorValue {
    let md = metric_at(p);
    let u = u_at(p, lambda);
    let du = grad_u_at(p, lambda);
    let hess = hess_u_at(p, lambda).herm;
    let n = p.nc();
    let re = |x: f64| Complex64::new(x, 0.0);
    let herm = CMat::from_fn(n, n, |i, j| {
        md.g[(i, j)] * re(c[0] * lambda * lambda + c[1] * u * u) + du[i] * du[j].conj() * c[2] + hess[(i, j)] * (c[3] * u)
    });
    let holo = CMat::from_fn(n, n, |i, j| du[i] * du[j] * c[4]);
    TensorValue { herm, holo }
}

/// [`realize_f64`] with the coordinates evaluated at the point's `m`.
pub fn realize(c: &BasisCoeffs, p: &ChartPoint, lambda: f64) -> TensorValue {
    realize_f64(&c.eval_f64(p.m() as f64), p, lambda)
}

/// `L T = ΔT + 2Rm(T)` for a real tensor field, by finite differences.
pub fn fd_l_apply(
    field: &dyn Fn(&[f64]) -> DMatrix<f64>,
    x: &[f64],
    geom: &LocalGeometry,
    cfg: &FDConfig,
) -> Result<DMatrix<f64>, StepError> {
    let lap = fd_rough_laplacian(field, x, geom, cfg)?;
    Ok(lap + geom.rm(&field(x)) * 2.0)
}

/// Finite-difference images `L(e_k)` at one point.
#[derive(Clone, Debug)]
pub struct FdLImages {
    pub point: ChartPoint,
    pub images: Vec<DMatrix<f64>>,
    /// Largest component of some `L(e_k)` of the wrong type.
    pub type_leak: f64,
}

fn unit(k: usize) -> [f64; 5] {
    std::array::from_fn(|i| if i == k { 1.0 } else { 0.0 })
}

pub fn fd_l_images(p: &ChartPoint, lambda: f64, cfg: &FDConfig) -> Result<FdLImages, StepError> {
    let m = p.m();
    let x = p.to_real();
    let geom = LocalGeometry::at(&FubiniStudy { m }, &x);
    let mut images = Vec::with_capacity(5);
    let mut type_leak: f64 = 0.0;
    for k in 0..5 {
        let ek = unit(k);
        let field = |y: &[f64]| realize_f64(&ek, &ChartPoint::from_real(m, y).expect("finite"), lambda).to_real();
        let image = fd_l_apply(&field, &x, &geom, cfg)?;
        let split = TensorValue::from_real(&image);
        let wrong = if k < 4 { &split.holo } else { &split.herm };
        type_leak = type_leak.max(wrong.iter().map(|c| c.norm()).fold(0.0, f64::max));
        images.push(image);
    }
    Ok(FdLImages { point: p.clone(), images, type_leak })
}

impl FdLImages {
    /// Largest deviation of `L(e_k)` from `Σ_i M_ik e_i` realized at the point.
    pub fn prediction_error(&self, matrix: &[[f64; 5]; 5], lambda: f64) -> f64 {
        (0..5)
            .map(|k| {
                let col: [f64; 5] = std::array::from_fn(|i| matrix[i][k]);
                let want = realize_f64(&col, &self.point, lambda).to_real();
                (&self.images[k] - want).amax()
            })
            .fold(0.0, f64::max)
    }
}

/// Columns of `L` on `V` recovered by least squares over several points.
///
/// A single point cannot separate `λ²g` from `u²g`; stacking points where `u`
/// differs makes the design matrix full rank.
#[derive(Clone, Debug)]
pub struct FdLColumns {
    /// Column `k` holds the fitted coordinates of `L(e_k)`.
    pub columns: DMatrix<f64>,
    /// Largest component of `L(e_k)` not explained by `V`.
    pub residual: f64,
    pub type_leak: f64,
    /// Smallest singular value of the stacked design matrix.
    pub min_singular: f64,
}

pub fn fd_l_columns(samples: &[FdLImages], lambda: f64) -> FdLColumns {
    assert!(!samples.is_empty());
    let blocks: Vec<Vec<DMatrix<f64>>> = samples
        .iter()
        .map(|s| (0..5).map(|k| realize_f64(&unit(k), &s.point, lambda).to_real()).collect())
        .collect();
    let per = blocks[0][0].len();
    let rows = per * samples.len();
    let design = DMatrix::from_fn(rows, 5, |r, k| blocks[r / per][k][r % per]);
    let svd = design.clone().svd(true, true);
    let min_singular = svd.singular_values.min();
    let mut columns = DMatrix::zeros(5, 5);
    let mut residual: f64 = 0.0;
    for k in 0..5 {
        let b = DVector::from_fn(rows, |r, _| samples[r / per].images[k][r % per]);
        let coeffs = svd.solve(&b, 1e-12).expect("svd computed with u and v");
        residual = residual.max((&design * &coeffs - &b).amax());
        columns.set_column(k, &coeffs);
    }
    let type_leak = samples.iter().map(|s| s.type_leak).fold(0.0, f64::max);
    FdLColumns { columns, residual, type_leak, min_singular }
}
