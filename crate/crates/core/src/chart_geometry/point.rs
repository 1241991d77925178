use nalgebra::DMatrix;
use num_complex::Complex64;

use super::GeometryError;

pub type CMat = DMatrix<Complex64>;

/// A point of the affine chart `z₀ = 1` of ℂP^{2m−1}.
///
/// Coordinates are stored 0-based: `z[k]` is the paper's `z_{k+1}`. The
/// first `m − 1` coordinates share the "+" block with `z₀`; the last `m`
/// form the "−" block.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    m: usize,
    z: Vec<Complex64>,
    a: f64,
    b: f64,
}

impl ChartPoint {
    pub fn new(m: usize, z: Vec<Complex64>) -> Result<Self, GeometryError> {
        if m < 1 {
            return Err(GeometryError::InvalidM(m));
        }
        if z.len() != 2 * m - 1 {
            return Err(GeometryError::Dimension { expected: 2 * m - 1, got: z.len() });
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        let a = 1.0 + z[..m - 1].iter().map(Complex64::norm_sqr).sum::<f64>();
        let b = z[m - 1..].iter().map(Complex64::norm_sqr).sum::<f64>();
        Ok(ChartPoint { m, z, a, b })
    }

    pub fn origin(m: usize) -> Self {
        ChartPoint::new(m, vec![Complex64::new(0.0, 0.0); 2 * m - 1]).expect("valid origin")
    }

    /// Chart image of a homogeneous vector `w ∈ ℂ^{2m}` with `w₀ ≠ 0`.
    pub fn from_homogeneous(m: usize, w: &[Complex64]) -> Result<Self, GeometryError> {
        if w.len() != 2 * m {
            return Err(GeometryError::Dimension { expected: 2 * m, got: w.len() });
        }
        if w[0].norm() == 0.0 {
            return Err(GeometryError::OffChart);
        }
        ChartPoint::new(m, w[1..].iter().map(|c| c / w[0]).collect())
    }

    /// From real coordinates `(Re z, Im z)`.
    pub fn from_real(m: usize, x: &[f64]) -> Result<Self, GeometryError> {
        let nc = 2 * m - 1;
        if x.len() != 2 * nc {
            return Err(GeometryError::Dimension { expected: 2 * nc, got: x.len() });
        }
        ChartPoint::new(m, (0..nc).map(|k| Complex64::new(x[k], x[nc + k])).collect())
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.z.iter().map(|c| c.re).chain(self.z.iter().map(|c| c.im)).collect()
    }

    /// `(1, z₁, …, z_{2m−1})`.
    pub fn homogeneous(&self) -> Vec<Complex64> {
        std::iter::once(Complex64::new(1.0, 0.0)).chain(self.z.iter().copied()).collect()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Complex dimension `2m − 1`.
    pub fn nc(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[Complex64] {
        &self.z
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn s(&self) -> f64 {
        self.a + self.b
    }

    /// Whether coordinate `k` (0-based) is in the "+" block.
    pub fn in_plus_block(&self, k: usize) -> bool {
        k + 1 < self.m
    }
}
