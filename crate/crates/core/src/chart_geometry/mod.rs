//! Geometry of ℂP^{2m−1} in the affine chart `z₀ = 1`.
//!
//! Closed forms live in [`metric`]; [`engine`] recomputes everything from the
//! metric in real coordinates, and [`fd`] supplies finite-difference oracles.

pub mod engine;
pub mod fd;
pub mod metric;
pub mod point;
pub mod sampling;
pub mod tensor;

pub use engine::{ConformalU, FubiniStudy, LocalGeometry, MetricField};
pub use metric::{metric_at, MetricData};
pub use point::{CMat, ChartPoint};
pub use sampling::{mc_integrate, sample_point, McEstimate};
pub use tensor::TensorValue;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("m must be at least 1, got {0}")]
    InvalidM(usize),
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("coordinates must be finite")]
    NonFinite,
    #[error("point lies off the chart z0 = 1")]
    OffChart,
}
