//! Variational formulas for the shrinker operator `Φ = g/2 − Rc − ∇²f`
//! along conformal and mixed deformations, kept as structured expressions
//! so that they can be reduced exactly on `V` and evaluated pointwise.

pub mod expr;
pub mod formulas;
pub mod pointwise;
pub mod reduce;

use crate::deformation_basis::DeformationError;
use crate::exact::ExactError;
use crate::numeric_harness::StepError;
use crate::scalar_algebra::ScalarError;

pub use expr::{Atom, Dims, Func, Scalar, Sym, TensorExpr};
pub use formulas::{conformal_variation, phi_st_conformal, phi_st_mixed, phi_tt, phi_ttt, Formula, FtttRoute, Quantity, Variation};
pub use reduce::{CrossAverage, UPolyEnv, VariationScalars};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VariationError {
    #[error("{quantity} has no stored variation of order {order}")]
    UnsupportedOrder { quantity: &'static str, order: u32 },
    #[error("a factor metric was used on a non-product background")]
    NotAProduct,
    #[error("atom {0} is not supported here")]
    UnsupportedAtom(String),
    #[error("no value bound for {0}")]
    UnknownFunction(String),
    #[error("{0} is not representable")]
    NotRepresentable(String),
    #[error("deformation has nonzero divergence coefficient {0}")]
    NonzeroDivergence(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Deformation(#[from] DeformationError),
}
