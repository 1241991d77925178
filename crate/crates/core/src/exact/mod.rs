//! Exact arithmetic: big rationals, polynomials and rational functions in
//! one symbol `m`, small dense matrices over them, and quadratic extensions.

mod matrix;
mod parse;
mod poly;
mod quadratic;
mod ratfn;

pub use matrix::RatMatrix;
pub use poly::Poly;
pub use quadratic::QuadExt;
pub use ratfn::RatFn;

/// Arbitrary-precision rational, always in lowest terms with positive denominator.
pub type Rat = num_rational::BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by the zero function")]
    DivisionByZero,
    #[error("pole at m = {at}")]
    Pole { at: String },
    #[error("singular matrix: no nonzero pivot in column {column}")]
    Singular { column: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("shape mismatch: {rows}x{cols} against {len} entries")]
    Shape { rows: usize, cols: usize, len: usize },
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}
