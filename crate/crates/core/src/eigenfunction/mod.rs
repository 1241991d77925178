//! First eigenfunctions of ℂP^{2m−1}: pointwise closed forms and exact sphere averages.

pub mod closed_form;
pub mod sphere;

pub use closed_form::{grad_u_at, hess_u_at, u_at, xi_at, EigenError, EigenFn, XiValue};
pub use sphere::{criterion_integral, euclid_laplacian_check, landscape, pattern_verdict, sphere_moment, EuclidCheck, MomentPoly, PatternVerdict};
