pub mod chart_geometry;
pub mod deformation_basis;
pub mod eigenfunction;
pub mod exact;
pub mod numeric_harness;
pub mod obstruction;
pub mod product_rigidity;
pub mod scalar_algebra;
pub mod variational;
