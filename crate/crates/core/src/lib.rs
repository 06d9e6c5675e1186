//! Band crossings of two-band Bloch Hamiltonians: eigenspace vorticity,
//! pseudospin winding, canonical Wannier decay and the distributional
//! Berry curvature.
//!
//! Everything numeric is generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix the scalar to `f64`.

// Negated comparisons below are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod distcurv;
pub mod hermitian2;
pub mod models;
pub mod pseudospin;
pub mod quadrature;
pub mod scalar;
pub mod vorticity;
pub mod wannier;

pub type Hermitian2 = hermitian2::HermitianMatrix2<f64>;
pub type Vector2 = hermitian2::UnitVector2<f64>;
pub type Projector = hermitian2::RankOneProjector<f64>;
pub type Matrix2 = hermitian2::Matrix2<f64>;
pub type Momentum = models::MomentumPoint<f64>;
pub type Mesh = vorticity::ClosedSurfaceMesh<f64>;
pub type Cube = vorticity::CubeGeometry<f64>;
pub type Cutoff = wannier::RadialCutoff<f64>;
pub type TestFunction = distcurv::RadialTestFunction<f64>;
pub type Haldane = models::HaldaneParams<f64>;
