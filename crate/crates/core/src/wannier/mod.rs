//! Canonical Wannier coefficient profiles via Bessel-integral quadrature,
//! their asymptotic prefactors, and power-law decay fits.

mod bessel;
mod cutoff;
mod fit;
mod profile;

pub use bessel::{bessel_j, bessel_j_signed, MAX_ORDER};
pub use cutoff::{build_cutoff, RadialCutoff, CUTOFF_RESIDUAL_LIMIT};
pub use fit::{decay_fit, decay_fit_envelope, envelope_peaks, log_grid, DecayFit, MIN_FIT_POINTS};
pub use profile::{
    asymptotic_prefactor, bessel_moment_asymptotic, canonical_wannier_profile, gamma_half,
    profile_csv, profile_prefactors, radial_integral, WannierRow, RADIAL_ABS_TOL, RADIAL_REL_TOL,
};

use thiserror::Error;

use crate::quadrature::QuadratureError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WannierError {
    #[error("invalid cutoff: {0}")]
    InvalidCutoff(String),
    #[error("cutoff Hermite system residual {residual:e} too large")]
    IllConditioned { residual: f64 },
    #[error("Bessel order {ell} exceeds the supported maximum")]
    OrderTooLarge { ell: u32 },
    #[error("Bessel argument {z} is negative")]
    NegativeArgument { z: f64 },
    #[error("position {x} must be positive")]
    NonPositiveX { x: f64 },
    #[error("winding n = 0 has no canonical Wannier profile")]
    ZeroWinding,
    #[error("fit window holds {got} points, need {min}")]
    TooFewPoints { got: usize, min: usize },
    #[error("profile changes sign near x = {x} inside the fit window")]
    SignChangeInWindow { x: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}
