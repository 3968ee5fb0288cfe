//! Local functions of spin configurations and their expectations under product and
//! canonical ensembles, together with the constants and flux terms built from a driving
//! function.

mod canonical;
mod constants;
mod flux;
mod local;
mod multiscale;
mod poly;
mod spin;

pub use canonical::{
    block_expectation_by_count, block_plus_count, canonical_decay, CanonicalDecay, canonical_block_expectation, canonical_density,
    canonical_expectation, pattern_weight, EnsembleSpec,
};
pub use constants::{adjust_driving, check_flatness, compute_constants, compute_dbar, flux_of, Constants};
pub use flux::{build_flux_terms, FluxSet};
pub use local::{decode_into, encode, LocalFunction, ENUMERATION_CAP, MAX_DRIVING_RADIUS};
pub use multiscale::{multiscale_scales, multiscale_terms, multiscale_terms_with, centering_check, round_scale, CenteringCheck, MultiscaleTerms};
pub use poly::{product_expectation, product_expectation_poly, SigmaPolynomial};
pub use spin::SpinConfig;

/// Driving function η ↦ η₋₁.
pub fn driving_left_neighbour() -> LocalFunction {
    LocalFunction::driving(1, (0..8).map(|idx| if idx & 0b100 != 0 { 1.0 } else { -1.0 }).collect()).expect("radius 1")
}

/// Driving function η ↦ c.
pub fn driving_constant(c: f64) -> LocalFunction {
    LocalFunction::driving(0, vec![c, c]).expect("radius 0")
}

/// Driving function identically zero.
pub fn driving_zero() -> LocalFunction {
    driving_constant(0.0)
}
