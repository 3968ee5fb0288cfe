//! Height function, Gärtner transform, a priori regularity moduli, the microscopic duality
//! identity and the Boltzmann–Gibbs / hydrodynamic-limit functionals Υ.

mod duality;
mod height;
mod regularity;
mod upsilon;

pub use duality::{duality_sweep, interior_range, verify_duality, DualityReport, DualitySweep};
pub use height::{
    gartner_from_height, gartner_profile, height_from_config, height_profile, laplacian, spatial_gradient,
    time_gradient, GartnerField, HeightField,
};
pub use regularity::{regularity_moduli, Exceeded, RegularityReport, Thresholds};
pub use upsilon::{bg_functional, BGFunctional, UpsilonConfig};
