//! Simulation and exact finite-state analysis of the driven exclusion process on a ring,
//! with configuration-dependent drift of hyperbolic order, its height function and
//! Gärtner transform, and a numerical stochastic heat equation for comparison.
//!
//! The modules follow the structure of the model:
//!
//! - [`ensembles`]: local functions, product and canonical expectations, constants, flux terms.
//! - [`dynamics`]: exact-in-law simulation of the global, localized and coupled processes.
//! - [`observables`]: height field, Gärtner transform, regularity moduli, duality check, Υ functionals.
//! - [`heat_kernel`]: spectral representation of the discrete semigroup.
//! - [`exact`]: generators, forward equations, Dirichlet forms and resolvents on small rings.
//! - [`she`]: Euler–Maruyama solver for the stochastic heat equation and ensemble comparison.
//! - [`experiments`]: JSON-driven experiment runner used by the `kpzlab` binary.

pub mod dynamics;
pub mod ensembles;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod heat_kernel;
pub mod observables;
pub mod rng;
pub mod she;
pub mod stats;

pub use error::{Error, Result};
