//! Exact linear algebra for the localized processes on small rings.

mod forms;
mod forward;
mod generator;
mod state;
mod structure;

pub use forms::{
    bond_dirichlet, bond_energy, dirichlet_form, entropy_production_check, entropy_time_grid, h_minus1_norm,
    kv_exact_oracle, kv_second_moment, relative_entropy, resolvent, resolvent_checks, EntropyProductionReport,
    KvOracle, ResolventReport, SymmetricPart, DENSE_CAP, PSEUDO_INVERSE_CUTOFF,
};
pub use forward::{backward_evolve, check_density, forward_evolve, forward_grid, lp_moments, poisson_weights, TRUNCATION};
pub use generator::{
    build_from_rates, build_generator, build_generator_alpha, decomposition_error, GeneratorMatrix, GeneratorVariant,
};
pub use state::{expectation, inner, Mode, StateSpace, CUBE_CAP, HYPERPLANE_CAP};
pub use structure::{
    antisymmetry_defect, antisymmetry_pairing, azuma_conditional_defect, azuma_tail_fit, entropy_inequality_slack,
    invariance_defect, local_reduction_check, structure_checks, AzumaTailReport, BlockFunction, LocalReductionReport,
    StructureReport,
};
