//! Euler–Maruyama solver for the stochastic heat equation and comparison with particle ensembles.

mod compare;
mod solver;

pub use compare::{
    ensemble_statistics, kpz_compare, martingale_diagnostic, FieldEnsemble, KpzReport, MartingaleDiagnostic, PointStats,
    TimeComparison,
};
pub use solver::{interpolate_profile, solve_she, solve_she_with, CyclicSolver, Scheme, SheConfig, SheField};
