//! Exact-in-law simulation of the driven exclusion process on 𝕋_N, of its localized
//! versions on a sub-ring 𝕃, and of the coupling between the two.

mod coupling;
mod engine;
mod localized;
mod rates;
mod record;
mod torus;
pub mod trajfile;

pub use coupling::{coupled_simulate, CouplingConfig, CouplingGeometry, DiscrepancyReport};
pub use engine::{replay, Event, RingProcess};
pub use localized::{simulate_localized, LocalizedSimConfig, Variant};
pub use rates::{validate_rates, RateModel};
pub use record::{time_average, Observable, RecordSummary, Snapshot, TrajectoryRecord};
pub use torus::{simulate_torus, InitialCondition, SimConfig};
