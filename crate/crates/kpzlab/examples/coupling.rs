//! Basic coupling of the global process with its localized copy, tracking discrepancies.
use kpzlab::dynamics::{coupled_simulate, CouplingConfig, CouplingGeometry};
use kpzlab::ensembles::driving_left_neighbour;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 256;
    let geometry = CouplingGeometry::centred(n, 3, 0.1)?;
    println!("{geometry:?}");
    let tau = (n as f64).powf(-4.0 / 3.0);
    let mut entered = 0;
    let replicas = 500;
    for replica in 0..replicas {
        let cfg = CouplingConfig {
            n,
            d: driving_left_neighbour(),
            alpha: 1.0,
            tau,
            seed: 2,
            replica,
            epsilon: 0.1,
            geometry,
            stop_on_entry: true,
        };
        if coupled_simulate(&cfg)?.first_discrepancy_in_l.is_some() {
            entered += 1;
        }
    }
    println!("discrepancy reached 𝕃 by τ in {entered} of {replicas} runs");
    Ok(())
}
