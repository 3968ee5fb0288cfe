//! Residual of the microscopic drift identity for the Gärtner transform, over all windows.
use kpzlab::ensembles::{build_flux_terms, compute_constants, driving_left_neighbour};
use kpzlab::observables::duality_sweep;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = driving_left_neighbour();
    let flux = build_flux_terms(&d)?;
    for n in [16, 64, 256, 1024] {
        let c = compute_constants(&d, n)?;
        let s = duality_sweep(n, &d, &c, &flux)?;
        println!(
            "N = {n:>4}: {} windows, max residual {:.4}, expanded {:.4}, worst window {:?}",
            s.windows, s.max_residual, s.max_expanded_residual, s.worst_window
        );
    }
    Ok(())
}
