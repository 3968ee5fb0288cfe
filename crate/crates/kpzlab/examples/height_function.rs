//! Simulates the driven process on the torus and prints the height function and Gärtner transform.
use kpzlab::dynamics::{simulate_torus, SimConfig};
use kpzlab::ensembles::{compute_constants, driving_left_neighbour};
use kpzlab::observables::{gartner_profile, height_profile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 64;
    let d = driving_left_neighbour();
    let r_n = compute_constants(&d, n)?.r_n;
    let mut cfg = SimConfig::new(n, d, 0.5, 42);
    cfg.record_times = vec![0.1, 0.25, 0.5];
    let rec = simulate_torus(&cfg)?;
    println!("{} proposals, {} jumps", rec.proposal_count, rec.event_count);
    for &t in &cfg.record_times {
        let h = height_profile(&rec, t)?;
        let z = gartner_profile(&rec, t, r_n)?;
        println!("t = {t:.2}: h₀ − R_N t = {:+.4}, Z₀ = {:.4}, Z_{{N/2}} = {:.4}", h.values[0] - r_n * t, z.values[0], z.values[n / 2]);
    }
    Ok(())
}
