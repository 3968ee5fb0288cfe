//! The Boltzmann–Gibbs functional Υ^BG along one trajectory, evaluated by a Duhamel scheme.
use kpzlab::dynamics::{simulate_torus, SimConfig};
use kpzlab::ensembles::{build_flux_terms, compute_constants, driving_left_neighbour};
use kpzlab::heat_kernel::build_kernel;
use kpzlab::observables::{bg_functional, Thresholds, UpsilonConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 64;
    let d = driving_left_neighbour();
    let flux = build_flux_terms(&d)?;
    let r_n = compute_constants(&d, n)?.r_n;
    let times: Vec<f64> = (1..=64).map(|k| k as f64 / 64.0).collect();
    let mut cfg = SimConfig::new(n, d, 1.0, 9);
    cfg.record_times = times.clone();
    let rec = simulate_torus(&cfg)?;
    let up = UpsilonConfig { report_times: vec![0.25, 0.5, 1.0], sites: vec![0, n / 2], thresholds: Thresholds::default(), clip: true };
    let out = bg_functional(&rec, &build_kernel(n, flux.dbar)?, &flux, r_n, &up)?;
    for (i, t) in out.times.iter().enumerate() {
        println!("t = {t:.2}: sup|Υ^BG| = {:.4}, sup|Υ^HL| = {:.4}", out.sup_bg[i], out.sup_hl[i]);
    }
    println!("stopping time {:.3}, time-step sensitivity {:.2e}", out.t_stop, out.discretization_bg);
    Ok(())
}
