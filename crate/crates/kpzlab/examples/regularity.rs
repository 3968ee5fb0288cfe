//! Space and time moduli of the Gärtner transform against the a priori thresholds.
use kpzlab::dynamics::{simulate_torus, SimConfig};
use kpzlab::ensembles::{compute_constants, driving_left_neighbour};
use kpzlab::observables::{gartner_profile, regularity_moduli, Thresholds};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 128;
    let d = driving_left_neighbour();
    let r_n = compute_constants(&d, n)?.r_n;
    let times: Vec<f64> = (0..=512).map(|k| k as f64 / 512.0).collect();
    let mut cfg = SimConfig::new(n, d, 1.0, 4);
    cfg.record_times = times.clone();
    let rec = simulate_torus(&cfg)?;
    let frames = times.iter().map(|&t| Ok((t, gartner_profile(&rec, t, r_n)?.values))).collect::<kpzlab::Result<Vec<_>>>()?;
    let r = regularity_moduli(&frames, Thresholds::default())?;
    println!("sup Z {:.3}, sup 1/Z {:.3}", r.sup_z, r.sup_inv_z);
    println!("space modulus {:.3}, time modulus {:.3}, exceeded {:?}, t_stop {}", r.space_modulus, r.time_modulus, r.exceeded, r.t_stop);
    Ok(())
}
