//! Canonical block expectations, their decay near zero density, and the multiscale decomposition.
use kpzlab::ensembles::*;
use kpzlab::rng::{stream, Role};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pair = LocalFunction::product(&[0, 1]);
    for len in [4, 8, 16] {
        let k = len / 2 + 1;
        let s = canonical_density(len, k);
        println!("ℓ = {len}, k = {k}: E[η₀η₁] = {:.6}  (σ² = {:.6})", canonical_expectation(&pair, len, k)?, s * s);
    }

    let q_bar = build_flux_terms(&driving_left_neighbour())?.q_bar;
    let decay = canonical_decay(&q_bar, &[8, 16, 32, 64, 128])?;
    for (l, m) in decay.lens.iter().zip(&decay.maxima) {
        println!("ℓ = {l:>3}: max |𝖤^can[q̄]| = {m:.3e}");
    }
    println!("log-log slope {:.3}", decay.slope);

    let eta = SpinConfig::random_with_count(256, 128, &mut stream(1, 0, Role::Sampling))?;
    let terms = multiscale_terms(&eta, 100, &q_bar, 0.25, 3)?;
    println!("scales {:?}, R̃ = {:?}, tail {:.4}, f = {:.4}", terms.scales, terms.terms, terms.tail, terms.value);
    let check = centering_check(&q_bar, &[4, 6], 8)?;
    println!("centering on 8 sites: {:.1e}, telescoping {:.1e}", check.max_mean, check.max_telescoping);
    Ok(())
}
