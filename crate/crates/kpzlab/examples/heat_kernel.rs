//! The discrete heat kernel with drift: profile, bound constants and a random-walk cross-check.
use kpzlab::heat_kernel::{build_kernel, mc_crosscheck, verify_bounds, BoundGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let kernel = build_kernel(64, 0.5)?;
    let g = kernel.profile(1e-3)?;
    let peak = g.iter().enumerate().fold((0, 0.0), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
    println!("H(t = 1e-3) peaks at offset {} with mass {:.4}; total {:.15}", peak.0, peak.1, g.iter().sum::<f64>());

    for n in [16, 64, 256] {
        let r = verify_bounds(&build_kernel(n, 0.5)?, &BoundGrid::standard(n, 9))?;
        println!("N = {n:>3}: on-diagonal constant {:.3}, L¹ mass {:.6}, space gradient {:?}", r.on_diagonal, r.l1_mass, r.space_gradient);
    }

    let rep = mc_crosscheck(&kernel, 0.01, 50_000, 3)?;
    println!("walk vs kernel: TV {:.4}, expected {:.4} ± {:.4}", rep.total_variation, rep.null_mean, rep.null_sd);
    Ok(())
}
