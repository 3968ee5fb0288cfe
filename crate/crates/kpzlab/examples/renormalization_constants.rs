//! Renormalization constants for a few driving functions, before and after the flatness adjustment.
use kpzlab::ensembles::{adjust_driving, check_flatness, compute_constants, driving_left_neighbour, LocalFunction};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // d[η] = η₋₁η₀η₁ + 0.3, which is not flat at σ = 0.
    let cubic = LocalFunction::driving(1, (0..8).map(|i: u32| if i.count_ones() % 2 == 1 { 1.3 } else { -0.7 }).collect())?;
    for (name, d) in [("left neighbour", driving_left_neighbour()), ("cubic + 0.3", cubic)] {
        let c = compute_constants(&d, 128)?;
        println!("{name}: R_N = {:.6}  d̄ = {:.4}  R21 = {:.4}  R22 = {:.4}  R23 = {:.4}", c.r_n, c.dbar, c.r21, c.r22, c.r23);
        println!("  flatness defect {:.3e}", check_flatness(&d)?);
        let (flat, shift) = adjust_driving(&d)?;
        println!("  subtracting {shift:.4} leaves defect {:.3e}", check_flatness(&flat)?);
    }
    Ok(())
}
