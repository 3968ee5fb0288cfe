//! Generator structure and forward evolution on a small ring.
use kpzlab::ensembles::driving_left_neighbour;
use kpzlab::exact::*;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = driving_left_neighbour();
    for ring in [5, 7, 9] {
        let r = structure_checks(ring, 32, &d, 200, 1)?;
        println!(
            "ring {ring}: invariance {:.1e}, antisymmetry {:.1e}, decomposition {:.1e}, passed {}",
            r.invariance_defect, r.antisymmetry_defect, r.decomposition_error, r.passed
        );
    }

    let space = StateSpace::cube(7)?;
    let pi = space.weights(0.0);
    let gen = build_generator(&space, 64, &d, GeneratorVariant::Full)?;
    let p0: Vec<f64> = (0..space.len()).map(|i| 1.0 + 0.5 * space.spin(i, 0) as f64).collect();
    for t in [0.0, 1e-4, 1e-3, 1e-2] {
        let p = forward_evolve(&gen, &pi, &p0, t)?;
        println!("t = {t:.0e}: relative entropy {:.6}", relative_entropy(&pi, &p));
    }

    let hyper = StateSpace::hyperplane(7, 3)?;
    let w = hyper.weights(0.0);
    let free = build_generator(&hyper, 64, &d, GeneratorVariant::Free)?;
    let sym = SymmetricPart::new(&free, &w)?;
    let mut f: Vec<f64> = (0..hyper.len()).map(|i| hyper.spin(i, 0) as f64 * hyper.spin(i, 1) as f64).collect();
    let m = expectation(&w, &f);
    f.iter_mut().for_each(|v| *v -= m);
    for lambda in [64.0, 64f64.powf(4.0 / 3.0), 4096.0] {
        let r = resolvent_checks(&hyper, &free, &sym, &w, &f, lambda)?;
        println!("λ = {lambda:>7.1}: L² ratio {:.3}, Dirichlet ratio {:.3}, L∞ ratio {:.3e}", r.l2_ratio, r.dirichlet_ratio, r.linf_ratio);
    }
    Ok(())
}
