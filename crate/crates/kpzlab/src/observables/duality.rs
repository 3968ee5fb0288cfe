use serde::{Deserialize, Serialize};

use crate::dynamics::RateModel;
use crate::ensembles::{Constants, FluxSet, LocalFunction, SpinConfig};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub site: usize,
    pub z: f64,
    /// Generator applied to Z_x plus the R_N Z_x time derivative.
    pub lhs: f64,
    /// ½N²ΔZ + N²Φ^A Z + (N^{1/2}R₂₁ + R₂₂ + R₂₃)Z.
    pub rhs: f64,
    /// |lhs − rhs| / |Z_x|.
    pub residual: f64,
    /// |lhs − (𝒯_N Z − N^{1/2}q̄Z − sZ + gZ)| / |Z_x|, the 𝔟 terms left out.
    pub expanded_residual: f64,
}

/// Sites x for which every term of the identity reads only sites in 1..=N−2.
pub fn interior_range(n: usize, l: usize) -> std::ops::RangeInclusive<usize> {
    (3 * l + 2)..=(n.saturating_sub(l + 3))
}

/// Checks the microscopic duality identity for Z_x at an interior site, with Z_x = `z` and
/// neighbouring values read off the height increments.
pub fn verify_duality(
    eta: &SpinConfig,
    x: usize,
    d: &LocalFunction,
    constants: &Constants,
    flux: &FluxSet,
    z: f64,
) -> Result<DualityReport> {
    let n = eta.ring_size();
    if n != constants.n {
        return Err(Error::Domain("constants were computed for a different N".into()));
    }
    let l = constants.support_length.max(flux.support_length);
    if !interior_range(n, l).contains(&x) {
        return Err(Error::Domain(format!("site {x} is too close to the boundary bond (N−1, 0)")));
    }
    let nf = n as f64;
    let a = nf.sqrt().recip();
    let rates = RateModel::new(n, Some(d.clone()), 1.0)?;
    let (ex, ex1) = (eta.get(x) as f64, eta.get(x + 1) as f64);
    let mut lhs = constants.r_n * z;
    let r = rates.swap_rate(eta, x);
    if ex > ex1 {
        lhs += r * ((2.0 * a).exp() - 1.0) * z;
    } else if ex < ex1 {
        lhs += r * ((-2.0 * a).exp() - 1.0) * z;
    }
    let z_next = z * (-a * ex1).exp();
    let z_prev = z * (a * ex).exp();
    let lap = z_next + z_prev - 2.0 * z;
    let t_minus = (-2.0 * a).exp_m1() - (2.0 * a).exp_m1();
    let t_plus = (-2.0 * a).exp_m1() + (2.0 * a).exp_m1();
    let dx = d.eval_at(eta, x as i64);
    let phi = 0.125 * nf * t_minus * dx * (1.0 - ex * ex1) + 0.125 * nf * t_plus * dx * (ex1 - ex);
    let rterms = nf.sqrt() * constants.r21 + constants.r22 + constants.r23;
    let rhs = 0.5 * nf * nf * lap + phi * z + rterms * z;
    let drift = 0.5 * nf * nf * lap - constants.dbar * nf * (z_prev - z) - nf.sqrt() * flux.q_bar.eval_at(eta, x as i64) * z
        - flux.s.eval_at(eta, x as i64) * z
        + flux.g.eval_at(eta, x as i64) * z;
    Ok(DualityReport {
        site: x,
        z,
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / z.abs(),
        expanded_residual: (lhs - drift).abs() / z.abs(),
    })
}

/// Worst residuals over every configuration of the sites x−R..x+R, R = 3𝔩 + 2, at a fixed
/// interior site; the remaining sites are filled to keep N/2 particles when possible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualitySweep {
    pub n: usize,
    pub windows: usize,
    pub max_residual: f64,
    pub max_expanded_residual: f64,
    pub worst_window: Vec<i8>,
}

pub fn duality_sweep(n: usize, d: &LocalFunction, constants: &Constants, flux: &FluxSet) -> Result<DualitySweep> {
    let l = constants.support_length.max(flux.support_length);
    let radius = 3 * l + 2;
    let width = 2 * radius + 1;
    if width + 2 > n {
        return Err(Error::Domain(format!("N = {n} is too small for a window of {width} sites")));
    }
    let x = n / 2;
    let mut out = DualitySweep { n, windows: 0, max_residual: 0.0, max_expanded_residual: 0.0, worst_window: Vec::new() };
    for mask in 0..1usize << width {
        let mut spins = vec![-1i8; n];
        let mut plus = 0;
        for i in 0..width {
            if (mask >> i) & 1 == 1 {
                spins[x - radius + i] = 1;
                plus += 1;
            }
        }
        let mut need = (n / 2).saturating_sub(plus);
        for (y, s) in spins.iter_mut().enumerate() {
            if need == 0 {
                break;
            }
            if y + radius < x || y > x + radius {
                *s = 1;
                need -= 1;
            }
        }
        let eta = SpinConfig::from_spins(&spins)?;
        let rep = verify_duality(&eta, x, d, constants, flux, 1.0)?;
        out.windows += 1;
        if rep.residual > out.max_residual {
            out.max_residual = rep.residual;
            out.worst_window = spins[x - radius..=x + radius].to_vec();
        }
        out.max_expanded_residual = out.max_expanded_residual.max(rep.expanded_residual);
    }
    Ok(out)
}
