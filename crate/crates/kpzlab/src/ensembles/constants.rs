use serde::{Deserialize, Serialize};

use super::{product_expectation_poly, LocalFunction};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    pub n: usize,
    pub r_n: f64,
    pub r21: f64,
    pub r22: f64,
    pub r23: f64,
    pub dbar: f64,
    /// ∂²_σ E^σ{d(1−η₀η₁)} at σ = 0.
    pub flatness_defect: f64,
    /// Support length l_d of the driving function.
    pub support_length: usize,
}

/// d(1 − η₀η₁).
pub fn flux_of(d: &LocalFunction) -> Result<LocalFunction> {
    let one_minus = LocalFunction::product(&[0, 1]).map(|v| 1.0 - v);
    d.mul(&one_minus)
}

pub fn compute_dbar(d: &LocalFunction) -> Result<f64> {
    Ok(0.5 * product_expectation_poly(&flux_of(d)?).coeff(1))
}

pub fn check_flatness(d: &LocalFunction) -> Result<f64> {
    Ok(product_expectation_poly(&flux_of(d)?).derivative_at_zero(2))
}

/// Returns (d − c, c) with c chosen so the flatness defect of d − c vanishes.
///
/// Subtracting c changes the defect by +2c, since E^σ{c(1−η₀η₁)} = c(1 − σ²).
pub fn adjust_driving(d: &LocalFunction) -> Result<(LocalFunction, f64)> {
    let c = -0.5 * check_flatness(d)?;
    Ok((d.add_constant(-c), c))
}

pub fn compute_constants(d: &LocalFunction, n: usize) -> Result<Constants> {
    if n < 4 || n % 2 != 0 {
        return Err(Error::Domain(format!("N = {n} must be even and at least 4")));
    }
    let flux_poly = product_expectation_poly(&flux_of(d)?);
    let dbar = 0.5 * flux_poly.coeff(1);
    let l = d.support_length() as i64;
    let r21 = -0.5 * flux_poly.coeff(0);
    let r22 = 0.5 * dbar;
    let shifted_flux = d
        .shifted(-2 * l)
        .mul(&LocalFunction::product(&[-2 * l, -2 * l + 1]).map(|v| 1.0 - v))?;
    let gradient = d.mul(&LocalFunction::site(1).sub(&LocalFunction::site(0))?)?;
    let r23 = -0.5 * shifted_flux.mean_uniform() - 0.5 * gradient.mean_uniform();
    let nf = n as f64;
    let r_n = 0.5 * nf - 1.0 / 24.0 + nf.sqrt() * r21 + r22 + r23;
    Ok(Constants {
        n,
        r_n,
        r21,
        r22,
        r23,
        dbar,
        flatness_defect: flux_poly.derivative_at_zero(2),
        support_length: l as usize,
    })
}
