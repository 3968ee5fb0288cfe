use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectoryRecord;
use crate::ensembles::SpinConfig;
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeightField {
    pub values: Vec<f64>,
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GartnerField {
    pub values: Vec<f64>,
    pub time: f64,
    pub r_n: f64,
}

/// h₀ = 2N^{−1/2}·flux and h_x = h_{x−1} + N^{−1/2}η_x for x = 1..N−1.
pub fn height_from_config(eta: &SpinConfig, flux: i64, time: f64) -> HeightField {
    let n = eta.ring_size();
    let a = (n as f64).sqrt().recip();
    let mut values = Vec::with_capacity(n);
    let mut h = 2.0 * a * flux as f64;
    values.push(h);
    for x in 1..n {
        h += a * eta.get(x) as f64;
        values.push(h);
    }
    HeightField { values, time }
}

pub fn height_profile(record: &TrajectoryRecord, t: f64) -> Result<HeightField> {
    let (eta, flux) = record.state_at(t)?;
    Ok(height_from_config(&eta, flux, t))
}

/// Z_x = exp(−h_x + R_N t).
pub fn gartner_from_height(h: &HeightField, r_n: f64) -> GartnerField {
    GartnerField { values: h.values.iter().map(|v| (-v + r_n * h.time).exp()).collect(), time: h.time, r_n }
}

pub fn gartner_profile(record: &TrajectoryRecord, t: f64, r_n: f64) -> Result<GartnerField> {
    Ok(gartner_from_height(&height_profile(record, t)?, r_n))
}

/// ∇^X_𝔩 φ_x = φ_{x+𝔩} − φ_x on the ring.
pub fn spatial_gradient(field: &[f64], l: i64) -> Vec<f64> {
    let n = field.len() as i64;
    (0..n).map(|x| field[(x + l).rem_euclid(n) as usize] - field[x as usize]).collect()
}

/// Δ = ∇_1∇_{−1}.
pub fn laplacian(field: &[f64]) -> Vec<f64> {
    let n = field.len();
    (0..n).map(|x| field[(x + 1) % n] + field[(x + n - 1) % n] - 2.0 * field[x]).collect()
}

/// ∇^T_s ψ at grid index `k`, with the shifted index `k + lag` clamped to the grid.
pub fn time_gradient(series: &[Vec<f64>], k: usize, lag: i64) -> Vec<f64> {
    let last = series.len() as i64 - 1;
    let j = (k as i64 + lag).clamp(0, last) as usize;
    series[j].iter().zip(&series[k]).map(|(a, b)| a - b).collect()
}
