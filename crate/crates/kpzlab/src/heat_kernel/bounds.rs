use serde::{Deserialize, Serialize};

use super::CirculantKernel;
use crate::Result;

/// Grids for the kernel constant sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundGrid {
    /// Values of t − s.
    pub times: Vec<f64>,
    /// Spatial shifts 𝔩 ≠ 0.
    pub shifts: Vec<i64>,
    /// Time increments 𝔱 > 0.
    pub increments: Vec<f64>,
    pub exponents: Vec<f64>,
}

impl BoundGrid {
    /// t − s log-spaced over [N⁻², 1], shifts 1, 2, 4, … < N/2, increments as times.
    pub fn standard(n: usize, points: usize) -> Self {
        let lo = (n as f64).powi(-2).ln();
        let times: Vec<f64> = (0..points).map(|i| (lo * (1.0 - i as f64 / (points - 1) as f64)).exp()).collect();
        let shifts = std::iter::successors(Some(1i64), |l| Some(2 * l)).take_while(|&l| 2 * l <= n as i64).collect();
        BoundGrid { increments: times.clone(), times, shifts, exponents: vec![0.5, 1.0] }
    }
}

/// Largest observed ratio of each kernel quantity to the corresponding power-law bound.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub n: usize,
    pub dbar: f64,
    /// sup H · N(t−s)^{1/2}.
    pub on_diagonal: f64,
    /// Per exponent υ: sup |∇_𝔩 H| · N^{1+υ}(t−s)^{(1+υ)/2}|𝔩|^{−υ}.
    pub space_gradient: Vec<(f64, f64)>,
    /// Per υ: sup |H_{t+𝔱} − H_t| · N(t−s)^{1/2+υ}𝔱^{−υ}.
    pub time_gradient: Vec<(f64, f64)>,
    /// sup ‖H_{x,·}‖_{L¹}.
    pub l1_mass: f64,
    /// Per υ: sup ‖∇_𝔩 H_{x,·}‖_{L¹} · N^{υ}(t−s)^{υ/2}|𝔩|^{−υ}; also the L^∞ operator norm
    /// ratio of ∇_𝔩 e^{(t−s)𝒯_N}, since the kernel is circulant.
    pub l1_space: Vec<(f64, f64)>,
    /// Per υ: sup ‖H_{t+𝔱} − H_t‖_{L¹} · (t−s)^{υ}𝔱^{−υ}; equal to the operator norm ratio of
    /// ∇^T_𝔱 e^{(t−s)𝒯_N}.
    pub l1_time: Vec<(f64, f64)>,
    /// Most negative kernel entry seen.
    pub min_entry: f64,
    /// Largest |row sum − 1|.
    pub row_sum_error: f64,
}

fn shifted_l1(g: &[f64], l: i64) -> (f64, f64) {
    let n = g.len() as i64;
    let mut l1 = 0.0;
    let mut sup = 0.0f64;
    for m in 0..n {
        let d = (g[(m + l).rem_euclid(n) as usize] - g[m as usize]).abs();
        l1 += d;
        sup = sup.max(d);
    }
    (l1, sup)
}

pub fn verify_bounds(kernel: &CirculantKernel, grid: &BoundGrid) -> Result<ConstantReport> {
    let n = kernel.n();
    let nf = n as f64;
    let ups = &grid.exponents;
    let mut rep = ConstantReport {
        n,
        dbar: kernel.dbar(),
        space_gradient: ups.iter().map(|&u| (u, 0.0)).collect(),
        time_gradient: ups.iter().map(|&u| (u, 0.0)).collect(),
        l1_space: ups.iter().map(|&u| (u, 0.0)).collect(),
        l1_time: ups.iter().map(|&u| (u, 0.0)).collect(),
        ..Default::default()
    };
    for &dt in &grid.times {
        let g = kernel.profile(dt)?;
        let sup = g.iter().cloned().fold(f64::MIN, f64::max);
        rep.on_diagonal = rep.on_diagonal.max(sup * nf * dt.sqrt());
        rep.min_entry = rep.min_entry.min(g.iter().cloned().fold(f64::MAX, f64::min));
        let mass: f64 = g.iter().map(|v| v.abs()).sum();
        rep.l1_mass = rep.l1_mass.max(mass);
        rep.row_sum_error = rep.row_sum_error.max((g.iter().sum::<f64>() - 1.0).abs());
        for &l in &grid.shifts {
            let (l1, sup) = shifted_l1(&g, l);
            let la = l.unsigned_abs() as f64;
            for (i, &u) in ups.iter().enumerate() {
                let point = sup * nf.powf(1.0 + u) * dt.powf(0.5 * (1.0 + u)) * la.powf(-u);
                rep.space_gradient[i].1 = rep.space_gradient[i].1.max(point);
                let avg = l1 * nf.powf(u) * dt.powf(0.5 * u) * la.powf(-u);
                rep.l1_space[i].1 = rep.l1_space[i].1.max(avg);
            }
        }
        for &inc in &grid.increments {
            let g2 = kernel.profile(dt + inc)?;
            let diffs: Vec<f64> = g2.iter().zip(&g).map(|(a, b)| (a - b).abs()).collect();
            let l1: f64 = diffs.iter().sum();
            let sup = diffs.iter().cloned().fold(0.0, f64::max);
            for (i, &u) in ups.iter().enumerate() {
                let point = sup * nf * dt.powf(0.5 + u) * inc.powf(-u);
                rep.time_gradient[i].1 = rep.time_gradient[i].1.max(point);
                let avg = l1 * dt.powf(u) * inc.powf(-u);
                rep.l1_time[i].1 = rep.l1_time[i].1.max(avg);
            }
        }
    }
    Ok(rep)
}
