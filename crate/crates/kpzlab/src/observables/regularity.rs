use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::height::spatial_gradient;
use crate::ensembles::round_scale;
use crate::{Error, Result};

/// Constants of the a priori stopping times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub c: f64,
    pub eps_ap: f64,
    pub eps_reg: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { c: 10.0, eps_ap: 0.05, eps_reg: 0.1 }
    }
}

impl Thresholds {
    /// 𝔩_reg = round(N^{1/3 + ε_reg}).
    pub fn l_reg(&self, n: usize) -> usize {
        round_scale((n as f64).powf(1.0 / 3.0 + self.eps_reg))
    }

    pub fn size_threshold(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(self.eps_ap)
    }

    pub fn modulus_threshold(&self, n: usize) -> f64 {
        self.c * (n as f64).powf(2.0 * self.eps_ap)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Exceeded {
    pub size: bool,
    pub space: bool,
    pub time: bool,
}

impl Exceeded {
    pub fn any(&self) -> bool {
        self.size || self.space || self.time
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub sup_z: f64,
    pub sup_inv_z: f64,
    pub space_modulus: f64,
    pub time_modulus: f64,
    pub thresholds: Thresholds,
    pub exceeded: Exceeded,
    /// First grid time at which some threshold is crossed, or the last grid time.
    pub t_stop: f64,
}

/// Moduli of the Gärtner field over a time grid `frames = [(t, Z_t)]`.
///
/// Suprema in the ratios run over [0, t] as in the stopping times; the reported moduli are the
/// values at the end of the grid.
pub fn regularity_moduli(frames: &[(f64, Vec<f64>)], thresholds: Thresholds) -> Result<RegularityReport> {
    if frames.is_empty() {
        return Err(Error::Domain("regularity moduli need a non-empty time grid".into()));
    }
    let n = frames[0].1.len();
    if frames.iter().any(|f| f.1.len() != n) {
        return Err(Error::Domain("frames have different ring sizes".into()));
    }
    let nf = n as f64;
    let lmax = (2 * thresholds.l_reg(n)).min(n - 1) as i64;
    let size_thr = thresholds.size_threshold(n);
    let mod_thr = thresholds.modulus_threshold(n);
    let (mut sup_z, mut sup_inv) = (0.0f64, 0.0f64);
    let (mut grad_x, mut grad_t) = (0.0f64, 0.0f64);
    let mut space_modulus = 0.0;
    let mut time_modulus = 0.0;
    let mut exceeded = Exceeded::default();
    let mut t_stop = None;
    for (k, (t, z)) in frames.iter().enumerate() {
        for &v in z {
            sup_z = sup_z.max(v.abs());
            sup_inv = sup_inv.max(v.abs().recip());
        }
        for l in (-lmax..=lmax).filter(|&l| l != 0) {
            let g = spatial_gradient(z, l).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            grad_x = grad_x.max(nf.sqrt() * (l.abs() as f64).powf(-0.5) * g);
        }
        for j in (0..k).rev() {
            let s = t - frames[j].0;
            if s > 1.0 / nf {
                break;
            }
            let g = z.iter().zip(&frames[j].1).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            grad_t = grad_t.max(s.max(nf.powi(-2)).powf(-0.25) * g);
        }
        let denom = 1.0 + sup_z * sup_z;
        space_modulus = grad_x / denom;
        time_modulus = grad_t / denom;
        let now = Exceeded {
            size: sup_z + sup_inv >= size_thr,
            space: space_modulus >= mod_thr,
            time: time_modulus >= mod_thr,
        };
        if now.any() && t_stop.is_none() {
            t_stop = Some(*t);
        }
        exceeded.size |= now.size;
        exceeded.space |= now.space;
        exceeded.time |= now.time;
    }
    Ok(RegularityReport {
        sup_z,
        sup_inv_z: sup_inv,
        space_modulus,
        time_modulus,
        thresholds,
        exceeded,
        t_stop: t_stop.unwrap_or(frames.last().unwrap().0),
    })
}
