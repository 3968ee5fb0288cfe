use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::height::{gartner_from_height, height_from_config};
use super::regularity::{regularity_moduli, Thresholds};
use crate::dynamics::TrajectoryRecord;
use crate::ensembles::{FluxSet, SpinConfig};
use crate::heat_kernel::CirculantKernel;
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UpsilonConfig {
    /// Must be recorded times of the trajectory.
    pub report_times: Vec<f64>,
    /// Sites reported in the grid output; the sup norms always run over all sites.
    pub sites: Vec<usize>,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Use Y = Z·1{t ≤ t_stop} instead of Z.
    #[serde(default = "yes")]
    pub clip: bool,
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BGFunctional {
    pub times: Vec<f64>,
    pub sites: Vec<usize>,
    /// values[i][j] at times[i], sites[j].
    pub values_bg: Vec<Vec<f64>>,
    pub values_hl: Vec<Vec<f64>>,
    /// sup_x |Υ^BG_{t,x}| per report time.
    pub sup_bg: Vec<f64>,
    pub sup_hl: Vec<f64>,
    pub t_stop: f64,
    /// Largest change of Υ^BG at a report time when the sub-step is doubled.
    pub discretization_bg: f64,
    pub discretization_hl: f64,
}

struct Frame {
    time: f64,
    eta: SpinConfig,
    y: Vec<f64>,
}

fn duhamel(
    kernel: &CirculantKernel,
    frames: &[&Frame],
    report: &[f64],
    forcing: impl Fn(&SpinConfig, i64) -> f64,
) -> Vec<Option<Vec<f64>>> {
    let n = kernel.n();
    let nf = n as f64;
    let lambda = kernel.eigenvalues();
    let mut acc = vec![Complex64::new(0.0, 0.0); n];
    let mut out = vec![None; report.len()];
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let emit = |time: f64, acc: &[Complex64], out: &mut Vec<Option<Vec<f64>>>| {
        for (i, &rt) in report.iter().enumerate() {
            if rt == time {
                let mut b = acc.to_vec();
                kernel.inverse_in_place(&mut b);
                out[i] = Some(b.iter().map(|z| z.re / nf).collect());
            }
        }
    };
    emit(frames[0].time, &acc, &mut out);
    for w in frames.windows(2) {
        let (f0, f1) = (w[0], w[1]);
        let dt = f1.time - f0.time;
        for x in 0..n {
            buf[x] = Complex64::new(forcing(&f0.eta, x as i64) * f0.y[x], 0.0);
        }
        kernel.forward_in_place(&mut buf);
        for k in 0..n {
            let l = lambda[k];
            let e = (l * dt).exp();
            let phi = if l.norm() * dt < 1e-12 { Complex64::new(dt, 0.0) } else { (e - 1.0) / l };
            acc[k] = e * acc[k] + phi * buf[k];
        }
        emit(f1.time, &acc, &mut out);
    }
    out
}

/// Υ^BG_{t,x} = ∫₀^t e^{(t−s)𝒯_N}[N^{1/2}q̄(τ_·η_s)Y_s]_x ds and
/// Υ^HL_{t,x} = ∫₀^t e^{(t−s)𝒯_N}[(𝔤 − 𝔰)(τ_·η_s)Y_s]_x ds, with the integrand frozen at the
/// left end of each recorded sub-step and the semigroup applied exactly in Fourier space.
pub fn bg_functional(
    record: &TrajectoryRecord,
    kernel: &CirculantKernel,
    flux: &FluxSet,
    r_n: f64,
    cfg: &UpsilonConfig,
) -> Result<BGFunctional> {
    let n = record.ring_size;
    if kernel.n() != n {
        return Err(Error::Domain(format!("kernel built for N = {} but trajectory has N = {n}", kernel.n())));
    }
    if (kernel.dbar() - flux.dbar).abs() > 1e-12 {
        return Err(Error::Domain("kernel d̄ does not match the flux terms".into()));
    }
    let mut frames = vec![Frame { time: 0.0, eta: record.initial.clone(), y: Vec::new() }];
    for s in &record.snapshots {
        if s.time > 0.0 {
            frames.push(Frame { time: s.time, eta: s.config.clone(), y: Vec::new() });
        }
    }
    let mut flux_at = vec![0i64];
    flux_at.extend(record.snapshots.iter().filter(|s| s.time > 0.0).map(|s| s.flux));
    let z_frames: Vec<(f64, Vec<f64>)> = frames
        .iter()
        .zip(&flux_at)
        .map(|(f, &q)| (f.time, gartner_from_height(&height_from_config(&f.eta, q, f.time), r_n).values))
        .collect();
    let reg = regularity_moduli(&z_frames, cfg.thresholds)?;
    for (f, (_, z)) in frames.iter_mut().zip(z_frames) {
        f.y = if cfg.clip && f.time > reg.t_stop { vec![0.0; n] } else { z };
    }
    for &t in &cfg.report_times {
        if !frames.iter().any(|f| f.time == t) {
            return Err(Error::Domain(format!("report time {t} is not a recorded time")));
        }
    }
    if cfg.sites.iter().any(|&x| x >= n) {
        return Err(Error::Domain("report site outside the ring".into()));
    }
    let sqrt_n = (n as f64).sqrt();
    let bg = |eta: &SpinConfig, x: i64| sqrt_n * flux.q_bar.eval_at(eta, x);
    let hl = |eta: &SpinConfig, x: i64| flux.g.eval_at(eta, x) - flux.s.eval_at(eta, x);
    let fine: Vec<&Frame> = frames.iter().collect();
    let coarse: Vec<&Frame> = frames.iter().step_by(2).collect();
    let bg_fine = duhamel(kernel, &fine, &cfg.report_times, bg);
    let hl_fine = duhamel(kernel, &fine, &cfg.report_times, hl);
    let bg_coarse = duhamel(kernel, &coarse, &cfg.report_times, bg);
    let hl_coarse = duhamel(kernel, &coarse, &cfg.report_times, hl);
    let gap = |a: &[Option<Vec<f64>>], b: &[Option<Vec<f64>>]| {
        a.iter()
            .zip(b)
            .filter_map(|(u, v)| Some(u.as_ref()?.iter().zip(v.as_ref()?).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()))))
            .fold(0.0f64, f64::max)
    };
    let unwrap_all = |v: Vec<Option<Vec<f64>>>| -> Vec<Vec<f64>> { v.into_iter().map(|o| o.unwrap()).collect() };
    let discretization_bg = gap(&bg_fine, &bg_coarse);
    let discretization_hl = gap(&hl_fine, &hl_coarse);
    let bg_full = unwrap_all(bg_fine);
    let hl_full = unwrap_all(hl_fine);
    let sup = |v: &[Vec<f64>]| v.iter().map(|r| r.iter().fold(0.0f64, |m, x| m.max(x.abs()))).collect::<Vec<_>>();
    let pick = |v: &[Vec<f64>]| v.iter().map(|r| cfg.sites.iter().map(|&x| r[x]).collect()).collect::<Vec<Vec<f64>>>();
    Ok(BGFunctional {
        times: cfg.report_times.clone(),
        sites: cfg.sites.clone(),
        values_bg: pick(&bg_full),
        values_hl: pick(&hl_full),
        sup_bg: sup(&bg_full),
        sup_hl: sup(&hl_full),
        t_stop: reg.t_stop,
        discretization_bg,
        discretization_hl,
    })
}
