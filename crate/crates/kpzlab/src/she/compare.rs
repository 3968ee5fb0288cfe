use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::stats::{ks_two_sample, Summary};
use crate::{Error, Result};

/// Replicas of a centred log-field L = −log Z on a uniform grid of the unit torus, at common times.
#[derive(Clone, Debug, Default)]
pub struct FieldEnsemble {
    pub times: Vec<f64>,
    pub points: usize,
    /// samples[replica][time][grid point]
    pub samples: Vec<Vec<Vec<f64>>>,
}

impl FieldEnsemble {
    pub fn new(times: Vec<f64>, points: usize) -> Self {
        FieldEnsemble { times, points, samples: Vec::new() }
    }

    pub fn push(&mut self, replica: Vec<Vec<f64>>) -> Result<()> {
        if replica.len() != self.times.len() || replica.iter().any(|f| f.len() != self.points) {
            return Err(Error::Validation("replica shape does not match the ensemble".into()));
        }
        self.samples.push(replica);
        Ok(())
    }

    pub fn replicas(&self) -> usize {
        self.samples.len()
    }

    /// Restriction to every `stride`-th grid point.
    pub fn coarsen(&self, stride: usize) -> FieldEnsemble {
        FieldEnsemble {
            times: self.times.clone(),
            points: self.points / stride,
            samples: self
                .samples
                .iter()
                .map(|r| r.iter().map(|f| f.iter().step_by(stride).copied().collect()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointStats {
    pub x: f64,
    pub mean: f64,
    pub variance: f64,
    /// (lag in grid steps, covariance of L(x) and L(x + lag))
    pub covariance: Vec<(usize, f64)>,
}

/// Per-point ensemble statistics at the k-th time.
pub fn ensemble_statistics(ens: &FieldEnsemble, k: usize, lags: &[usize]) -> Vec<PointStats> {
    let m = ens.points;
    let r = ens.replicas().max(1) as f64;
    let means: Vec<f64> = (0..m).map(|j| ens.samples.iter().map(|s| s[k][j]).sum::<f64>() / r).collect();
    let cov = |i: usize, j: usize| -> f64 {
        let c: f64 = ens.samples.iter().map(|s| (s[k][i] - means[i]) * (s[k][j] - means[j])).sum();
        if ens.replicas() > 1 {
            c / (r - 1.0)
        } else {
            0.0
        }
    };
    (0..m)
        .map(|j| PointStats {
            x: j as f64 / m as f64,
            mean: means[j],
            variance: cov(j, j),
            covariance: lags.iter().map(|&l| (l, cov(j, (j + l) % m))).collect(),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeComparison {
    pub t: f64,
    pub mean_a: f64,
    pub mean_b: f64,
    /// Spatial average of the one-point variance.
    pub var_a: f64,
    pub var_b: f64,
    /// |var_a − var_b| / var_b; 0 when both vanish.
    pub var_gap: f64,
    /// Two-sample KS distance of the pooled one-point values, each centred by its point mean.
    pub ks: f64,
    /// (lag as a fraction of the torus, cov_a, cov_b)
    pub covariance: Vec<(f64, f64, f64)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MartingaleDiagnostic {
    pub t: f64,
    pub mean: f64,
    pub variance: f64,
    /// E ∫₀^t ∫ Z²φ² dX ds.
    pub predicted: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KpzReport {
    pub points: usize,
    pub replicas_a: usize,
    pub replicas_b: usize,
    pub times: Vec<TimeComparison>,
    pub martingale_a: MartingaleDiagnostic,
    pub martingale_b: MartingaleDiagnostic,
}

/// Compares two ensembles at their common grid points; grids must divide one another.
pub fn kpz_compare(a: &FieldEnsemble, b: &FieldEnsemble, dbar: f64, lags: &[usize]) -> Result<KpzReport> {
    if a.times.len() != b.times.len() || a.times.iter().zip(&b.times).any(|(s, t)| (s - t).abs() > 1e-9) {
        return Err(Error::Validation("ensembles are recorded at different times".into()));
    }
    if a.replicas() < 2 || b.replicas() < 2 {
        return Err(Error::Validation("each ensemble needs at least two replicas".into()));
    }
    let points = a.points.min(b.points);
    if a.points % points != 0 || b.points % points != 0 {
        return Err(Error::Validation(format!("grids of {} and {} points do not nest", a.points, b.points)));
    }
    let ca = a.coarsen(a.points / points);
    let cb = b.coarsen(b.points / points);
    let mut times = Vec::with_capacity(a.times.len());
    for (k, &t) in a.times.iter().enumerate() {
        let sa = ensemble_statistics(&ca, k, lags);
        let sb = ensemble_statistics(&cb, k, lags);
        let avg = |s: &[PointStats], f: &dyn Fn(&PointStats) -> f64| s.iter().map(f).sum::<f64>() / s.len() as f64;
        let var_a = avg(&sa, &|p| p.variance);
        let var_b = avg(&sb, &|p| p.variance);
        let var_gap = if var_b > 0.0 {
            (var_a - var_b).abs() / var_b
        } else if var_a == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let pooled = |e: &FieldEnsemble, s: &[PointStats]| -> Vec<f64> {
            e.samples.iter().flat_map(|r| r[k].iter().zip(s).map(|(v, p)| v - p.mean).collect::<Vec<_>>()).collect()
        };
        let ks = ks_two_sample(&pooled(&ca, &sa), &pooled(&cb, &sb))?;
        let covariance = lags
            .iter()
            .enumerate()
            .map(|(i, &l)| (l as f64 / points as f64, avg(&sa, &|p| p.covariance[i].1), avg(&sb, &|p| p.covariance[i].1)))
            .collect();
        times.push(TimeComparison {
            t,
            mean_a: avg(&sa, &|p| p.mean),
            mean_b: avg(&sb, &|p| p.mean),
            var_a,
            var_b,
            var_gap,
            ks,
            covariance,
        });
    }
    Ok(KpzReport {
        points,
        replicas_a: a.replicas(),
        replicas_b: b.replicas(),
        times,
        martingale_a: martingale_diagnostic(a, dbar)?,
        martingale_b: martingale_diagnostic(b, dbar)?,
    })
}

/// 𝓜_t = ⟨Z_t,φ⟩ − ⟨Z_0,φ⟩ − ∫₀^t⟨Z_s, ½φ'' − d̄φ'⟩ds for φ = cos 2πX at the last recorded time,
/// with time integrals by the trapezoid rule on the recorded times.
pub fn martingale_diagnostic(ens: &FieldEnsemble, dbar: f64) -> Result<MartingaleDiagnostic> {
    let nt = ens.times.len();
    if nt < 2 {
        return Err(Error::Validation("martingale diagnostic needs at least two recorded times".into()));
    }
    let m = ens.points;
    let dx = 1.0 / m as f64;
    let x: Vec<f64> = (0..m).map(|j| j as f64 * dx).collect();
    let phi: Vec<f64> = x.iter().map(|x| (2.0 * PI * x).cos()).collect();
    let w = 2.0 * PI;
    let gen_phi: Vec<f64> = x.iter().map(|x| -0.5 * w * w * (w * x).cos() + dbar * w * (w * x).sin()).collect();
    let pair = |f: &[f64], g: &[f64]| f.iter().zip(g).map(|(a, b)| a * b).sum::<f64>() * dx;
    let mut values = Vec::with_capacity(ens.replicas());
    let mut qv = Vec::with_capacity(ens.replicas());
    for r in &ens.samples {
        let z: Vec<Vec<f64>> = r.iter().map(|l| l.iter().map(|v| (-v).exp()).collect()).collect();
        let drift: Vec<f64> = z.iter().map(|f| pair(f, &gen_phi)).collect();
        let energy: Vec<f64> = z.iter().map(|f| f.iter().zip(&phi).map(|(a, p)| a * a * p * p).sum::<f64>() * dx).collect();
        let mut int_drift = 0.0;
        let mut int_energy = 0.0;
        for k in 1..nt {
            let h = ens.times[k] - ens.times[k - 1];
            int_drift += 0.5 * h * (drift[k] + drift[k - 1]);
            int_energy += 0.5 * h * (energy[k] + energy[k - 1]);
        }
        values.push(pair(&z[nt - 1], &phi) - pair(&z[0], &phi) - int_drift);
        qv.push(int_energy);
    }
    let s = Summary::of(&values);
    let predicted = qv.iter().sum::<f64>() / qv.len() as f64;
    Ok(MartingaleDiagnostic {
        t: ens.times[nt - 1],
        mean: s.mean,
        variance: s.variance,
        predicted,
        ratio: if predicted > 0.0 { s.variance / predicted } else { 0.0 },
    })
}
