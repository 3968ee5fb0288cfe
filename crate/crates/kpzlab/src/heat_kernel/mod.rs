//! The semigroup of 𝒯_N = ½N²Δ − d̄N∇_{−1} on 𝕋_N, diagonalized by the discrete Fourier
//! transform.

mod bounds;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution, Poisson};
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::rng::{stream, Role};
use crate::{Error, Result};

pub use bounds::{verify_bounds, BoundGrid, ConstantReport};

/// Circulant representation of e^{t𝒯_N}.
#[derive(Clone)]
pub struct CirculantKernel {
    n: usize,
    dbar: f64,
    eigenvalues: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CirculantKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CirculantKernel").field("n", &self.n).field("dbar", &self.dbar).finish()
    }
}

/// λ_k = ½N²(2cos θ_k − 2) − d̄N(e^{−iθ_k} − 1), θ_k = 2πk/N.
pub fn eigenvalue(n: usize, dbar: f64, k: usize) -> Complex64 {
    if k % n == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let nf = n as f64;
    let theta = 2.0 * PI * k as f64 / nf;
    let lap = 0.5 * nf * nf * (2.0 * theta.cos() - 2.0);
    lap - dbar * nf * (Complex64::from_polar(1.0, -theta) - 1.0)
}

pub fn build_kernel(n: usize, dbar: f64) -> Result<CirculantKernel> {
    if n < 2 {
        return Err(Error::Domain(format!("kernel needs N ≥ 2, got {n}")));
    }
    if !dbar.is_finite() {
        return Err(Error::Domain("d̄ must be finite".into()));
    }
    let mut planner = FftPlanner::new();
    Ok(CirculantKernel {
        n,
        dbar,
        eigenvalues: (0..n).map(|k| eigenvalue(n, dbar, k)).collect(),
        forward: planner.plan_fft_forward(n),
        inverse: planner.plan_fft_inverse(n),
    })
}

impl CirculantKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dbar(&self) -> f64 {
        self.dbar
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    /// Unnormalized inverse transform.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.inverse.process(buf);
    }

    /// g(m) = H_{0,dt,m,0}; the kernel satisfies H_{s,t,x,y} = g(x − y) with dt = t − s.
    pub fn profile(&self, dt: f64) -> Result<Vec<f64>> {
        if dt < 0.0 {
            return Err(Error::Domain(format!("negative time increment {dt}")));
        }
        let mut buf: Vec<Complex64> = self.eigenvalues.iter().map(|l| (l * dt).exp()).collect();
        self.inverse.process(&mut buf);
        let nf = self.n as f64;
        Ok(buf.iter().map(|z| z.re / nf).collect())
    }

    /// Dense matrix H_{s,t,·,·}.
    pub fn matrix(&self, dt: f64) -> Result<Vec<Vec<f64>>> {
        let g = self.profile(dt)?;
        let n = self.n;
        Ok((0..n).map(|x| (0..n).map(|y| g[(x + n - y) % n]).collect()).collect())
    }

    /// (e^{dt 𝒯_N} φ)_x.
    pub fn apply_semigroup(&self, dt: f64, phi: &[f64]) -> Result<Vec<f64>> {
        if phi.len() != self.n {
            return Err(Error::Domain("vector length does not match N".into()));
        }
        if dt < 0.0 {
            return Err(Error::Domain(format!("negative time increment {dt}")));
        }
        let mut buf: Vec<Complex64> = phi.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        for (z, l) in buf.iter_mut().zip(&self.eigenvalues) {
            *z *= (l * dt).exp();
        }
        self.inverse.process(&mut buf);
        let nf = self.n as f64;
        Ok(buf.iter().map(|z| z.re / nf).collect())
    }
}

/// H_{s,t,x,y} = N⁻¹ Σ_k e^{iθ_k(x−y)} e^{(t−s)λ_k}, summed directly.
pub fn kernel_entry(kernel: &CirculantKernel, s: f64, t: f64, x: i64, y: i64) -> Result<f64> {
    if t < s {
        return Err(Error::Domain(format!("t = {t} precedes s = {s}")));
    }
    let n = kernel.n;
    let m = (x - y).rem_euclid(n as i64) as f64;
    let sum: Complex64 = kernel
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(k, l)| Complex64::from_polar(1.0, 2.0 * PI * k as f64 * m / n as f64) * (l * (t - s)).exp())
        .sum();
    let value = sum / n as f64;
    if value.im.abs() > 1e-12 * value.re.abs().max(1.0) {
        return Err(Error::Numeric(format!("kernel entry has imaginary part {}", value.im)));
    }
    Ok(value.re)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub total_variation: f64,
    /// Expected total variation of an exact sample of the same size.
    pub null_mean: f64,
    pub null_sd: f64,
    pub replicas: usize,
}

impl CrosscheckReport {
    pub fn within(&self, sigmas: f64) -> bool {
        self.total_variation <= self.null_mean + sigmas * self.null_sd
    }
}

/// Samples X_t + Y_t started at 0 and compares its empirical law with the kernel row.
///
/// For d̄ ≥ 0 the walk steps each way at rate ½N² − d̄N and Y jumps right at rate d̄N;
/// for d̄ < 0 the walk steps each way at rate ½N² and Y jumps left at rate |d̄|N.
pub fn mc_crosscheck(kernel: &CirculantKernel, t: f64, replicas: usize, seed: u64) -> Result<CrosscheckReport> {
    if replicas == 0 || t < 0.0 {
        return Err(Error::Domain("need t ≥ 0 and at least one replica".into()));
    }
    let n = kernel.n;
    let nf = n as f64;
    let (side_rate, poisson_rate, direction) = if kernel.dbar >= 0.0 {
        (0.5 * nf * nf - kernel.dbar * nf, kernel.dbar * nf, 1i64)
    } else {
        (0.5 * nf * nf, -kernel.dbar * nf, -1i64)
    };
    if side_rate < 0.0 {
        return Err(Error::Domain(format!("d̄N exceeds ½N² at N = {n}, d̄ = {}", kernel.dbar)));
    }
    let mut rng = stream(seed, 0, Role::Walk);
    let mut counts = vec![0u64; n];
    for _ in 0..replicas {
        let jumps = poisson_sample(2.0 * side_rate * t, &mut rng);
        let right = if jumps > 0 { Binomial::new(jumps, 0.5).unwrap().sample(&mut rng) } else { 0 };
        let extra = poisson_sample(poisson_rate * t, &mut rng);
        let pos = 2 * right as i64 - jumps as i64 + direction * extra as i64;
        counts[pos.rem_euclid(n as i64) as usize] += 1;
    }
    // law of X_t from 0 is H_{0,t,0,·} = g(−·)
    let g = kernel.profile(t)?;
    let row: Vec<f64> = (0..n).map(|y| g[(n - y) % n]).collect();
    let r = replicas as f64;
    let tv = 0.5 * counts.iter().zip(&row).map(|(&c, &p)| (c as f64 / r - p).abs()).sum::<f64>();
    let null_mean = 0.5 * row.iter().map(|&p| (2.0 * p.max(0.0) * (1.0 - p) / (PI * r)).sqrt()).sum::<f64>();
    let null_var = 0.25 * row.iter().map(|&p| p.max(0.0) * (1.0 - p) * (1.0 - 2.0 / PI) / r).sum::<f64>();
    Ok(CrosscheckReport { total_variation: tv, null_mean, null_sd: null_var.sqrt(), replicas })
}

fn poisson_sample<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean).unwrap().sample(rng) as u64
    }
}
