use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::rng::{stream, Role};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Explicit,
    SemiImplicit,
}

fn one() -> f64 {
    1.0
}

/// Discretization of ∂Z = ½ΔZ + d̄∂_xZ − Zξ on the unit torus.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SheConfig {
    /// Grid points M; dx = 1/M.
    pub m: usize,
    pub dt: f64,
    pub dbar: f64,
    pub horizon: f64,
    /// h at t = 0 per grid point; empty means flat zero.
    #[serde(default)]
    pub initial_h: Vec<f64>,
    pub seed: u64,
    #[serde(default)]
    pub replica: u64,
    pub scheme: Scheme,
    /// Sorted times at which Z is stored; 0 and the horizon are always included.
    #[serde(default)]
    pub record_times: Vec<f64>,
    /// Multiplier on the noise; 0 gives the deterministic equation.
    #[serde(default = "one")]
    pub noise: f64,
}

impl SheConfig {
    pub fn flat(m: usize, dt: f64, horizon: f64, seed: u64, scheme: Scheme) -> Self {
        SheConfig {
            m,
            dt,
            dbar: 0.0,
            horizon,
            initial_h: Vec::new(),
            seed,
            replica: 0,
            scheme,
            record_times: Vec::new(),
            noise: 1.0,
        }
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 3 {
            return Err(Error::Validation(format!("M = {} needs at least 3 grid points", self.m)));
        }
        if !(self.dt > 0.0) || !(self.horizon >= 0.0) || !self.dbar.is_finite() || !self.noise.is_finite() {
            return Err(Error::Validation("dt must be positive, horizon nonnegative, d̄ finite".into()));
        }
        let dx = self.dx();
        if self.scheme == Scheme::Explicit && self.dt > 0.5 * dx * dx * (1.0 + 1e-12) {
            return Err(Error::Validation(format!("explicit scheme needs dt ≤ dx²/2 = {}", 0.5 * dx * dx)));
        }
        if !self.initial_h.is_empty() && self.initial_h.len() != self.m {
            return Err(Error::Validation(format!("initial_h has {} values for M = {}", self.initial_h.len(), self.m)));
        }
        if self.initial_h.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("initial_h must be finite".into()));
        }
        if self.record_times.windows(2).any(|w| w[1] < w[0]) || self.record_times.iter().any(|t| *t < 0.0 || *t > self.horizon) {
            return Err(Error::Validation("record times must be sorted and inside [0, horizon]".into()));
        }
        Ok(())
    }

    fn steps(&self) -> usize {
        (self.horizon / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SheField {
    pub m: usize,
    pub times: Vec<f64>,
    /// Z at each recorded time.
    pub z: Vec<Vec<f64>>,
}

impl SheField {
    /// h = −log Z at the k-th recorded time.
    pub fn h(&self, k: usize) -> Vec<f64> {
        self.z[k].iter().map(|v| -v.ln()).collect()
    }

    pub fn frame_at(&self, t: f64) -> Option<usize> {
        self.times.iter().position(|s| (s - t).abs() <= 1e-9 * t.abs().max(1.0))
    }
}

/// Solves (I − cΔ)u = r on the ring for the stencil (−c, 1 + 2c, −c), c ≥ 0.
pub struct CyclicSolver {
    c: f64,
    /// Thomas factors of the open chain.
    cprime: Vec<f64>,
    denom: Vec<f64>,
    /// Response to the two corner corrections.
    z: Vec<f64>,
    zfactor: f64,
}

impl CyclicSolver {
    pub fn new(m: usize, c: f64) -> Self {
        let a = -c;
        let b = 1.0 + 2.0 * c;
        // Sherman–Morrison with γ = −b: A = T + uvᵀ, u = (γ,0,..,0,a), v = (1,0,..,0,a/γ)
        let gamma = -b;
        let mut diag = vec![b; m];
        diag[0] = b - gamma;
        diag[m - 1] = b - a * a / gamma;
        let mut cprime = vec![0.0; m];
        let mut denom = vec![0.0; m];
        denom[0] = diag[0];
        cprime[0] = a / denom[0];
        for i in 1..m {
            denom[i] = diag[i] - a * cprime[i - 1];
            cprime[i] = a / denom[i];
        }
        let mut solver = CyclicSolver { c, cprime, denom, z: Vec::new(), zfactor: 0.0 };
        let mut u = vec![0.0; m];
        u[0] = gamma;
        u[m - 1] = a;
        let z = solver.thomas(&u);
        let vz = z[0] + a / gamma * z[m - 1];
        solver.zfactor = 1.0 + vz;
        solver.z = z;
        solver
    }

    fn thomas(&self, r: &[f64]) -> Vec<f64> {
        let m = r.len();
        let a = -self.c;
        let mut y = vec![0.0; m];
        y[0] = r[0] / self.denom[0];
        for i in 1..m {
            y[i] = (r[i] - a * y[i - 1]) / self.denom[i];
        }
        for i in (0..m - 1).rev() {
            y[i] -= self.cprime[i] * y[i + 1];
        }
        y
    }

    pub fn solve(&self, r: &[f64]) -> Vec<f64> {
        let m = r.len();
        let a = -self.c;
        let gamma = -(1.0 + 2.0 * self.c);
        let y = self.thomas(r);
        let vy = y[0] + a / gamma * y[m - 1];
        let k = vy / self.zfactor;
        y.iter().zip(&self.z).map(|(yi, zi)| yi - k * zi).collect()
    }
}

/// Itô Euler–Maruyama run of one replica; the noise stream is keyed by (seed, replica).
pub fn solve_she(cfg: &SheConfig) -> Result<SheField> {
    cfg.validate()?;
    let mut rng = stream(cfg.seed, cfg.replica, Role::Noise);
    solve_she_with(cfg, || rng.sample(StandardNormal))
}

/// As [`solve_she`] with an explicit source of standard Gaussians.
pub fn solve_she_with(cfg: &SheConfig, mut gauss: impl FnMut() -> f64) -> Result<SheField> {
    cfg.validate()?;
    let m = cfg.m;
    let dx = cfg.dx();
    let dt = cfg.dt;
    let mut z: Vec<f64> = if cfg.initial_h.is_empty() { vec![1.0; m] } else { cfg.initial_h.iter().map(|h| (-h).exp()).collect() };
    let sigma = cfg.noise * (dt / dx).sqrt();
    let lap = 0.5 * dt / (dx * dx);
    let drift = cfg.dbar * dt / dx;
    let solver = (cfg.scheme == Scheme::SemiImplicit).then(|| CyclicSolver::new(m, lap));

    let mut pending: Vec<f64> = cfg.record_times.iter().copied().filter(|t| *t > 0.0).collect();
    pending.push(cfg.horizon);
    pending.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let mut times = vec![0.0];
    let mut frames = vec![z.clone()];
    let mut next = 0usize;
    let mut rhs = vec![0.0; m];
    let steps = cfg.steps();
    for step in 1..=steps {
        for j in 0..m {
            let left = z[(j + m - 1) % m];
            let right = z[(j + 1) % m];
            // d̄·(Z_j − Z_{j−1})/dx, the orientation of the discrete kernel
            let mut v = z[j] + drift * (z[j] - left) - sigma * z[j] * gauss();
            if solver.is_none() {
                v += lap * (left - 2.0 * z[j] + right);
            }
            rhs[j] = v;
        }
        match &solver {
            Some(s) => z = s.solve(&rhs),
            None => std::mem::swap(&mut z, &mut rhs),
        }
        if let Some(j) = z.iter().position(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::Numeric(format!(
                "positivity lost at step {step} (t = {:.6}), grid point {j}; refine dt",
                step as f64 * dt
            )));
        }
        let t = step as f64 * dt;
        while next < pending.len() && t >= pending[next] - 1e-9 * dt {
            times.push(pending[next]);
            frames.push(z.clone());
            next += 1;
        }
    }
    while next < pending.len() {
        times.push(pending[next]);
        frames.push(z.clone());
        next += 1;
    }
    Ok(SheField { m, times, z: frames })
}

/// Periodic linear interpolation of a profile sampled at X = x/len onto M points.
pub fn interpolate_profile(h: &[f64], m: usize) -> Vec<f64> {
    let n = h.len();
    (0..m)
        .map(|j| {
            let pos = j as f64 * n as f64 / m as f64;
            let i = pos.floor() as usize % n;
            let w = pos - pos.floor();
            (1.0 - w) * h[i] + w * h[(i + 1) % n]
        })
        .collect()
}
