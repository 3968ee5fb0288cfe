use super::generator::GeneratorMatrix;
use crate::{Error, Result};

pub const TRUNCATION: f64 = 1e-12;

/// Poisson(m) weights w_0..w_K with Σ_{n>K} w_n < `tail`, computed in log space.
pub fn poisson_weights(m: f64, tail: f64) -> Vec<f64> {
    if m <= 0.0 {
        return vec![1.0];
    }
    let mut out = Vec::new();
    let mut logw = -m;
    let mut cum = 0.0;
    let ln_m = m.ln();
    let mut k = 0usize;
    loop {
        let w = logw.exp();
        out.push(w);
        cum += w;
        k += 1;
        if (k as f64) > m && 1.0 - cum < tail {
            break;
        }
        // past the mode the remaining tail is at most w·m/(k+1−m)
        if (k as f64) > m + 1.0 && w * m / (k as f64 + 1.0 - m) < tail * 1e-3 {
            break;
        }
        logw += ln_m - (k as f64).ln();
    }
    out
}

/// Density 𝔭_t of the law at time t with respect to `pi`, starting from density `p0`.
///
/// The measure μ = 𝔭π solves μ' = μQ; it is expanded as Σ_n Pois(Λt; n) μ Pⁿ with P = I + Q/Λ.
pub fn forward_evolve(gen: &GeneratorMatrix, pi: &[f64], p0: &[f64], t: f64) -> Result<Vec<f64>> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::Domain(format!("evolution time {t}")));
    }
    let mu: Vec<f64> = p0.iter().zip(pi).map(|(p, w)| p * w).collect();
    let mu_t = evolve_measure(gen, &mu, t);
    Ok(mu_t.iter().zip(pi).map(|(m, w)| m / w).collect())
}

fn evolve_measure(gen: &GeneratorMatrix, mu: &[f64], t: f64) -> Vec<f64> {
    let lam = gen.max_exit_rate();
    if lam == 0.0 || t == 0.0 {
        return mu.to_vec();
    }
    let weights = poisson_weights(lam * t, TRUNCATION);
    let mut term = mu.to_vec();
    let mut acc: Vec<f64> = term.iter().map(|v| v * weights[0]).collect();
    for &w in &weights[1..] {
        let q = gen.apply_left(&term);
        for (a, b) in term.iter_mut().zip(&q) {
            *a += b / lam;
        }
        if w > 0.0 {
            for (a, b) in acc.iter_mut().zip(&term) {
                *a += w * b;
            }
        }
    }
    acc
}

/// e^{tQ}f, the backward semigroup.
pub fn backward_evolve(gen: &GeneratorMatrix, f: &[f64], t: f64) -> Vec<f64> {
    let lam = gen.max_exit_rate();
    if lam == 0.0 || t == 0.0 {
        return f.to_vec();
    }
    let weights = poisson_weights(lam * t, TRUNCATION);
    let mut term = f.to_vec();
    let mut acc: Vec<f64> = term.iter().map(|v| v * weights[0]).collect();
    for &w in &weights[1..] {
        let q = gen.apply(&term);
        for (a, b) in term.iter_mut().zip(&q) {
            *a += b / lam;
        }
        for (a, b) in acc.iter_mut().zip(&term) {
            *a += w * b;
        }
    }
    acc
}

/// Densities at each of the sorted `times`, evolved successively.
pub fn forward_grid(gen: &GeneratorMatrix, pi: &[f64], p0: &[f64], times: &[f64]) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(times.len());
    let mut mu: Vec<f64> = p0.iter().zip(pi).map(|(p, w)| p * w).collect();
    let mut now = 0.0;
    for &t in times {
        if t < now {
            return Err(Error::Domain("time grid must be sorted and nonnegative".into()));
        }
        mu = evolve_measure(gen, &mu, t - now);
        now = t;
        out.push(mu.iter().zip(pi).map(|(m, w)| m / w).collect());
    }
    Ok(out)
}

/// Validates a density: mean one under `pi`, no negative mass.
pub fn check_density(pi: &[f64], p: &[f64]) -> Result<()> {
    let mass: f64 = pi.iter().zip(p).map(|(w, v)| w * v).sum();
    if (mass - 1.0).abs() > 1e-12 || p.iter().any(|&v| v < -1e-14) {
        return Err(Error::Domain(format!("not a probability density (mass {mass})")));
    }
    Ok(())
}

/// max over the grid of E^{π}|𝔭_t|^p for each exponent.
pub fn lp_moments(pi: &[f64], densities: &[Vec<f64>], exponents: &[f64]) -> Vec<(f64, f64)> {
    exponents
        .iter()
        .map(|&p| {
            let m = densities
                .iter()
                .map(|d| pi.iter().zip(d).map(|(w, v)| w * v.abs().powf(p)).sum::<f64>())
                .fold(0.0f64, f64::max);
            (p, m)
        })
        .collect()
}
