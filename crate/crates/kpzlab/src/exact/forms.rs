use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::forward::{forward_grid, poisson_weights, TRUNCATION};
use super::generator::GeneratorMatrix;
use super::state::{expectation, inner, StateSpace};
use crate::{Error, Result};

pub const DENSE_CAP: usize = 4096;
pub const PSEUDO_INVERSE_CUTOFF: f64 = 1e-10;

/// D[f] = Σ_bonds E^π|f(η^{x,x+1}) − f(η)|².
pub fn dirichlet_form(space: &StateSpace, pi: &[f64], f: &[f64]) -> f64 {
    (0..space.ring()).map(|x| bond_dirichlet(space, pi, f, x)).sum()
}

pub fn bond_dirichlet(space: &StateSpace, pi: &[f64], f: &[f64], x: usize) -> f64 {
    (0..space.len())
        .map(|i| {
            let g = f[space.swapped(i, x)] - f[i];
            pi[i] * g * g
        })
        .sum()
}

/// E[f 𝓛_x f] with 𝓛_x f = f(η^{x,x+1}) − f(η).
pub fn bond_energy(space: &StateSpace, pi: &[f64], f: &[f64], x: usize) -> f64 {
    (0..space.len()).map(|i| pi[i] * f[i] * (f[space.swapped(i, x)] - f[i])).sum()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyProductionReport {
    pub n: usize,
    pub times: Vec<f64>,
    /// ∫₀^t D[√𝔭_s] ds on the grid.
    pub integral: Vec<f64>,
    pub entropy: f64,
    /// N^{−2}E[𝔭 log 𝔭] + N^{−1}t on the grid.
    pub bound: Vec<f64>,
    /// Smallest C with integral ≤ C·bound on the grid; 0 when the integral vanishes identically.
    pub constant: f64,
}

pub fn relative_entropy(pi: &[f64], p: &[f64]) -> f64 {
    pi.iter().zip(p).map(|(w, &v)| if v > 0.0 { w * v * v.ln() } else { 0.0 }).sum()
}

/// Time grid {0} ∪ geometric points from 10^{−3}N^{−2} to `t_max`.
pub fn entropy_time_grid(n: usize, t_max: f64, points: usize) -> Vec<f64> {
    let t0 = 1e-3 / (n * n) as f64;
    let mut out = vec![0.0];
    if t_max <= t0 || points < 2 {
        out.push(t_max);
        return out;
    }
    let r = (t_max / t0).ln() / (points - 1) as f64;
    out.extend((0..points).map(|k| t0 * (r * k as f64).exp()));
    *out.last_mut().unwrap() = t_max;
    out
}

/// Entropy production along the forward evolution of `gen` from `p0`; `times` must start at 0.
pub fn entropy_production_check(
    space: &StateSpace,
    gen: &GeneratorMatrix,
    pi: &[f64],
    p0: &[f64],
    times: &[f64],
) -> Result<EntropyProductionReport> {
    if times.first() != Some(&0.0) {
        return Err(Error::Domain("entropy time grid must start at 0".into()));
    }
    let n = gen.scale;
    let nf = n as f64;
    let dens = forward_grid(gen, pi, p0, times)?;
    let rate: Vec<f64> = dens
        .iter()
        .map(|p| {
            let r: Vec<f64> = p.iter().map(|v| v.max(0.0).sqrt()).collect();
            dirichlet_form(space, pi, &r)
        })
        .collect();
    let mut integral = vec![0.0];
    for k in 1..times.len() {
        let step = 0.5 * (rate[k] + rate[k - 1]) * (times[k] - times[k - 1]);
        integral.push(integral[k - 1] + step);
    }
    let entropy = relative_entropy(pi, p0);
    let bound: Vec<f64> = times.iter().map(|t| entropy / (nf * nf) + t / nf).collect();
    let constant = integral
        .iter()
        .zip(&bound)
        .filter(|(_, b)| **b > 0.0)
        .map(|(i, b)| i / b)
        .fold(0.0f64, f64::max);
    Ok(EntropyProductionReport { n, times: times.to_vec(), integral, entropy, bound, constant })
}

/// Spectral data of −S, the negative symmetric part of a generator with respect to π, in the
/// π-weighted coordinates g = π^{1/2}f.
#[derive(Clone, Debug)]
pub struct SymmetricPart {
    sqrt_pi: Vec<f64>,
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
    cutoff: f64,
}

impl SymmetricPart {
    pub fn new(gen: &GeneratorMatrix, pi: &[f64]) -> Result<Self> {
        let m = gen.len();
        if m > DENSE_CAP {
            return Err(Error::Capacity(format!("{m} states exceed the dense cap {DENSE_CAP}")));
        }
        let q = gen.to_dense();
        let sqrt_pi: Vec<f64> = pi.iter().map(|v| v.sqrt()).collect();
        // π_i Q_ij symmetrized, then conjugated by π^{−1/2}
        let mut s = DMatrix::zeros(m, m);
        for i in 0..m {
            for j in 0..m {
                let sym = 0.5 * (pi[i] * q[(i, j)] + pi[j] * q[(j, i)]);
                s[(i, j)] = -sym / (sqrt_pi[i] * sqrt_pi[j]);
            }
        }
        let eigen = SymmetricEigen::new(s);
        let norm = eigen.eigenvalues.amax();
        Ok(SymmetricPart { sqrt_pi, eigen, cutoff: PSEUDO_INVERSE_CUTOFF * norm.max(f64::MIN_POSITIVE) })
    }

    /// Eigenvalues μ ≥ 0 of −S.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen.eigenvalues.iter().copied().collect()
    }

    /// ⟨f, (−S)⁺ f⟩_π; errors when f has a component in the kernel of S.
    pub fn h_minus1_sq(&self, f: &[f64]) -> Result<f64> {
        let g = DVector::from_iterator(f.len(), f.iter().zip(&self.sqrt_pi).map(|(a, s)| a * s));
        let coords = self.eigen.eigenvectors.transpose() * &g;
        let scale = g.norm().max(1.0);
        let mut total = 0.0;
        for (c, &mu) in coords.iter().zip(self.eigen.eigenvalues.iter()) {
            if mu.abs() <= self.cutoff {
                if c.abs() > 1e-9 * scale {
                    return Err(Error::Domain(
                        "f has a component invariant under the symmetric dynamics; the H⁻¹ supremum is infinite".into(),
                    ));
                }
            } else {
                total += c * c / mu;
            }
        }
        Ok(total)
    }

    /// Eigenvector of −S (as a function on states) for the k-th eigenvalue in storage order.
    pub fn eigenfunction(&self, k: usize) -> (f64, Vec<f64>) {
        let v = self.eigen.eigenvectors.column(k);
        (self.eigen.eigenvalues[k], v.iter().zip(&self.sqrt_pi).map(|(a, s)| a / s).collect())
    }
}

/// sup_b {2E[fb] + E[b𝓛b]} for the given generator.
pub fn h_minus1_norm(gen: &GeneratorMatrix, pi: &[f64], f: &[f64]) -> Result<f64> {
    SymmetricPart::new(gen, pi)?.h_minus1_sq(f)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolventReport {
    pub lambda: f64,
    pub n: usize,
    pub h_minus1_sq: f64,
    /// λ‖u‖₂²/‖f‖²_{H⁻¹}.
    pub l2_ratio: f64,
    /// N²D[u]/‖f‖²_{H⁻¹}.
    pub dirichlet_ratio: f64,
    /// sup_p‖u‖_p/‖f‖_∞ = ‖u‖_∞/‖f‖_∞.
    pub linf_ratio: f64,
    /// λ‖u‖_∞/‖f‖_∞.
    pub linf_ratio_scaled: f64,
    pub solve_residual: f64,
}

/// u = (λ − 𝓛)^{−1}f and the resolvent ratios.
pub fn resolvent_checks(
    space: &StateSpace,
    gen: &GeneratorMatrix,
    sym: &SymmetricPart,
    pi: &[f64],
    f: &[f64],
    lambda: f64,
) -> Result<ResolventReport> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("λ = {lambda} must be positive")));
    }
    let (u, solve_residual) = resolvent(gen, f, lambda)?;
    let hm1 = sym.h_minus1_sq(f)?;
    let nf = gen.scale as f64;
    let l2 = inner(pi, &u, &u);
    let sup_u = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sup_f = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    Ok(ResolventReport {
        lambda,
        n: gen.scale,
        h_minus1_sq: hm1,
        l2_ratio: ratio(lambda * l2, hm1),
        dirichlet_ratio: ratio(nf * nf * dirichlet_form(space, pi, &u), hm1),
        linf_ratio: ratio(sup_u, sup_f),
        linf_ratio_scaled: ratio(lambda * sup_u, sup_f),
        solve_residual,
    })
}

/// Solves (λ − Q)u = f densely; returns u and the max-norm residual.
pub fn resolvent(gen: &GeneratorMatrix, f: &[f64], lambda: f64) -> Result<(Vec<f64>, f64)> {
    let m = gen.len();
    if m > DENSE_CAP {
        return Err(Error::Capacity(format!("{m} states exceed the dense cap {DENSE_CAP}")));
    }
    let a = DMatrix::identity(m, m) * lambda - gen.to_dense();
    let b = DVector::from_column_slice(f);
    let u = a
        .clone()
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Numeric("singular resolvent".into()))?;
    let residual = (&a * &u - &b).amax();
    Ok((u.iter().copied().collect(), residual))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KvOracle {
    pub t: f64,
    /// E|∫₀^t f(η_s)ds|² under the stationary law π.
    pub second_moment: f64,
    pub h_minus1_sq: Option<f64>,
    /// second_moment / (t‖f‖²_{H⁻¹}).
    pub bound_ratio: Option<f64>,
}

/// 2∫₀^t (t−s)⟨f, e^{sQ}f⟩_π ds, summed in closed form over the uniformization series.
pub fn kv_second_moment(gen: &GeneratorMatrix, pi: &[f64], f: &[f64], t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time {t}")));
    }
    let lam = gen.max_exit_rate();
    if lam == 0.0 || t == 0.0 {
        return Ok(inner(pi, f, f) * t * t);
    }
    let m = lam * t;
    let w = poisson_weights(m, TRUNCATION * 1e-4);
    // tails Q_{>n} = P(Pois > n)
    let mut tail = vec![0.0; w.len() + 2];
    let mut acc = 0.0;
    for n in (0..w.len()).rev() {
        tail[n] = acc;
        acc += w[n];
    }
    let q_gt = |n: usize| -> f64 {
        if n < w.len() {
            tail[n]
        } else {
            0.0
        }
    };
    let mut term = f.to_vec();
    let mut total = 0.0;
    for n in 0..w.len() {
        let c = inner(pi, f, &term);
        let a = q_gt(n) / lam;
        let b = (n + 1) as f64 * q_gt(n + 1) / (lam * lam);
        total += c * (t * a - b);
        if q_gt(n) == 0.0 {
            break;
        }
        let q = gen.apply(&term);
        for (x, y) in term.iter_mut().zip(&q) {
            *x += y / lam;
        }
    }
    Ok(2.0 * total.max(0.0))
}

pub fn kv_exact_oracle(gen: &GeneratorMatrix, sym: Option<&SymmetricPart>, pi: &[f64], f: &[f64], t: f64) -> Result<KvOracle> {
    if expectation(pi, f).abs() > 1e-10 {
        return Err(Error::Domain("f must be centred under the reference ensemble".into()));
    }
    let second_moment = kv_second_moment(gen, pi, f, t)?;
    let h_minus1_sq = match sym {
        Some(s) => Some(s.h_minus1_sq(f)?),
        None => None,
    };
    let bound_ratio = h_minus1_sq.filter(|h| *h > 0.0 && t > 0.0).map(|h| second_moment / (t * h));
    Ok(KvOracle { t, second_moment, h_minus1_sq, bound_ratio })
}
