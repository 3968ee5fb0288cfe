use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::state::StateSpace;
use crate::dynamics::{validate_rates, RateModel};
use crate::ensembles::LocalFunction;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorVariant {
    /// ½N² Σ 𝓛_x.
    Sym,
    /// ½N^{3/2} Σ (1_{−+} − 1_{+−}) 𝓛_x; not a Markov generator on its own.
    FreeAsym,
    /// ½N^α Σ (1_{−+} − 1_{+−}) 𝔡[τ_x η] 𝓛_x.
    DriftOnly,
    Free,
    Full,
}

/// Sparse matrix Q with (Qf)(η) = Σ_η' Q(η, η') f(η') on an enumerated state space.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    pub variant: GeneratorVariant,
    pub scale: usize,
    rows: Vec<Vec<(u32, f64)>>,
    diag: Vec<f64>,
}

impl GeneratorMatrix {
    fn from_bond_rates(space: &StateSpace, variant: GeneratorVariant, scale: usize, rate: impl Fn(usize, usize) -> f64) -> Self {
        let mut rows = Vec::with_capacity(space.len());
        let mut diag = Vec::with_capacity(space.len());
        for i in 0..space.len() {
            let mut row: Vec<(u32, f64)> = Vec::new();
            let mut total = 0.0;
            for x in 0..space.ring() {
                if space.spin(i, x) == space.spin(i, (x + 1) % space.ring()) {
                    continue;
                }
                let r = rate(i, x);
                if r == 0.0 {
                    continue;
                }
                let j = space.swapped(i, x) as u32;
                match row.iter_mut().find(|e| e.0 == j) {
                    Some(e) => e.1 += r,
                    None => row.push((j, r)),
                }
                total += r;
            }
            row.sort_by_key(|e| e.0);
            rows.push(row);
            diag.push(-total);
        }
        GeneratorMatrix { variant, scale, rows, diag }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn row(&self, i: usize) -> &[(u32, f64)] {
        &self.rows[i]
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    /// (Qf)(i).
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.diag[i] * f[i] + self.rows[i].iter().map(|&(j, r)| r * f[j as usize]).sum::<f64>())
            .collect()
    }

    /// μ ↦ μQ for a measure μ given by its masses.
    pub fn apply_left(&self, mu: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = mu.iter().zip(&self.diag).map(|(m, d)| m * d).collect();
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, r) in row {
                out[j as usize] += mu[i] * r;
            }
        }
        out
    }

    /// Largest |Q(η, η)|.
    pub fn max_exit_rate(&self) -> f64 {
        self.diag.iter().fold(0.0f64, |m, d| m.max(d.abs()))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for &(j, r) in &self.rows[i] {
                m[(i, j as usize)] += r;
            }
        }
        m
    }

    pub fn is_markov(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|e| e.1 >= 0.0))
    }
}

/// Generator of the chosen variant on the ring of `space` with rate scale N and α = 1.
pub fn build_generator(space: &StateSpace, n: usize, d: &LocalFunction, variant: GeneratorVariant) -> Result<GeneratorMatrix> {
    build_generator_alpha(space, n, d, variant, 1.0)
}

pub fn build_generator_alpha(
    space: &StateSpace,
    n: usize,
    d: &LocalFunction,
    variant: GeneratorVariant,
    alpha: f64,
) -> Result<GeneratorMatrix> {
    if variant == GeneratorVariant::Full && !validate_rates(n, d, alpha) {
        return Err(Error::Validation(format!("jump rates are not all positive at N = {n}")));
    }
    let nf = n as f64;
    let sym = 0.5 * nf * nf;
    let asym = 0.5 * nf.powf(1.5);
    let drive = 0.5 * nf.powf(alpha);
    let configs: Vec<_> = (0..space.len()).map(|i| space.config(i)).collect();
    let m = space.ring();
    let sign = |i: usize, x: usize| -> f64 {
        // +1 on (−,+), −1 on (+,−)
        if space.spin(i, x) < space.spin(i, (x + 1) % m) {
            1.0
        } else {
            -1.0
        }
    };
    let rate = |i: usize, x: usize| -> f64 {
        let a = sign(i, x);
        let dv = || d.eval_at(&configs[i], x as i64);
        match variant {
            GeneratorVariant::Sym => sym,
            GeneratorVariant::FreeAsym => asym * a,
            GeneratorVariant::DriftOnly => drive * a * dv(),
            GeneratorVariant::Free => sym + asym * a,
            GeneratorVariant::Full => sym + asym * a + drive * a * dv(),
        }
    };
    Ok(GeneratorMatrix::from_bond_rates(space, variant, n, rate))
}

/// Generator assembled from the per-channel jump rates used by the simulator.
pub fn build_from_rates(space: &StateSpace, n: usize, d: &LocalFunction) -> Result<GeneratorMatrix> {
    let rates = RateModel::new(n, Some(d.clone()), 1.0)?;
    let configs: Vec<_> = (0..space.len()).map(|i| space.config(i)).collect();
    Ok(GeneratorMatrix::from_bond_rates(space, GeneratorVariant::Full, n, |i, x| rates.swap_rate(&configs[i], x)))
}

/// Largest entrywise difference between A and the sum of `parts`.
pub fn decomposition_error(a: &GeneratorMatrix, parts: &[&GeneratorMatrix]) -> f64 {
    let mut m = a.to_dense();
    for p in parts {
        m -= p.to_dense();
    }
    m.amax()
}
