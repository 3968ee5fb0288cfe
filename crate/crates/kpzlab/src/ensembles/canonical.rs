use serde::{Deserialize, Serialize};

use super::{LocalFunction, SpinConfig};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleSpec {
    /// Independent spins with mean σ.
    Product { sigma: f64 },
    /// Uniform on configurations of `interval_length` sites with `plus_count` plus spins.
    Canonical { interval_length: usize, plus_count: usize },
}

impl EnsembleSpec {
    pub fn canonical(interval_length: usize, plus_count: usize) -> Result<Self> {
        let spec = EnsembleSpec::Canonical { interval_length, plus_count };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            EnsembleSpec::Product { sigma } if !(-1.0..=1.0).contains(&sigma) => {
                Err(Error::Domain(format!("density {sigma} outside [-1, 1]")))
            }
            EnsembleSpec::Canonical { interval_length, plus_count } if interval_length == 0 || plus_count > interval_length => {
                Err(Error::Domain(format!("unreachable density: {plus_count} plus spins on {interval_length} sites")))
            }
            _ => Ok(()),
        }
    }

    pub fn density(&self) -> f64 {
        match *self {
            EnsembleSpec::Product { sigma } => sigma,
            EnsembleSpec::Canonical { interval_length, plus_count } => canonical_density(interval_length, plus_count),
        }
    }
}

/// σ = (2k − ℓ)/ℓ.
pub fn canonical_density(len: usize, plus: usize) -> f64 {
    (2.0 * plus as f64 - len as f64) / len as f64
}

/// Falling factorial x(x−1)…(x−j+1), as a float.
fn falling(x: usize, j: usize) -> f64 {
    if j > x {
        return 0.0;
    }
    (0..j).map(|i| (x - i) as f64).product()
}

/// Probability under the canonical ensemble (ℓ sites, k pluses) that `s` given sites carry a
/// prescribed pattern with `m` pluses: C(ℓ−s, k−m)/C(ℓ, k) = [k]_m [ℓ−k]_{s−m} / [ℓ]_s.
pub fn pattern_weight(len: usize, plus: usize, s: usize, m: usize) -> f64 {
    if m > s || s > len {
        return 0.0;
    }
    falling(plus, m) * falling(len - plus, s - m) / falling(len, s)
}

/// E^{σ,𝕀}[f] for f supported inside an interval of `len` sites with `plus` plus spins.
pub fn canonical_expectation(f: &LocalFunction, len: usize, plus: usize) -> Result<f64> {
    EnsembleSpec::canonical(len, plus)?;
    let s = f.len();
    if s > len {
        return Err(Error::Domain(format!("support of {s} sites does not fit in {len} sites")));
    }
    let weights: Vec<f64> = (0..=s).map(|m| pattern_weight(len, plus, s, m)).collect();
    Ok(f.table().iter().enumerate().map(|(idx, v)| v * weights[idx.count_ones() as usize]).sum())
}

/// 𝖤^{can,ℓ} at the origin as a function of the plus count `plus` in the block {−ℓ+1..0}.
///
/// Sites of the support inside the block follow the canonical ensemble; sites outside it are
/// independent and uniform, as under E⁰.
pub fn block_expectation_by_count(f: &LocalFunction, len: usize, plus: usize) -> Result<f64> {
    EnsembleSpec::canonical(len, plus)?;
    let block_lo = -(len as i64) + 1;
    let n = f.len();
    // Mask of window bits that lie inside the block.
    let mut inside = 0usize;
    for i in 0..n {
        let x = f.lo() + i as i64;
        if x >= block_lo && x <= 0 {
            inside |= 1 << (n - 1 - i);
        }
    }
    let s_in = inside.count_ones() as usize;
    let s_out = n - s_in;
    let weights: Vec<f64> = (0..=s_in).map(|m| pattern_weight(len, plus, s_in, m)).collect();
    let outside = 0.5f64.powi(s_out as i32);
    Ok(f
        .table()
        .iter()
        .enumerate()
        .map(|(idx, v)| v * weights[(idx & inside).count_ones() as usize])
        .sum::<f64>()
        * outside)
}

/// Plus count of the block of `len` sites ending at `site`.
pub fn block_plus_count(eta: &SpinConfig, site: i64, len: usize) -> usize {
    (0..len as i64).filter(|k| eta.at(site - k) > 0).count()
}

/// 𝖤^{can,ℓ}[τ_site η; f]: the canonical expectation of f given the plus count of η on the
/// ℓ sites ending at `site`.
pub fn canonical_block_expectation(eta: &SpinConfig, site: i64, len: usize, f: &LocalFunction) -> Result<f64> {
    if len == 0 || len > eta.ring_size() {
        return Err(Error::Domain(format!("block length {len} outside 1..={}", eta.ring_size())));
    }
    block_expectation_by_count(f, len, block_plus_count(eta, site, len))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CanonicalDecay {
    pub lens: Vec<usize>,
    /// max |𝖤^{can,ℓ}[·; f]| over block counts with |σ̂| ≤ ℓ^{−1/2}.
    pub maxima: Vec<f64>,
    pub slope: f64,
}

/// Decay of the block expectation of f near zero density, with the log-log slope in ℓ.
pub fn canonical_decay(f: &LocalFunction, lens: &[usize]) -> Result<CanonicalDecay> {
    let mut maxima = Vec::with_capacity(lens.len());
    for &len in lens {
        let cap = (len as f64).powf(-0.5);
        let mut worst = 0.0f64;
        for plus in 0..=len {
            if canonical_density(len, plus).abs() <= cap {
                worst = worst.max(block_expectation_by_count(f, len, plus)?.abs());
            }
        }
        maxima.push(worst);
    }
    let x: Vec<f64> = lens.iter().map(|&l| l as f64).collect();
    let slope = crate::stats::loglog_slope(&x, &maxima)?;
    Ok(CanonicalDecay { lens: lens.to_vec(), maxima, slope })
}
