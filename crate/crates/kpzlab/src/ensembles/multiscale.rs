use super::{canonical_block_expectation, LocalFunction, SpinConfig};
use crate::{Error, Result};

/// Rounds to the nearest integer, ties upward, and clamps below at 1.
pub fn round_scale(x: f64) -> usize {
    ((x + 0.5).floor() as usize).max(1)
}

/// Scales ℓ_k = round(N^{k ε_step}) for k = 1..=K_step.
pub fn multiscale_scales(n: usize, eps_step: f64, k_step: usize) -> Result<Vec<usize>> {
    if k_step == 0 || eps_step <= 0.0 {
        return Err(Error::Domain("need K_step ≥ 1 and ε_step > 0".into()));
    }
    let scales: Vec<usize> = (1..=k_step).map(|k| round_scale((n as f64).powf(k as f64 * eps_step))).collect();
    if scales.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!("scales {scales:?} are not strictly increasing")));
    }
    if *scales.last().unwrap() > n {
        return Err(Error::Domain(format!("largest scale {} exceeds the ring size {n}", scales.last().unwrap())));
    }
    Ok(scales)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiscaleTerms {
    pub scales: Vec<usize>,
    /// R̃_k for k = 0..K_step.
    pub terms: Vec<f64>,
    /// f(τ_site η).
    pub value: f64,
    /// 𝖤^{can,ℓ_K}[τ_site η; f].
    pub tail: f64,
}

/// R̃_0 = f − 𝖤^{can,ℓ₁}, R̃_k = 𝖤^{can,ℓ_k} − 𝖤^{can,ℓ_{k+1}}, all at τ_site η.
pub fn multiscale_terms(
    eta: &SpinConfig,
    site: i64,
    f: &LocalFunction,
    eps_step: f64,
    k_step: usize,
) -> Result<MultiscaleTerms> {
    let scales = multiscale_scales(eta.ring_size(), eps_step, k_step)?;
    multiscale_terms_with(eta, site, f, &scales)
}

/// [`multiscale_terms`] with explicit scales.
pub fn multiscale_terms_with(eta: &SpinConfig, site: i64, f: &LocalFunction, scales: &[usize]) -> Result<MultiscaleTerms> {
    if scales.is_empty() {
        return Err(Error::Domain("need at least one scale".into()));
    }
    let k_step = scales.len();
    let value = f.eval_at(eta, site);
    let conditional: Vec<f64> = scales
        .iter()
        .map(|&len| canonical_block_expectation(eta, site, len, f))
        .collect::<Result<_>>()?;
    let mut terms = Vec::with_capacity(k_step);
    terms.push(value - conditional[0]);
    for k in 1..k_step {
        terms.push(conditional[k - 1] - conditional[k]);
    }
    Ok(MultiscaleTerms { scales: scales.to_vec(), terms, value, tail: *conditional.last().unwrap() })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CenteringCheck {
    /// max over k and plus counts of |E^{can}[R̃_k]| on the outer block.
    pub max_mean: f64,
    /// max |Σ_k R̃_k + 𝖤^{can,ℓ_K} − f| over all configurations.
    pub max_telescoping: f64,
}

/// Exhaustive check that each R̃_k is centred under the canonical ensemble of the `outer` sites
/// ending at the origin. f must be supported in the smallest block.
pub fn centering_check(f: &LocalFunction, scales: &[usize], outer: usize) -> Result<CenteringCheck> {
    if scales.is_empty() || scales.windows(2).any(|w| w[1] <= w[0]) || *scales.last().unwrap() > outer {
        return Err(Error::Domain(format!("scales {scales:?} must increase up to the outer block {outer}")));
    }
    if outer > 20 {
        return Err(Error::Domain(format!("outer block {outer} too large to enumerate")));
    }
    if f.lo() < 1 - scales[0] as i64 || f.hi() > 0 {
        return Err(Error::Domain("support of f must lie in the smallest block".into()));
    }
    // Ring of `outer` sites with the origin at the last site, so blocks never wrap.
    let site = outer as i64 - 1;
    let k_step = scales.len();
    let mut sums = vec![vec![0.0; k_step]; outer + 1];
    let mut counts = vec![0usize; outer + 1];
    let mut max_telescoping = 0.0f64;
    for mask in 0..1u64 << outer {
        let eta = SpinConfig::from_mask(outer, mask);
        let t = multiscale_terms_with(&eta, site, f, scales)?;
        let plus = mask.count_ones() as usize;
        counts[plus] += 1;
        for (s, v) in sums[plus].iter_mut().zip(&t.terms) {
            *s += v;
        }
        max_telescoping = max_telescoping.max((t.terms.iter().sum::<f64>() + t.tail - t.value).abs());
    }
    let mut max_mean = 0.0f64;
    for (row, &c) in sums.iter().zip(&counts) {
        for s in row {
            max_mean = max_mean.max((s / c as f64).abs());
        }
    }
    Ok(CenteringCheck { max_mean, max_telescoping })
}
