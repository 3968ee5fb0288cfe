use super::{compute_dbar, LocalFunction};
use crate::Result;

/// The local functions entering the evolution equation of the Gärtner transform.
#[derive(Clone, Debug)]
pub struct FluxSet {
    /// ½ d (1 − η₀η₁).
    pub q: LocalFunction,
    /// q[τ_{−2l} η].
    pub q_tilde: LocalFunction,
    /// q̃ − E⁰q̃ − d̄ η₀.
    pub q_bar: LocalFunction,
    /// −q̃ Σ_{y=0}^{2l−1} η_{−y}.
    pub s_tilde: LocalFunction,
    /// s̃ − E⁰s̃.
    pub s: LocalFunction,
    /// ½ d (η₁ − η₀) minus its E⁰ mean.
    pub g: LocalFunction,
    pub dbar: f64,
    pub e0_qtilde: f64,
    pub e0_stilde: f64,
    pub support_length: usize,
}

pub fn build_flux_terms(d: &LocalFunction) -> Result<FluxSet> {
    let dbar = compute_dbar(d)?;
    let l = d.support_length() as i64;
    let q = d.mul(&LocalFunction::product(&[0, 1]).map(|v| 0.5 * (1.0 - v)))?;
    let q_tilde = q.shifted(-2 * l);
    let e0_qtilde = q_tilde.mean_uniform();
    let q_bar = q_tilde.add_constant(-e0_qtilde).sub(&LocalFunction::site(0).scale(dbar))?;
    let mut block_sum = LocalFunction::constant(0.0);
    for y in 0..2 * l {
        block_sum = block_sum.add(&LocalFunction::site(-y))?;
    }
    let s_tilde = q_tilde.mul(&block_sum)?.scale(-1.0);
    let e0_stilde = s_tilde.mean_uniform();
    let s = s_tilde.add_constant(-e0_stilde);
    let g_raw = d.mul(&LocalFunction::site(1).sub(&LocalFunction::site(0))?)?.scale(0.5);
    let g = g_raw.add_constant(-g_raw.mean_uniform());
    Ok(FluxSet { q, q_tilde, q_bar, s_tilde, s, g, dbar, e0_qtilde, e0_stilde, support_length: l as usize })
}
