use serde::{Deserialize, Serialize};

use super::LocalFunction;

/// E^σ[f] = Σ_k c_k σ^k.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaPolynomial {
    pub coefficients: Vec<f64>,
}

impl SigmaPolynomial {
    pub fn eval(&self, sigma: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * sigma + c)
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coefficients.get(k).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.iter().rposition(|c| *c != 0.0).unwrap_or(0)
    }

    /// k-th derivative in σ at σ = 0.
    pub fn derivative_at_zero(&self, k: usize) -> f64 {
        self.coeff(k) * (1..=k).map(|i| i as f64).product::<f64>()
    }
}

/// E^σ[f] as a polynomial in σ, by exact enumeration of the window.
///
/// Configurations with `m` plus spins have weight ((1+σ)/2)^m ((1−σ)/2)^{n−m}, so the table
/// is first summed by plus count and the binomial weights expanded once per count.
pub fn product_expectation_poly(f: &LocalFunction) -> SigmaPolynomial {
    let n = f.len();
    let mut by_count = vec![0.0f64; n + 1];
    for (idx, v) in f.table().iter().enumerate() {
        by_count[idx.count_ones() as usize] += v;
    }
    let plus = [0.5, 0.5];
    let minus = [0.5, -0.5];
    let mut coefficients = vec![0.0f64; n + 1];
    for (m, total) in by_count.iter().enumerate() {
        if *total == 0.0 {
            continue;
        }
        let mut poly = vec![1.0f64];
        for _ in 0..m {
            poly = poly_mul(&poly, &plus);
        }
        for _ in m..n {
            poly = poly_mul(&poly, &minus);
        }
        for (k, c) in poly.iter().enumerate() {
            coefficients[k] += total * c;
        }
    }
    SigmaPolynomial { coefficients }
}

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// E^σ[f] by direct summation over windows (no polynomial expansion).
pub fn product_expectation(f: &LocalFunction, sigma: f64) -> f64 {
    let n = f.len() as i32;
    let p = 0.5 * (1.0 + sigma);
    let q = 0.5 * (1.0 - sigma);
    f.table()
        .iter()
        .enumerate()
        .map(|(idx, v)| {
            let m = idx.count_ones() as i32;
            v * p.powi(m) * q.powi(n - m)
        })
        .sum()
}
