use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SpinConfig;
use crate::{Error, Result};

/// Default cap on the number of sites a local function may depend on.
pub const ENUMERATION_CAP: usize = 24;

/// Largest radius accepted for driving functions.
pub const MAX_DRIVING_RADIUS: usize = 5;

/// A function of the spins on the sites `lo..lo+len` relative to the evaluation site,
/// stored as a table over the `2^len` window configurations.
///
/// Window index: bit `len-1-i` holds site `lo+i` (leftmost site most significant), set for +1.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalFunction {
    lo: i64,
    len: usize,
    table: Vec<f64>,
    sup_norm: f64,
}

#[derive(Serialize, Deserialize)]
struct DrivingJson {
    radius: usize,
    table: Vec<f64>,
}

impl LocalFunction {
    pub fn new(lo: i64, len: usize, table: Vec<f64>) -> Result<Self> {
        if len > ENUMERATION_CAP {
            return Err(Error::Capacity(format!("window of {len} sites exceeds cap {ENUMERATION_CAP}")));
        }
        if table.len() != 1usize << len {
            return Err(Error::Domain(format!("table has {} entries, expected 2^{len}", table.len())));
        }
        if table.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("table entries must be finite".into()));
        }
        let sup_norm = table.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(LocalFunction { lo, len, table, sup_norm })
    }

    /// Window −r..r.
    pub fn with_radius(radius: usize, table: Vec<f64>) -> Result<Self> {
        Self::new(-(radius as i64), 2 * radius + 1, table)
    }

    /// Builds the table by evaluating `f` on every window; `f` receives spins of sites `lo..lo+len`.
    pub fn from_fn(lo: i64, len: usize, f: impl Fn(&[i8]) -> f64) -> Result<Self> {
        if len > ENUMERATION_CAP {
            return Err(Error::Capacity(format!("window of {len} sites exceeds cap {ENUMERATION_CAP}")));
        }
        let mut spins = vec![-1i8; len];
        let table = (0..1usize << len)
            .map(|idx| {
                decode_into(idx, &mut spins);
                f(&spins)
            })
            .collect();
        Self::new(lo, len, table)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(0, 0, vec![c]).expect("constant table")
    }

    /// η ↦ η_x.
    pub fn site(x: i64) -> Self {
        Self::product(&[x])
    }

    /// η ↦ ∏ η_{x_i}.
    pub fn product(sites: &[i64]) -> Self {
        if sites.is_empty() {
            return Self::constant(1.0);
        }
        let lo = *sites.iter().min().unwrap();
        let hi = *sites.iter().max().unwrap();
        Self::from_fn(lo, (hi - lo + 1) as usize, |s| {
            sites.iter().map(|&x| s[(x - lo) as usize] as f64).product()
        })
        .expect("small product")
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.len as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    /// Radius r when the window is −r..r.
    pub fn radius(&self) -> Option<usize> {
        (self.len % 2 == 1 && self.lo == -((self.len / 2) as i64)).then_some(self.len / 2)
    }

    #[inline]
    pub fn eval_index(&self, idx: usize) -> f64 {
        self.table[idx]
    }

    /// Value on explicit spins of the window sites.
    pub fn eval_spins(&self, spins: &[i8]) -> f64 {
        debug_assert_eq!(spins.len(), self.len);
        self.table[encode(spins)]
    }

    /// f(τ_x η), with the window wrapping around the ring.
    #[inline]
    pub fn eval_at(&self, eta: &SpinConfig, x: i64) -> f64 {
        self.table[eta.window(x + self.lo, self.len)]
    }

    /// f evaluated with spins supplied by `spin(site)` for sites relative to the origin.
    pub fn eval_with(&self, spin: impl Fn(i64) -> i8) -> f64 {
        let mut idx = 0usize;
        for i in 0..self.len as i64 {
            idx = (idx << 1) | (spin(self.lo + i) > 0) as usize;
        }
        self.table[idx]
    }

    /// Same function on the larger window `lo..lo+len`, which must contain the current one.
    pub fn extend_to(&self, lo: i64, len: usize) -> Result<Self> {
        let hi = lo + len as i64 - 1;
        if self.len > 0 && (lo > self.lo || hi < self.hi()) {
            return Err(Error::Domain("extension window must contain the support".into()));
        }
        if self.len == 0 {
            let c = self.table[0];
            return Self::from_fn(lo, len, |_| c);
        }
        let off = (self.lo - lo) as usize;
        Self::from_fn(lo, len, |s| {
            self.eval_spins(&s[off..off + self.len])
        })
    }

    /// g[η] = f[τ_k η]: g reads the sites shifted by `k`.
    pub fn shifted(&self, k: i64) -> Self {
        LocalFunction { lo: self.lo + k, ..self.clone() }
    }

    /// Pointwise combination over the union of the two windows.
    pub fn zip_with(&self, other: &LocalFunction, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let (lo, len) = union_window(self, other);
        let a = self.extend_to(lo, len)?;
        let b = other.extend_to(lo, len)?;
        let table = a.table.iter().zip(&b.table).map(|(x, y)| op(*x, *y)).collect();
        Self::new(lo, len, table)
    }

    pub fn add(&self, other: &LocalFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LocalFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &LocalFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self::new(self.lo, self.len, self.table.iter().map(|v| op(*v)).collect()).expect("same shape")
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    /// Mean under the uniform product measure (σ = 0).
    pub fn mean_uniform(&self) -> f64 {
        self.table.iter().sum::<f64>() / self.table.len() as f64
    }

    /// Relative sites on which the function actually depends.
    pub fn dependence_set(&self) -> Vec<i64> {
        (0..self.len)
            .filter(|&i| {
                let bit = 1usize << (self.len - 1 - i);
                (0..self.table.len()).any(|idx| idx & bit == 0 && self.table[idx] != self.table[idx | bit])
            })
            .map(|i| self.lo + i as i64)
            .collect()
    }

    /// Smallest positive l such that the function depends only on sites |x| ≤ l.
    pub fn support_length(&self) -> usize {
        self.dependence_set().iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0).max(1)
    }

    /// Loads `{ "radius": r, "table": [...] }`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: DrivingJson = serde_json::from_str(text)?;
        Self::driving(raw.radius, raw.table)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// A driving function table on −r..r with r within the accepted range.
    pub fn driving(radius: usize, table: Vec<f64>) -> Result<Self> {
        if radius > MAX_DRIVING_RADIUS {
            return Err(Error::Capacity(format!("driving radius {radius} exceeds {MAX_DRIVING_RADIUS}")));
        }
        Self::with_radius(radius, table)
    }

    /// JSON in the driving-function format; the window is widened to be symmetric.
    pub fn to_json_string(&self) -> Result<String> {
        let r = self.lo.unsigned_abs().max(self.hi().unsigned_abs()) as usize;
        let sym = self.extend_to(-(r as i64), 2 * r + 1)?;
        Ok(serde_json::to_string(&DrivingJson { radius: r, table: sym.table })?)
    }
}

fn union_window(a: &LocalFunction, b: &LocalFunction) -> (i64, usize) {
    match (a.len, b.len) {
        (0, 0) => (0, 0),
        (0, _) => (b.lo, b.len),
        (_, 0) => (a.lo, a.len),
        _ => {
            let lo = a.lo.min(b.lo);
            let hi = a.hi().max(b.hi());
            (lo, (hi - lo + 1) as usize)
        }
    }
}

/// Spins of a window index, leftmost site first.
pub fn decode_into(idx: usize, spins: &mut [i8]) {
    let len = spins.len();
    for (i, s) in spins.iter_mut().enumerate() {
        *s = if (idx >> (len - 1 - i)) & 1 == 1 { 1 } else { -1 };
    }
}

pub fn encode(spins: &[i8]) -> usize {
    spins.iter().fold(0usize, |acc, &s| (acc << 1) | (s > 0) as usize)
}
