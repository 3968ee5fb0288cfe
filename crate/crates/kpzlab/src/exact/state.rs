use serde::{Deserialize, Serialize};

use crate::ensembles::SpinConfig;
use crate::{Error, Result};

pub const CUBE_CAP: usize = 14;
pub const HYPERPLANE_CAP: usize = 18;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mode {
    Cube,
    Hyperplane { plus_count: usize },
}

/// Enumerated configurations of a ring of `ring` sites; bit i of a state is the spin at site i.
#[derive(Clone, Debug)]
pub struct StateSpace {
    ring: usize,
    mode: Mode,
    states: Vec<u32>,
    lookup: Vec<u32>,
}

impl StateSpace {
    pub fn new(ring: usize, mode: Mode) -> Result<Self> {
        let cap = match mode {
            Mode::Cube => CUBE_CAP,
            Mode::Hyperplane { .. } => HYPERPLANE_CAP,
        };
        if ring < 2 || ring > cap {
            return Err(Error::Capacity(format!("ring of {ring} sites outside 2..={cap} for {mode:?}")));
        }
        if let Mode::Hyperplane { plus_count } = mode {
            if plus_count > ring {
                return Err(Error::Domain(format!("{plus_count} particles on {ring} sites")));
            }
        }
        let states: Vec<u32> = (0..1u32 << ring)
            .filter(|m| match mode {
                Mode::Cube => true,
                Mode::Hyperplane { plus_count } => m.count_ones() as usize == plus_count,
            })
            .collect();
        let mut lookup = vec![u32::MAX; 1 << ring];
        for (i, &m) in states.iter().enumerate() {
            lookup[m as usize] = i as u32;
        }
        Ok(StateSpace { ring, mode, states, lookup })
    }

    pub fn cube(ring: usize) -> Result<Self> {
        Self::new(ring, Mode::Cube)
    }

    pub fn hyperplane(ring: usize, plus_count: usize) -> Result<Self> {
        Self::new(ring, Mode::Hyperplane { plus_count })
    }

    pub fn ring(&self) -> usize {
        self.ring
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> u32 {
        self.states[i]
    }

    pub fn index(&self, mask: u32) -> Option<usize> {
        self.lookup.get(mask as usize).filter(|&&v| v != u32::MAX).map(|&v| v as usize)
    }

    pub fn config(&self, i: usize) -> SpinConfig {
        SpinConfig::from_mask(self.ring, self.states[i] as u64)
    }

    #[inline]
    pub fn spin(&self, i: usize, x: usize) -> i8 {
        if (self.states[i] >> x) & 1 == 1 {
            1
        } else {
            -1
        }
    }

    /// Index of η^{x,x+1}.
    pub fn swapped(&self, i: usize, x: usize) -> usize {
        let y = (x + 1) % self.ring;
        let m = self.states[i];
        let bx = (m >> x) & 1;
        let by = (m >> y) & 1;
        let m2 = if bx == by { m } else { m ^ (1 << x) ^ (1 << y) };
        self.lookup[m2 as usize] as usize
    }

    /// ℙ^σ on the cube; the uniform measure on a hyperplane (which is ℙ^{σ,𝕃} for every σ).
    pub fn weights(&self, sigma: f64) -> Vec<f64> {
        match self.mode {
            Mode::Hyperplane { .. } => vec![1.0 / self.len() as f64; self.len()],
            Mode::Cube => {
                let p = 0.5 * (1.0 + sigma);
                self.states
                    .iter()
                    .map(|m| {
                        let k = m.count_ones() as i32;
                        p.powi(k) * (1.0 - p).powi(self.ring as i32 - k)
                    })
                    .collect()
            }
        }
    }

    /// Values of `f(η)` over the states.
    pub fn tabulate(&self, f: impl Fn(&SpinConfig) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(&self.config(i))).collect()
    }
}

pub fn expectation(pi: &[f64], f: &[f64]) -> f64 {
    pi.iter().zip(f).map(|(p, v)| p * v).sum()
}

pub fn inner(pi: &[f64], f: &[f64], g: &[f64]) -> f64 {
    pi.iter().zip(f).zip(g).map(|((p, a), b)| p * a * b).sum()
}
