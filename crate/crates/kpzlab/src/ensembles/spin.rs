use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A ±1 configuration on a ring, one bit per site (bit set = +1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinConfig {
    ring_size: usize,
    words: Vec<u64>,
    plus_count: usize,
}

impl SpinConfig {
    pub fn all_minus(ring_size: usize) -> Self {
        SpinConfig { ring_size, words: vec![0; ring_size.div_ceil(64)], plus_count: 0 }
    }

    pub fn from_spins(spins: &[i8]) -> Result<Self> {
        let mut cfg = Self::all_minus(spins.len());
        for (x, &s) in spins.iter().enumerate() {
            match s {
                1 => cfg.set(x, 1),
                -1 => {}
                _ => return Err(Error::Domain(format!("spin {s} at site {x} is not ±1"))),
            }
        }
        Ok(cfg)
    }

    /// Bit `i` of `mask` gives the spin at site `i`.
    pub fn from_mask(ring_size: usize, mask: u64) -> Self {
        let mut cfg = Self::all_minus(ring_size);
        for x in 0..ring_size {
            if (mask >> x) & 1 == 1 {
                cfg.set(x, 1);
            }
        }
        cfg
    }

    /// (−,+,−,+,…): site 0 is a hole.
    pub fn alternating(ring_size: usize) -> Self {
        let mut cfg = Self::all_minus(ring_size);
        for x in (1..ring_size).step_by(2) {
            cfg.set(x, 1);
        }
        cfg
    }

    /// Uniform configuration with exactly `plus` particles (Fisher–Yates placement).
    pub fn random_with_count<R: Rng + ?Sized>(ring_size: usize, plus: usize, rng: &mut R) -> Result<Self> {
        if plus > ring_size {
            return Err(Error::Domain(format!("{plus} particles do not fit on {ring_size} sites")));
        }
        let mut sites: Vec<usize> = (0..ring_size).collect();
        let mut cfg = Self::all_minus(ring_size);
        for i in 0..plus {
            let j = rng.gen_range(i..ring_size);
            sites.swap(i, j);
            cfg.set(sites[i], 1);
        }
        Ok(cfg)
    }

    /// Independent spins with mean σ.
    pub fn random_product<R: Rng + ?Sized>(ring_size: usize, sigma: f64, rng: &mut R) -> Self {
        let p = 0.5 * (1.0 + sigma);
        let mut cfg = Self::all_minus(ring_size);
        for x in 0..ring_size {
            if rng.gen::<f64>() < p {
                cfg.set(x, 1);
            }
        }
        cfg
    }

    #[inline]
    pub fn ring_size(&self) -> usize {
        self.ring_size
    }

    #[inline]
    pub fn plus_count(&self) -> usize {
        self.plus_count
    }

    #[inline]
    pub fn wrap(&self, x: i64) -> usize {
        x.rem_euclid(self.ring_size as i64) as usize
    }

    #[inline]
    pub fn is_plus(&self, x: usize) -> bool {
        (self.words[x >> 6] >> (x & 63)) & 1 == 1
    }

    #[inline]
    pub fn get(&self, x: usize) -> i8 {
        if self.is_plus(x) {
            1
        } else {
            -1
        }
    }

    /// Spin at an arbitrary integer site, read modulo the ring.
    #[inline]
    pub fn at(&self, x: i64) -> i8 {
        self.get(self.wrap(x))
    }

    pub fn set(&mut self, x: usize, spin: i8) {
        let was = self.is_plus(x);
        let now = spin > 0;
        if was != now {
            self.words[x >> 6] ^= 1u64 << (x & 63);
            if now {
                self.plus_count += 1;
            } else {
                self.plus_count -= 1;
            }
        }
    }

    /// η ↦ η^{x,y}.
    #[inline]
    pub fn swap(&mut self, x: usize, y: usize) {
        if self.is_plus(x) != self.is_plus(y) {
            self.words[x >> 6] ^= 1u64 << (x & 63);
            self.words[y >> 6] ^= 1u64 << (y & 63);
        }
    }

    /// Index of the window of `len` sites starting at `start` (wrapping), leftmost site in
    /// the most significant bit.
    #[inline]
    pub fn window(&self, start: i64, len: usize) -> usize {
        let mut idx = 0usize;
        let mut x = self.wrap(start);
        for _ in 0..len {
            idx = (idx << 1) | self.is_plus(x) as usize;
            x += 1;
            if x == self.ring_size {
                x = 0;
            }
        }
        idx
    }

    pub fn to_spins(&self) -> Vec<i8> {
        (0..self.ring_size).map(|x| self.get(x)).collect()
    }

    /// Bit `i` of the result is the spin at site `i`; requires at most 64 sites.
    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.ring_size <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn sum(&self) -> i64 {
        2 * self.plus_count as i64 - self.ring_size as i64
    }

    /// Packed bytes, site `i` in bit `i % 8` of byte `i / 8`.
    pub fn packed_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.ring_size.div_ceil(8)];
        for x in 0..self.ring_size {
            if self.is_plus(x) {
                out[x >> 3] |= 1 << (x & 7);
            }
        }
        out
    }

    pub fn from_packed_bytes(ring_size: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != ring_size.div_ceil(8) {
            return Err(Error::Domain("packed spin length mismatch".into()));
        }
        let mut cfg = Self::all_minus(ring_size);
        for x in 0..ring_size {
            if (bytes[x >> 3] >> (x & 7)) & 1 == 1 {
                cfg.set(x, 1);
            }
        }
        Ok(cfg)
    }

    /// Sub-configuration on sites `start..start+len` (wrapping) as a new ring.
    pub fn restrict(&self, start: i64, len: usize) -> SpinConfig {
        let mut out = Self::all_minus(len);
        for i in 0..len {
            if self.is_plus(self.wrap(start + i as i64)) {
                out.set(i, 1);
            }
        }
        out
    }
}
