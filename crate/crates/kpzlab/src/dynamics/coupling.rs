use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use super::engine::{bond_and_uniform, RingProcess};
use super::RateModel;
use crate::ensembles::{LocalFunction, SpinConfig};
use crate::rng::{stream, Role};
use crate::{Error, Result};

/// Placement of 𝕃 ⊂ 𝕃[ε] ⊂ 𝕋_N, all as contiguous arcs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CouplingGeometry {
    pub n: usize,
    /// First global site of 𝕃[ε].
    pub start: usize,
    /// Number of sites of 𝕃[ε].
    pub enlarged_len: usize,
    /// Offset of 𝕃 inside 𝕃[ε].
    pub inner_offset: usize,
    pub inner_len: usize,
}

impl CouplingGeometry {
    /// 𝕃 of 2ℓ+1 sites centred at N/2, enlarged by round(N^ε(2ℓ+1)) sites on each side.
    pub fn centred(n: usize, half_width: usize, epsilon: f64) -> Result<Self> {
        let inner_len = 2 * half_width + 1;
        let radius = ((n as f64).powf(epsilon) * inner_len as f64).round() as usize;
        let enlarged_len = inner_len + 2 * radius;
        if enlarged_len >= n {
            return Err(Error::Domain(format!(
                "enlarged ring of {enlarged_len} sites does not fit strictly inside N = {n}"
            )));
        }
        let start = (n / 2 + n - half_width - radius) % n;
        Ok(CouplingGeometry { n, start, enlarged_len, inner_offset: radius, inner_len })
    }

    pub fn validate(&self) -> Result<()> {
        if self.enlarged_len < 2 || self.enlarged_len > self.n || self.inner_offset + self.inner_len > self.enlarged_len {
            return Err(Error::Domain(format!("inconsistent coupling geometry {self:?}")));
        }
        Ok(())
    }

    fn in_inner(&self, j: usize) -> bool {
        j >= self.inner_offset && j < self.inner_offset + self.inner_len
    }

    /// Local bond index of global bond `b` when both its sites lie in 𝕃[ε] and it is not
    /// the wrap bond of 𝕃[ε].
    fn shared_bond(&self, b: usize) -> Option<usize> {
        let j = (b + self.n - self.start) % self.n;
        (j + 1 < self.enlarged_len).then_some(j)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscrepancyReport {
    pub epsilon: f64,
    pub geometry: CouplingGeometry,
    /// First time some site of 𝕃 carries a discrepancy.
    pub first_discrepancy_in_l: Option<f64>,
    /// Number of events that increased the number of discrepancies.
    pub discrepancy_birth_count: u64,
    /// Largest distance from the edge of 𝕃[ε] reached by a discrepancy.
    pub max_excursion: usize,
    pub final_discrepancies: usize,
}

#[derive(Clone, Debug)]
pub struct CouplingConfig {
    pub n: usize,
    pub d: LocalFunction,
    pub alpha: f64,
    pub tau: f64,
    pub seed: u64,
    pub replica: u64,
    pub epsilon: f64,
    pub geometry: CouplingGeometry,
    /// End the run at the first discrepancy inside 𝕃; the remaining report fields then describe
    /// the run up to that time.
    pub stop_on_entry: bool,
}

struct Tracker {
    geometry: CouplingGeometry,
    diff: Vec<bool>,
    count: usize,
    births: u64,
    max_excursion: usize,
    first_in_l: Option<f64>,
}

impl Tracker {
    fn refresh(&mut self, global: &SpinConfig, local: &SpinConfig, sites: [usize; 2], time: f64) {
        let before = self.count;
        for j in sites {
            let g = (self.geometry.start + j) % self.geometry.n;
            let now = global.is_plus(g) != local.is_plus(j);
            if now != self.diff[j] {
                self.diff[j] = now;
                if now {
                    self.count += 1;
                } else {
                    self.count -= 1;
                }
            }
            if now {
                let depth = j.min(self.geometry.enlarged_len - 1 - j);
                self.max_excursion = self.max_excursion.max(depth);
                if self.first_in_l.is_none() && self.geometry.in_inner(j) {
                    self.first_in_l = Some(time);
                }
            }
        }
        if self.count > before {
            self.births += (self.count - before) as u64;
        }
    }
}

/// Runs the global process and the localized process on 𝕃[ε] from a common configuration,
/// sharing the proposal stream on interior bonds of 𝕃[ε].
///
/// A shared proposal with uniform u triggers a swap in each copy iff u·cap is below that
/// copy's bond rate, so the copies disagree with probability |r₁ − r₂|/cap. Bonds leaving
/// 𝕃[ε] drive only the global copy and the wrap bond of 𝕃[ε] only the local copy.
pub fn coupled_simulate(cfg: &CouplingConfig) -> Result<DiscrepancyReport> {
    let geo = cfg.geometry;
    geo.validate()?;
    if geo.n != cfg.n || cfg.n % 2 != 0 {
        return Err(Error::Domain("coupling geometry does not match N".into()));
    }
    let rates = RateModel::new(cfg.n, Some(cfg.d.clone()), cfg.alpha)?;
    let eta0 = SpinConfig::random_with_count(cfg.n, cfg.n / 2, &mut stream(cfg.seed, cfg.replica, Role::Initial))?;
    let local0 = eta0.restrict(geo.start as i64, geo.enlarged_len);
    let mut global = RingProcess::new(&rates, eta0);
    let mut local = RingProcess::new(&rates, local0);
    let mut tracker = Tracker {
        geometry: geo,
        diff: vec![false; geo.enlarged_len],
        count: 0,
        births: 0,
        max_excursion: 0,
        first_in_l: None,
    };
    let mut rng = stream(cfg.seed, cfg.replica, Role::Coupling);
    let lambda = (cfg.n + 1) as f64 * rates.cap();
    let mut t = 0.0;
    let wrap = geo.enlarged_len - 1;
    loop {
        if cfg.stop_on_entry && tracker.first_in_l.is_some() {
            break;
        }
        let e: f64 = Exp1.sample(&mut rng);
        t += e / lambda;
        if t > cfg.tau {
            break;
        }
        let (idx, u) = bond_and_uniform(&mut rng, cfg.n + 1);
        if idx == cfg.n {
            local.set_time(t);
            if local.propose(wrap, u) {
                tracker.refresh(global.config(), local.config(), [wrap, 0], t);
            }
            continue;
        }
        global.set_time(t);
        let moved_global = global.propose(idx, u);
        match geo.shared_bond(idx) {
            Some(j) => {
                local.set_time(t);
                let moved_local = local.propose(j, u);
                if moved_global || moved_local {
                    tracker.refresh(global.config(), local.config(), [j, j + 1], t);
                }
            }
            None if moved_global => {
                let j = (idx + cfg.n - geo.start) % cfg.n;
                let jr = (j + 1) % cfg.n;
                let sites: Vec<usize> = [j, jr].into_iter().filter(|&s| s < geo.enlarged_len).collect();
                match sites.as_slice() {
                    [a] => tracker.refresh(global.config(), local.config(), [*a, *a], t),
                    [a, b] => tracker.refresh(global.config(), local.config(), [*a, *b], t),
                    _ => {}
                }
            }
            None => {}
        }
    }
    Ok(DiscrepancyReport {
        epsilon: cfg.epsilon,
        geometry: geo,
        first_discrepancy_in_l: tracker.first_in_l,
        discrepancy_birth_count: tracker.births,
        max_excursion: tracker.max_excursion,
        final_discrepancies: tracker.count,
    })
}
