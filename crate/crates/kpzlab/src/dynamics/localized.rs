use serde::{Deserialize, Serialize};

use super::record::{Observable, TrajectoryRecord};
use super::torus::run_ring;
use super::RateModel;
use crate::ensembles::{EnsembleSpec, LocalFunction, SpinConfig};
use crate::rng::{stream, Role};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Generator 𝓛^𝕃_N.
    Full,
    /// Generator 𝓛^{free,𝕃}_N: the driving term is dropped.
    Free,
}

#[derive(Clone, Debug)]
pub struct LocalizedSimConfig {
    pub half_width: usize,
    /// Rate scale N.
    pub n: usize,
    pub d: LocalFunction,
    pub alpha: f64,
    pub variant: Variant,
    pub initial: EnsembleSpec,
    pub horizon: f64,
    pub seed: u64,
    pub replica: u64,
    pub record_times: Vec<f64>,
    pub observables: Vec<Observable>,
    pub log_events: bool,
}

impl LocalizedSimConfig {
    pub fn ring_size(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn rate_model(&self) -> Result<RateModel> {
        let d = match self.variant {
            Variant::Full => Some(self.d.clone()),
            Variant::Free => None,
        };
        RateModel::new(self.n, d, self.alpha)
    }

    pub fn sample_initial(&self) -> Result<SpinConfig> {
        let m = self.ring_size();
        let mut rng = stream(self.seed, self.replica, Role::Initial);
        match self.initial {
            EnsembleSpec::Canonical { interval_length, plus_count } => {
                if interval_length != m {
                    return Err(Error::Validation(format!(
                        "canonical ensemble on {interval_length} sites does not match the ring of {m} sites"
                    )));
                }
                SpinConfig::random_with_count(m, plus_count, &mut rng)
            }
            EnsembleSpec::Product { sigma } => Ok(SpinConfig::random_product(m, sigma, &mut rng)),
        }
    }
}

/// Samples η^𝕃 or η^{free,𝕃} on the ring 𝕃 of 2ℓ+1 sites.
pub fn simulate_localized(cfg: &LocalizedSimConfig) -> Result<TrajectoryRecord> {
    cfg.initial.validate()?;
    if cfg.record_times.windows(2).any(|w| w[1] < w[0])
        || cfg.record_times.iter().any(|&t| !(0.0..=cfg.horizon).contains(&t))
    {
        return Err(Error::Validation("record times must be sorted and lie in [0, τ]".into()));
    }
    let rates = cfg.rate_model()?;
    let eta = cfg.sample_initial()?;
    let mut rng = stream(cfg.seed, cfg.replica, Role::Dynamics);
    Ok(run_ring(&rates, eta, cfg.horizon, &cfg.record_times, &cfg.observables, cfg.log_events, cfg.seed, &mut rng))
}
