use rand::Rng;

use super::engine::RingProcess;
use super::record::{Observable, Snapshot, TrajectoryRecord};
use super::RateModel;
use crate::ensembles::{LocalFunction, SpinConfig};
use crate::rng::{stream, Role};
use crate::{Error, Result};

/// Initial configuration of the global process.
#[derive(Clone, Debug, PartialEq)]
pub enum InitialCondition {
    /// (−,+,−,+,…), the flat height profile.
    Flat,
    /// Uniform over configurations with N/2 particles.
    Uniform,
    Given(SpinConfig),
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub n: usize,
    pub d: LocalFunction,
    pub alpha: f64,
    pub horizon: f64,
    pub seed: u64,
    pub replica: u64,
    pub record_times: Vec<f64>,
    pub observables: Vec<Observable>,
    pub initial: InitialCondition,
    pub log_events: bool,
}

impl SimConfig {
    pub fn new(n: usize, d: LocalFunction, horizon: f64, seed: u64) -> Self {
        SimConfig {
            n,
            d,
            alpha: 1.0,
            horizon,
            seed,
            replica: 0,
            record_times: vec![horizon],
            observables: Vec::new(),
            initial: InitialCondition::Flat,
            log_events: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n % 2 != 0 {
            return Err(Error::Validation(format!("ring size N = {} must be even", self.n)));
        }
        if !(self.horizon >= 0.0 && self.horizon.is_finite()) {
            return Err(Error::Validation(format!("horizon {} must be finite and nonnegative", self.horizon)));
        }
        if self.record_times.windows(2).any(|w| w[1] < w[0])
            || self.record_times.iter().any(|&t| !(0.0..=self.horizon).contains(&t))
        {
            return Err(Error::Validation("record times must be sorted and lie in [0, T]".into()));
        }
        if let InitialCondition::Given(eta) = &self.initial {
            if eta.ring_size() != self.n || 2 * eta.plus_count() != self.n {
                return Err(Error::Validation("initial configuration must have N sites and N/2 particles".into()));
            }
        }
        Ok(())
    }
}

pub(crate) fn run_ring<R: Rng + ?Sized>(
    rates: &RateModel,
    eta: SpinConfig,
    horizon: f64,
    record_times: &[f64],
    observables: &[Observable],
    log_events: bool,
    seed: u64,
    rng: &mut R,
) -> TrajectoryRecord {
    let initial = eta.clone();
    let mut process = RingProcess::new(rates, eta);
    for o in observables {
        process.track(o.f.clone(), o.site);
    }
    if log_events {
        process.enable_log();
    }
    let mut snapshots = Vec::with_capacity(record_times.len());
    for &t in record_times {
        process.advance_to(t, rng);
        snapshots.push(Snapshot {
            time: t,
            config: process.config().clone(),
            flux: process.flux(),
            integrals: process.integrals(),
        });
    }
    process.advance_to(horizon, rng);
    TrajectoryRecord {
        ring_size: initial.ring_size(),
        horizon,
        seed,
        initial,
        snapshots,
        observables: observables.to_vec(),
        events: process.take_log(),
        event_count: process.accepted(),
        proposal_count: process.proposals(),
    }
}

/// Samples the global process on 𝕋_N up to the horizon.
pub fn simulate_torus(cfg: &SimConfig) -> Result<TrajectoryRecord> {
    cfg.validate()?;
    let rates = RateModel::new(cfg.n, Some(cfg.d.clone()), cfg.alpha)?;
    let eta = match &cfg.initial {
        InitialCondition::Flat => SpinConfig::alternating(cfg.n),
        InitialCondition::Uniform => {
            SpinConfig::random_with_count(cfg.n, cfg.n / 2, &mut stream(cfg.seed, cfg.replica, Role::Initial))?
        }
        InitialCondition::Given(eta) => eta.clone(),
    };
    let mut rng = stream(cfg.seed, cfg.replica, Role::Dynamics);
    Ok(run_ring(&rates, eta, cfg.horizon, &cfg.record_times, &cfg.observables, cfg.log_events, cfg.seed, &mut rng))
}
