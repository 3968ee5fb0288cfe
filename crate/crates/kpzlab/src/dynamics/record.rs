use serde::{Deserialize, Serialize};

use super::engine::{replay, Event};
use crate::ensembles::{LocalFunction, SpinConfig};
use crate::stats::Kahan;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    pub config: SpinConfig,
    pub flux: i64,
    /// ∫₀^time of each registered observable.
    pub integrals: Vec<f64>,
}

/// Registered observable f(τ_site η).
#[derive(Clone, Debug)]
pub struct Observable {
    pub f: LocalFunction,
    pub site: i64,
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord {
    pub ring_size: usize,
    pub horizon: f64,
    pub seed: u64,
    pub initial: SpinConfig,
    pub snapshots: Vec<Snapshot>,
    pub observables: Vec<Observable>,
    /// Full list of accepted swaps, kept when event logging is enabled.
    pub events: Option<Vec<Event>>,
    pub event_count: u64,
    pub proposal_count: u64,
}

/// Summary of a record in a form suitable for JSON output.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RecordSummary {
    pub ring_size: usize,
    pub horizon: f64,
    pub seed: u64,
    pub event_count: u64,
    pub proposal_count: u64,
    pub final_flux: i64,
    pub plus_count: usize,
}

impl TrajectoryRecord {
    pub fn summary(&self) -> RecordSummary {
        RecordSummary {
            ring_size: self.ring_size,
            horizon: self.horizon,
            seed: self.seed,
            event_count: self.event_count,
            proposal_count: self.proposal_count,
            final_flux: self.snapshots.last().map_or(0, |s| s.flux),
            plus_count: self.initial.plus_count(),
        }
    }

    /// Configuration and flux at time `t`, exact when events are logged and otherwise
    /// available only at recorded times.
    pub fn state_at(&self, t: f64) -> Result<(SpinConfig, i64)> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::Domain(format!("time {t} outside [0, {}]", self.horizon)));
        }
        if let Some(events) = &self.events {
            return Ok(replay(&self.initial, events, t));
        }
        if t == 0.0 {
            return Ok((self.initial.clone(), 0));
        }
        self.snapshots
            .iter()
            .find(|s| s.time == t)
            .map(|s| (s.config.clone(), s.flux))
            .ok_or_else(|| Error::Domain(format!("time {t} is not a recorded time and no event log was kept")))
    }

    pub fn snapshot_times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }
}

/// τ⁻¹∫_t^{t+τ} f(τ_site η_s) ds over `window = (t, t+τ)`.
pub fn time_average(record: &TrajectoryRecord, f: &LocalFunction, site: i64, window: (f64, f64)) -> Result<f64> {
    let (a, b) = window;
    if !(0.0 <= a && a <= b && b <= record.horizon) {
        return Err(Error::Domain(format!("window [{a}, {b}] outside [0, {}]", record.horizon)));
    }
    if a == b {
        let (eta, _) = record.state_at(a)?;
        return Ok(f.eval_at(&eta, site));
    }
    if let Some(events) = &record.events {
        let m = record.ring_size;
        let mut eta = record.initial.clone();
        let mut acc = Kahan::new();
        let mut last = a;
        let mut i = 0;
        while i < events.len() && events[i].time <= a {
            let bd = events[i].bond as usize;
            eta.swap(bd, (bd + 1) % m);
            i += 1;
        }
        let mut value = f.eval_at(&eta, site);
        while i < events.len() && events[i].time < b {
            acc.add(value * (events[i].time - last));
            last = events[i].time;
            let bd = events[i].bond as usize;
            eta.swap(bd, (bd + 1) % m);
            value = f.eval_at(&eta, site);
            i += 1;
        }
        acc.add(value * (b - last));
        return Ok(acc.value() / (b - a));
    }
    let k = record
        .observables
        .iter()
        .position(|o| o.site == site && o.f.table() == f.table() && o.f.lo() == f.lo())
        .ok_or_else(|| Error::Domain("observable not registered and no event log kept".into()))?;
    let integral_at = |t: f64| -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        record
            .snapshots
            .iter()
            .find(|s| s.time == t)
            .map(|s| s.integrals[k])
            .ok_or_else(|| Error::Domain(format!("time {t} is not a recorded time")))
    };
    Ok((integral_at(b)? - integral_at(a)?) / (b - a))
}
