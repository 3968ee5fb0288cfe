use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::RateModel;
use crate::ensembles::{LocalFunction, SpinConfig};
use crate::stats::Kahan;

/// An accepted swap.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Event {
    pub time: f64,
    pub bond: u32,
}

#[derive(Clone, Debug)]
struct Tracked {
    f: LocalFunction,
    site: i64,
    value: f64,
    integral: Kahan,
}

/// Exclusion process on a ring simulated by uniformization: proposals arrive at rate
/// M·cap on uniformly chosen bonds and are accepted with probability rate/cap.
#[derive(Clone, Debug)]
pub struct RingProcess<'a> {
    rates: &'a RateModel,
    eta: SpinConfig,
    time: f64,
    last_integrated: f64,
    flux: i64,
    proposals: u64,
    accepted: u64,
    tracked: Vec<Tracked>,
    log: Option<Vec<Event>>,
}

impl<'a> RingProcess<'a> {
    pub fn new(rates: &'a RateModel, eta: SpinConfig) -> Self {
        RingProcess {
            rates,
            eta,
            time: 0.0,
            last_integrated: 0.0,
            flux: 0,
            proposals: 0,
            accepted: 0,
            tracked: Vec::new(),
            log: None,
        }
    }

    /// Accumulates ∫ f(τ_site η_s) ds from the current time on.
    pub fn track(&mut self, f: LocalFunction, site: i64) -> usize {
        let value = f.eval_at(&self.eta, site);
        self.tracked.push(Tracked { f, site, value, integral: Kahan::new() });
        self.tracked.len() - 1
    }

    pub fn enable_log(&mut self) {
        self.log.get_or_insert_with(Vec::new);
    }

    pub fn config(&self) -> &SpinConfig {
        &self.eta
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Net number of particles that crossed bond (M−1, 0) from 0 to M−1.
    pub fn flux(&self) -> i64 {
        self.flux
    }

    pub fn proposals(&self) -> u64 {
        self.proposals
    }

    pub fn accepted(&self) -> u64 {
        self.accepted
    }

    pub fn take_log(&mut self) -> Option<Vec<Event>> {
        self.log.take()
    }

    /// Integrals of the tracked observables up to the current time.
    pub fn integrals(&mut self) -> Vec<f64> {
        self.integrate_to(self.time);
        self.tracked.iter().map(|t| t.integral.value()).collect()
    }

    /// Total proposal rate.
    pub fn proposal_rate(&self) -> f64 {
        self.eta.ring_size() as f64 * self.rates.cap()
    }

    fn integrate_to(&mut self, t: f64) {
        let dt = t - self.last_integrated;
        if dt > 0.0 {
            for tr in &mut self.tracked {
                tr.integral.add(tr.value * dt);
            }
        }
        self.last_integrated = t;
    }

    /// Moves the clock forward without any event.
    pub fn set_time(&mut self, t: f64) {
        self.integrate_to(t);
        self.time = t;
    }

    /// Offers a proposal at `bond` with uniform `u ∈ [0,1)` at the current time.
    /// Returns whether the configuration changed.
    #[inline]
    pub fn propose(&mut self, bond: usize, u: f64) -> bool {
        self.proposals += 1;
        let m = self.eta.ring_size();
        let right = if bond + 1 == m { 0 } else { bond + 1 };
        let lp = self.eta.is_plus(bond);
        if lp == self.eta.is_plus(right) {
            return false;
        }
        if u * self.rates.cap() >= self.rates.bond_rate(&self.eta, bond) {
            return false;
        }
        self.apply_swap(bond, right, lp);
        true
    }

    fn apply_swap(&mut self, bond: usize, right: usize, left_plus: bool) {
        if !self.tracked.is_empty() {
            self.integrate_to(self.time);
        }
        self.eta.swap(bond, right);
        self.accepted += 1;
        if right == 0 {
            self.flux += if left_plus { -1 } else { 1 };
        }
        if let Some(log) = self.log.as_mut() {
            log.push(Event { time: self.time, bond: bond as u32 });
        }
        for tr in &mut self.tracked {
            tr.value = tr.f.eval_at(&self.eta, tr.site);
        }
    }

    /// Runs the dynamics up to time `t_end`.
    ///
    /// When no observable is tracked and no log is kept, only the state at `t_end` is visible,
    /// so the number of proposals is drawn as one Poisson variable instead of summing
    /// exponential gaps; the law of the final state is the same.
    pub fn advance_to<R: Rng + ?Sized>(&mut self, t_end: f64, rng: &mut R) {
        let m = self.eta.ring_size();
        let lambda = self.proposal_rate();
        if self.tracked.is_empty() && self.log.is_none() {
            let mean = lambda * (t_end - self.time);
            if mean > 0.0 {
                let count = Poisson::new(mean).map(|p| p.sample(rng) as u64).unwrap_or(0);
                for _ in 0..count {
                    let (bond, u) = bond_and_uniform(rng, m);
                    self.propose(bond, u);
                }
            }
            self.set_time(t_end.max(self.time));
            return;
        }
        loop {
            let dt: f64 = Exp1.sample(rng);
            let next = self.time + dt / lambda;
            if next > t_end {
                break;
            }
            self.time = next;
            let (bond, u) = bond_and_uniform(rng, m);
            self.propose(bond, u);
        }
        self.set_time(t_end.max(self.time));
    }
}

/// A bond in 0..m and a thinning uniform from one 64-bit draw: the high word of r·m picks the
/// bond, the low word supplies 53 bits for the uniform.
#[inline]
pub(crate) fn bond_and_uniform<R: Rng + ?Sized>(rng: &mut R, m: usize) -> (usize, f64) {
    let prod = (rng.next_u64() as u128) * (m as u128);
    let bond = (prod >> 64) as usize;
    let u = ((prod as u64) >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    (bond, u)
}

/// Replays a logged event sequence from `initial`, returning the configuration and flux at
/// time `t`.
pub fn replay(initial: &SpinConfig, events: &[Event], t: f64) -> (SpinConfig, i64) {
    let mut eta = initial.clone();
    let mut flux = 0i64;
    let m = eta.ring_size();
    for ev in events.iter().take_while(|e| e.time <= t) {
        let b = ev.bond as usize;
        let r = (b + 1) % m;
        if r == 0 {
            flux += if eta.is_plus(b) { -1 } else { 1 };
        }
        eta.swap(b, r);
    }
    (eta, flux)
}
