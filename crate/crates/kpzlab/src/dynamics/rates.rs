use crate::ensembles::{LocalFunction, SpinConfig};
use crate::{Error, Result};

/// true iff ½N² − ½N^{3/2} − ½N^α sup|d| > 0.
pub fn validate_rates(n: usize, d: &LocalFunction, alpha: f64) -> bool {
    let n = n as f64;
    0.5 * n * n - 0.5 * n.powf(1.5) - 0.5 * n.powf(alpha) * d.sup_norm() > 0.0
}

/// Jump rates of the driven exclusion process at rate scale N.
///
/// Swaps at a bond with equal spins are no-ops; they are given the symmetric rate ½N² so
/// that two copies of the process can share the symmetric clocks in a coupling.
#[derive(Clone, Debug)]
pub struct RateModel {
    scale: usize,
    alpha: f64,
    symmetric: f64,
    asymmetric: f64,
    drive: f64,
    d: Option<LocalFunction>,
    cap: f64,
}

impl RateModel {
    /// `d = None` is the free process, with no driving term at all.
    pub fn new(scale: usize, d: Option<LocalFunction>, alpha: f64) -> Result<Self> {
        let zero = LocalFunction::constant(0.0);
        if !validate_rates(scale, d.as_ref().unwrap_or(&zero), alpha) {
            return Err(Error::Validation(format!(
                "jump rates are not all positive at N = {scale}, alpha = {alpha}, sup|d| = {}",
                d.as_ref().map_or(0.0, |f| f.sup_norm())
            )));
        }
        let n = scale as f64;
        let symmetric = 0.5 * n * n;
        let asymmetric = 0.5 * n.powf(1.5);
        let drive = 0.5 * n.powf(alpha);
        let d = d.filter(|f| f.sup_norm() > 0.0);
        let cap = symmetric + asymmetric + drive * d.as_ref().map_or(0.0, |f| f.sup_norm());
        Ok(RateModel { scale, alpha, symmetric, asymmetric, drive, d, cap })
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn driving(&self) -> Option<&LocalFunction> {
        self.d.as_ref()
    }

    /// Per-bond dominating rate used for thinning.
    pub fn cap(&self) -> f64 {
        self.cap
    }

    /// Rate of the swap at bond (x, x+1) of the ring carrying `eta`.
    #[inline]
    pub fn bond_rate(&self, eta: &SpinConfig, x: usize) -> f64 {
        let m = eta.ring_size();
        let left = eta.is_plus(x);
        let right = eta.is_plus(if x + 1 == m { 0 } else { x + 1 });
        if left == right {
            return self.symmetric;
        }
        let drive = self.d.as_ref().map_or(0.0, |f| self.drive * f.eval_at(eta, x as i64));
        if left {
            self.symmetric - self.asymmetric - drive
        } else {
            self.symmetric + self.asymmetric + drive
        }
    }

    /// Rate of an actual configuration change at bond (x, x+1); zero for equal spins.
    pub fn swap_rate(&self, eta: &SpinConfig, x: usize) -> f64 {
        let m = eta.ring_size();
        if eta.is_plus(x) == eta.is_plus((x + 1) % m) {
            0.0
        } else {
            self.bond_rate(eta, x)
        }
    }

    /// Total rate of leaving `eta`.
    pub fn exit_rate(&self, eta: &SpinConfig) -> f64 {
        (0..eta.ring_size()).map(|x| self.swap_rate(eta, x)).sum()
    }
}
