use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::output::{Outcome, Table};
use super::params::{ConstantsParams, DualityParams, DrivingSpec, HeatKernelParams};
use super::Context;
use crate::cells;
use crate::ensembles::{adjust_driving, build_flux_terms, compute_constants, Constants};
use crate::heat_kernel::{build_kernel, mc_crosscheck, verify_bounds, BoundGrid, ConstantReport, CrosscheckReport};
use crate::observables::{duality_sweep, DualitySweep};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantsOutcome {
    pub driving: DrivingSpec,
    pub constants: Constants,
    /// Constant subtracted from the driving function by the flatness adjustment, when requested.
    pub adjustment: Option<f64>,
}

impl Outcome for ConstantsOutcome {}

pub fn constants(p: &ConstantsParams) -> Result<ConstantsOutcome> {
    let mut d = p.driving.build()?;
    let mut adjustment = None;
    if p.flatten {
        let (adjusted, c) = adjust_driving(&d)?;
        d = adjusted;
        adjustment = Some(c);
    }
    Ok(ConstantsOutcome { driving: p.driving.clone(), constants: compute_constants(&d, p.n)?, adjustment })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityCase {
    pub driving: DrivingSpec,
    pub sweep: DualitySweep,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DualityOutcome {
    pub tolerance: f64,
    pub cases: Vec<DualityCase>,
    pub passed: bool,
}

impl Outcome for DualityOutcome {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new("residuals", &["n", "driving", "windows", "max_residual", "max_expanded_residual"]);
        for c in &self.cases {
            t.push(cells![c.sweep.n, c.driving, c.sweep.windows, c.sweep.max_residual, c.sweep.max_expanded_residual]);
        }
        vec![t]
    }
}

pub fn duality(p: &DualityParams) -> Result<DualityOutcome> {
    let mut cases = Vec::new();
    for &n in &p.ns {
        for spec in &p.drivings {
            let d = spec.build()?;
            let constants = compute_constants(&d, n)?;
            let flux = build_flux_terms(&d)?;
            let sweep = duality_sweep(n, &d, &constants, &flux)?;
            let passed = sweep.max_residual <= p.tolerance;
            cases.push(DualityCase { driving: spec.clone(), sweep, passed });
        }
    }
    let passed = cases.iter().all(|c| c.passed);
    Ok(DualityOutcome { tolerance: p.tolerance, cases, passed })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelCase {
    pub n: usize,
    pub bounds: ConstantReport,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatKernelOutcome {
    pub dbar: f64,
    pub cases: Vec<KernelCase>,
    pub max_row_sum_error: f64,
    pub max_on_diagonal: f64,
    pub expm_n: usize,
    /// (t, largest entrywise gap between the spectral kernel and the dense matrix exponential).
    pub expm_errors: Vec<(f64, f64)>,
    pub mc_n: usize,
    pub mc_t: f64,
    pub mc: CrosscheckReport,
    pub mc_within_3_sigma: bool,
}

impl Outcome for HeatKernelOutcome {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new("bounds", &["n", "on_diagonal", "l1_mass", "min_entry", "row_sum_error"]);
        for c in &self.cases {
            let b = &c.bounds;
            t.push(cells![c.n, b.on_diagonal, b.l1_mass, b.min_entry, b.row_sum_error]);
        }
        vec![t]
    }
}

/// e^{tG} for the walk generator with G[x][x+1] = ½N², G[x][x−1] = ½N² − d̄N.
fn dense_semigroup(n: usize, dbar: f64, t: f64) -> DMatrix<f64> {
    let nf = n as f64;
    let (right, left) = (0.5 * nf * nf, 0.5 * nf * nf - dbar * nf);
    let mut g = DMatrix::zeros(n, n);
    for x in 0..n {
        g[(x, (x + 1) % n)] += right;
        g[(x, (x + n - 1) % n)] += left;
        g[(x, x)] -= right + left;
    }
    (g * t).exp()
}

pub fn heatkernel_verify(p: &HeatKernelParams, ctx: &Context) -> Result<HeatKernelOutcome> {
    if p.grid_points < 2 {
        return Err(Error::Validation("grid_points must be at least 2".into()));
    }
    let mut cases = Vec::new();
    for &n in &p.ns {
        let kernel = build_kernel(n, p.dbar)?;
        let bounds = verify_bounds(&kernel, &BoundGrid::standard(n, p.grid_points))?;
        cases.push(KernelCase { n, bounds });
    }
    let kernel = build_kernel(p.expm_n, p.dbar)?;
    let nf = p.expm_n as f64;
    let mut expm_errors = Vec::new();
    for t in [nf.powi(-2), 1e-3, 1e-2, 0.1] {
        let spectral = kernel.matrix(t)?;
        let dense = dense_semigroup(p.expm_n, p.dbar, t);
        let mut worst = 0.0f64;
        for (x, row) in spectral.iter().enumerate() {
            for (y, v) in row.iter().enumerate() {
                worst = worst.max((v - dense[(x, y)]).abs());
            }
        }
        expm_errors.push((t, worst));
    }
    let mc = mc_crosscheck(&build_kernel(p.mc_n, p.dbar)?, p.mc_t, ctx.replicas, ctx.sub_seed("heat-kernel-walk"))?;
    Ok(HeatKernelOutcome {
        dbar: p.dbar,
        max_row_sum_error: cases.iter().map(|c| c.bounds.row_sum_error).fold(0.0, f64::max),
        max_on_diagonal: cases.iter().map(|c| c.bounds.on_diagonal).fold(0.0, f64::max),
        cases,
        expm_n: p.expm_n,
        expm_errors,
        mc_n: p.mc_n,
        mc_t: p.mc_t,
        mc_within_3_sigma: mc.within(3.0),
        mc,
    })
}
