use serde::{Deserialize, Serialize};

use super::output::{Outcome, Table};
use super::params::{BgDecayParams, CouplingParams, InitialKind, KpzCompareParams, RegularityParams, SimulateParams};
use super::Context;
use crate::cells;
use crate::dynamics::trajfile::TrajectoryFile;
use crate::dynamics::{
    coupled_simulate, simulate_torus, CouplingConfig, CouplingGeometry, InitialCondition, SimConfig, TrajectoryRecord,
};
use crate::ensembles::{build_flux_terms, compute_constants, LocalFunction};
use crate::heat_kernel::build_kernel;
use crate::observables::{bg_functional, gartner_profile, height_profile, regularity_moduli, RegularityReport, UpsilonConfig};
use crate::she::{interpolate_profile, kpz_compare as compare_fields, solve_she, FieldEnsemble, KpzReport, SheConfig};
use crate::stats::{loglog_slope, Summary};
use crate::{Error, Result};

fn initial(kind: InitialKind) -> InitialCondition {
    match kind {
        InitialKind::Flat => InitialCondition::Flat,
        InitialKind::Uniform => InitialCondition::Uniform,
    }
}

/// Uniform grid k/per_unit on [0, horizon], the horizon included.
fn time_grid(horizon: f64, per_unit: usize) -> Result<Vec<f64>> {
    if !(horizon > 0.0 && horizon.is_finite()) || per_unit == 0 {
        return Err(Error::Validation("need a positive horizon and frames_per_unit".into()));
    }
    let steps = (horizon * per_unit as f64).round().max(1.0) as usize;
    Ok((0..=steps).map(|k| horizon * k as f64 / steps as f64).collect())
}

fn torus(n: usize, d: &LocalFunction, horizon: f64, seed: u64, replica: usize, times: &[f64], init: InitialKind) -> Result<TrajectoryRecord> {
    let mut cfg = SimConfig::new(n, d.clone(), horizon, seed);
    cfg.replica = replica as u64;
    cfg.record_times = times.to_vec();
    cfg.initial = initial(init);
    simulate_torus(&cfg)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeSummary {
    pub t: f64,
    /// Mean of h_{t,0} − R_N t over replicas, and its standard error.
    pub mean_centred_h0: f64,
    pub se: f64,
    pub variance_h0: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimulateOutcome {
    pub n: usize,
    pub r_n: f64,
    pub replicas: usize,
    pub times: Vec<TimeSummary>,
    /// (replica, t, profile) for the first few replicas.
    #[serde(skip)]
    pub profiles: Vec<(usize, f64, Vec<f64>)>,
    #[serde(skip)]
    pub trajectories: Vec<(usize, TrajectoryFile)>,
}

impl Outcome for SimulateOutcome {
    fn tables(&self) -> Vec<Table> {
        let mut h = Table::new("heights", &["replica", "t", "x", "h"]);
        for (r, t, prof) in &self.profiles {
            for (x, v) in prof.iter().enumerate() {
                h.push(cells![r, t, x, v]);
            }
        }
        let mut s = Table::new("summary", &["t", "mean_centred_h0", "se", "variance_h0"]);
        for ts in &self.times {
            s.push(cells![ts.t, ts.mean_centred_h0, ts.se, ts.variance_h0]);
        }
        vec![h, s]
    }

    fn blobs(&self) -> Vec<(String, Vec<u8>)> {
        self.trajectories
            .iter()
            .map(|(r, f)| {
                let mut buf = Vec::new();
                f.write_to(&mut buf).expect("writing to memory");
                (format!("simulate_traj_{r:05}.kpztraj"), buf)
            })
            .collect()
    }
}

pub fn simulate(p: &SimulateParams, ctx: &Context) -> Result<SimulateOutcome> {
    let d = p.driving.build()?;
    let r_n = compute_constants(&d, p.n)?.r_n;
    let mut times = p.record_times.clone();
    times.push(p.horizon);
    times.sort_by(f64::total_cmp);
    times.dedup();
    let per_replica = ctx.pool.map(ctx.replicas, |r| {
        let mut cfg = SimConfig::new(p.n, d.clone(), p.horizon, ctx.seed);
        cfg.replica = r as u64;
        cfg.record_times = times.clone();
        cfg.initial = initial(p.initial);
        cfg.alpha = p.alpha;
        let record = simulate_torus(&cfg)?;
        let profiles = times.iter().map(|&t| height_profile(&record, t).map(|h| h.values)).collect::<Result<Vec<_>>>()?;
        let traj = p.write_trajectories.then(|| TrajectoryFile::from_record(&record));
        Ok((profiles, traj))
    })?;
    let summaries = times
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let xs: Vec<f64> = per_replica.iter().map(|(prof, _)| prof[k][0] - r_n * t).collect();
            let s = Summary::of(&xs);
            TimeSummary { t, mean_centred_h0: s.mean, se: s.std_error(), variance_h0: s.variance }
        })
        .collect();
    let mut profiles = Vec::new();
    let mut trajectories = Vec::new();
    for (r, (prof, traj)) in per_replica.into_iter().enumerate() {
        if r < p.profile_replicas {
            for (k, &t) in times.iter().enumerate() {
                profiles.push((r, t, prof[k].clone()));
            }
        }
        if let Some(f) = traj {
            trajectories.push((r, f));
        }
    }
    Ok(SimulateOutcome { n: p.n, r_n, replicas: ctx.replicas, times: summaries, profiles, trajectories })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegularityOutcome {
    pub n: usize,
    pub r_n: f64,
    pub reports: Vec<RegularityReport>,
    pub mean_space_modulus: f64,
    pub mean_time_modulus: f64,
    /// Fraction of replicas in which some threshold was crossed.
    pub exceeded_fraction: f64,
}

impl Outcome for RegularityOutcome {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new(
            "moduli",
            &[
                "replica",
                "sup_z",
                "sup_inv_z",
                "space_modulus",
                "time_modulus",
                "t_stop",
                "exceeded_size",
                "exceeded_space",
                "exceeded_time",
            ],
        );
        for (r, x) in self.reports.iter().enumerate() {
            t.push(cells![
                r,
                x.sup_z,
                x.sup_inv_z,
                x.space_modulus,
                x.time_modulus,
                x.t_stop,
                u8::from(x.exceeded.size),
                u8::from(x.exceeded.space),
                u8::from(x.exceeded.time)
            ]);
        }
        vec![t]
    }
}

pub fn regularity(p: &RegularityParams, ctx: &Context) -> Result<RegularityOutcome> {
    let d = p.driving.build()?;
    let r_n = compute_constants(&d, p.n)?.r_n;
    let grid = time_grid(p.horizon, p.frames_per_unit)?;
    let reports = ctx.pool.map(ctx.replicas, |r| {
        let record = torus(p.n, &d, p.horizon, ctx.seed, r, &grid, InitialKind::Flat)?;
        let frames = grid
            .iter()
            .map(|&t| gartner_profile(&record, t, r_n).map(|z| (t, z.values)))
            .collect::<Result<Vec<_>>>()?;
        regularity_moduli(&frames, p.thresholds)
    })?;
    let k = reports.len() as f64;
    Ok(RegularityOutcome {
        n: p.n,
        r_n,
        mean_space_modulus: reports.iter().map(|r| r.space_modulus).sum::<f64>() / k,
        mean_time_modulus: reports.iter().map(|r| r.time_modulus).sum::<f64>() / k,
        exceeded_fraction: reports.iter().filter(|r| r.exceeded.any()).count() as f64 / k,
        reports,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BgLevel {
    pub n: usize,
    pub replicas: usize,
    /// Mean over replicas of sup_{t,x}|Υ^BG_{t,x}|, with its standard error.
    pub mean_sup_bg: f64,
    pub se_bg: f64,
    pub mean_sup_hl: f64,
    pub se_hl: f64,
    /// Largest change under doubling of the Duhamel sub-step, over replicas.
    pub discretization_bg: f64,
    pub mean_t_stop: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BgDecayOutcome {
    pub levels: Vec<BgLevel>,
    /// Log-log slope of mean_sup_bg against N.
    pub exponent_bg: f64,
    pub exponent_hl: f64,
    pub strictly_decreasing: bool,
    /// (n, replica, t, x, Υ^BG, Υ^HL) for the first few replicas of each N.
    #[serde(skip)]
    pub grid: Vec<(usize, usize, f64, usize, f64, f64)>,
}

impl Outcome for BgDecayOutcome {
    fn tables(&self) -> Vec<Table> {
        let mut g = Table::new("grid", &["n", "replica", "t", "x", "upsilon_bg", "upsilon_hl"]);
        for &(n, r, t, x, bg, hl) in &self.grid {
            g.push(cells![n, r, t, x, bg, hl]);
        }
        let mut s = Table::new("summary", &["n", "replicas", "mean_sup_bg", "se_bg", "mean_sup_hl", "se_hl"]);
        for l in &self.levels {
            s.push(cells![l.n, l.replicas, l.mean_sup_bg, l.se_bg, l.mean_sup_hl, l.se_hl]);
        }
        vec![g, s]
    }
}

pub fn bg_decay(p: &BgDecayParams, ctx: &Context) -> Result<BgDecayOutcome> {
    let d = p.driving.build()?;
    let flux = build_flux_terms(&d)?;
    let grid_times = time_grid(p.horizon, p.frames_per_unit)?;
    let mut levels = Vec::new();
    let mut grid = Vec::new();
    for &n in &p.ns {
        let r_n = compute_constants(&d, n)?.r_n;
        let kernel = build_kernel(n, flux.dbar)?;
        let seed = ctx.sub_seed(&format!("bg-decay-{n}"));
        let results = ctx.pool.map(ctx.replicas, |r| {
            let record = torus(n, &d, p.horizon, seed, r, &grid_times, InitialKind::Flat)?;
            let sites = if r < p.grid_replicas { (0..n).collect() } else { Vec::new() };
            let cfg = UpsilonConfig { report_times: grid_times.clone(), sites, thresholds: p.thresholds, clip: p.clip };
            bg_functional(&record, &kernel, &flux, r_n, &cfg)
        })?;
        let sup_bg: Vec<f64> = results.iter().map(|b| b.sup_bg.iter().copied().fold(0.0, f64::max)).collect();
        let sup_hl: Vec<f64> = results.iter().map(|b| b.sup_hl.iter().copied().fold(0.0, f64::max)).collect();
        let (sb, sh) = (Summary::of(&sup_bg), Summary::of(&sup_hl));
        for (r, b) in results.iter().enumerate().take(p.grid_replicas) {
            for (i, &t) in b.times.iter().enumerate() {
                for (j, &x) in b.sites.iter().enumerate() {
                    grid.push((n, r, t, x, b.values_bg[i][j], b.values_hl[i][j]));
                }
            }
        }
        levels.push(BgLevel {
            n,
            replicas: ctx.replicas,
            mean_sup_bg: sb.mean,
            se_bg: sb.std_error(),
            mean_sup_hl: sh.mean,
            se_hl: sh.std_error(),
            discretization_bg: results.iter().map(|b| b.discretization_bg).fold(0.0, f64::max),
            mean_t_stop: results.iter().map(|b| b.t_stop).sum::<f64>() / results.len() as f64,
        });
    }
    let ns: Vec<f64> = levels.iter().map(|l| l.n as f64).collect();
    let (exponent_bg, exponent_hl) = if levels.len() >= 2 {
        (
            loglog_slope(&ns, &levels.iter().map(|l| l.mean_sup_bg).collect::<Vec<_>>())?,
            loglog_slope(&ns, &levels.iter().map(|l| l.mean_sup_hl).collect::<Vec<_>>())?,
        )
    } else {
        (f64::NAN, f64::NAN)
    };
    let strictly_decreasing = levels.windows(2).all(|w| w[1].mean_sup_bg < w[0].mean_sup_bg);
    Ok(BgDecayOutcome { levels, exponent_bg, exponent_hl, strictly_decreasing, grid })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CouplingOutcome {
    pub n: usize,
    pub tau: f64,
    pub epsilon: f64,
    pub geometry: CouplingGeometry,
    pub replicas: usize,
    pub entered: usize,
    /// Fraction of replicas in which a discrepancy reached 𝕃 by τ, and its standard error.
    pub probability: f64,
    pub se: f64,
    pub mean_births: f64,
    /// (entered, first entry time or NaN, births, max excursion, final discrepancies) per replica.
    #[serde(skip)]
    pub rows: Vec<(bool, f64, u64, usize, usize)>,
}

impl Outcome for CouplingOutcome {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new("replicas", &["replica", "entered", "first_time", "births", "max_excursion", "final_discrepancies"]);
        for (r, &(e, time, b, m, f)) in self.rows.iter().enumerate() {
            t.push(cells![r, u8::from(e), time, b, m, f]);
        }
        vec![t]
    }
}

pub fn coupling(p: &CouplingParams, ctx: &Context) -> Result<CouplingOutcome> {
    let d = p.driving.build()?;
    let tau = p.tau.unwrap_or((p.n as f64).powf(-4.0 / 3.0));
    let geometry = CouplingGeometry::centred(p.n, p.half_width, p.epsilon)?;
    let rows = ctx.pool.map(ctx.replicas, |r| {
        let cfg = CouplingConfig {
            n: p.n,
            d: d.clone(),
            alpha: 1.0,
            tau,
            seed: ctx.seed,
            replica: r as u64,
            epsilon: p.epsilon,
            geometry,
            stop_on_entry: p.stop_on_entry,
        };
        let rep = coupled_simulate(&cfg)?;
        Ok((
            rep.first_discrepancy_in_l.is_some(),
            rep.first_discrepancy_in_l.unwrap_or(f64::NAN),
            rep.discrepancy_birth_count,
            rep.max_excursion,
            rep.final_discrepancies,
        ))
    })?;
    let entered = rows.iter().filter(|r| r.0).count();
    let k = rows.len() as f64;
    let probability = entered as f64 / k;
    Ok(CouplingOutcome {
        n: p.n,
        tau,
        epsilon: p.epsilon,
        geometry,
        replicas: rows.len(),
        entered,
        probability,
        se: (probability * (1.0 - probability) / k).sqrt(),
        mean_births: rows.iter().map(|r| r.2 as f64).sum::<f64>() / k,
        rows,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KpzLevel {
    pub n: usize,
    pub she_points: usize,
    pub dbar: f64,
    pub r_n: f64,
    pub report: KpzReport,
    /// Relative one-point variance gap at the last requested time.
    pub final_gap: f64,
    /// One-point statistics per source, time and coarse site: (t, x, mean, variance, covariances by lag).
    #[serde(skip)]
    pub particle_stats: Vec<(f64, usize, f64, f64, Vec<f64>)>,
    #[serde(skip)]
    pub she_stats: Vec<(f64, usize, f64, f64, Vec<f64>)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KpzOutcome {
    pub times: Vec<f64>,
    pub lags: Vec<usize>,
    pub levels: Vec<KpzLevel>,
    pub gaps_non_increasing: bool,
}

impl Outcome for KpzOutcome {
    fn tables(&self) -> Vec<Table> {
        let mut columns: Vec<String> = ["n", "source", "t", "x", "mean_h", "var_h"].iter().map(|s| s.to_string()).collect();
        columns.extend(self.lags.iter().map(|l| format!("cov_lag_{l}")));
        let mut fields = Table::with_columns("fields", columns);
        for level in &self.levels {
            for (source, stats) in [("particle", &level.particle_stats), ("she", &level.she_stats)] {
                for (t, x, mean, var, cov) in stats {
                    let mut row = cells![level.n, source, t, x, mean, var];
                    row.extend(cov.iter().map(|c| c.to_string()));
                    fields.push(row);
                }
            }
        }
        let mut summary = Table::new("summary", &["n", "t", "var_particle", "var_she", "var_gap", "ks"]);
        for level in &self.levels {
            for tc in &level.report.times {
                summary.push(cells![level.n, tc.t, tc.var_a, tc.var_b, tc.var_gap, tc.ks]);
            }
        }
        vec![fields, summary]
    }
}

fn field_stats(ens: &FieldEnsemble, lags: &[usize]) -> Vec<(f64, usize, f64, f64, Vec<f64>)> {
    let mut out = Vec::new();
    for (k, &t) in ens.times.iter().enumerate() {
        for (x, s) in crate::she::ensemble_statistics(ens, k, lags).into_iter().enumerate() {
            out.push((t, x, s.mean, s.variance, s.covariance.iter().map(|c| c.1).collect()));
        }
    }
    out
}

pub fn kpz_compare(p: &KpzCompareParams, ctx: &Context) -> Result<KpzOutcome> {
    if p.times.is_empty() || p.grid_factor == 0 {
        return Err(Error::Validation("need at least one comparison time and a positive grid factor".into()));
    }
    let d = p.driving.build()?;
    let horizon = p.times.iter().copied().fold(0.0, f64::max);
    let grid = time_grid(horizon, p.frames_per_unit)?;
    for &t in &p.times {
        if !grid.iter().any(|g| (g - t).abs() <= 1e-9) {
            return Err(Error::Validation(format!("time {t} is not on the grid of step 1/{}", p.frames_per_unit)));
        }
    }
    let mut levels = Vec::new();
    for &n in &p.ns {
        let constants = compute_constants(&d, n)?;
        let m = n * p.grid_factor;
        let seed = ctx.sub_seed(&format!("kpz-{n}"));
        let pairs = ctx.pool.map(ctx.replicas, |r| {
            let record = torus(n, &d, horizon, seed, r, &grid, p.initial)?;
            let particle = grid
                .iter()
                .map(|&t| height_profile(&record, t).map(|h| h.values.iter().map(|v| v - constants.r_n * t).collect()))
                .collect::<Result<Vec<Vec<f64>>>>()?;
            let cfg = SheConfig {
                m,
                dt: p.dt,
                dbar: constants.dbar,
                horizon,
                initial_h: interpolate_profile(&particle[0], m),
                seed,
                replica: r as u64,
                scheme: p.scheme,
                record_times: grid.clone(),
                noise: 1.0,
            };
            let field = solve_she(&cfg)?;
            let she = grid
                .iter()
                .map(|&t| {
                    let k = field.frame_at(t).ok_or_else(|| Error::Numeric(format!("SHE frame at t = {t} missing")))?;
                    Ok(field.h(k).into_iter().step_by(p.grid_factor).collect())
                })
                .collect::<Result<Vec<Vec<f64>>>>()?;
            Ok((particle, she))
        })?;
        let mut a = FieldEnsemble::new(grid.clone(), n);
        let mut b = FieldEnsemble::new(grid.clone(), n);
        for (pa, sh) in pairs {
            a.push(pa)?;
            b.push(sh)?;
        }
        let report = compare_fields(&a, &b, constants.dbar, &p.lags)?;
        let last = p.times.iter().copied().fold(0.0, f64::max);
        let final_gap = report
            .times
            .iter()
            .find(|tc| (tc.t - last).abs() <= 1e-9)
            .map_or(f64::NAN, |tc| tc.var_gap);
        let kept = |ens: &FieldEnsemble| {
            field_stats(ens, &p.lags)
                .into_iter()
                .filter(|s| p.times.iter().any(|t| (t - s.0).abs() <= 1e-9))
                .collect::<Vec<_>>()
        };
        levels.push(KpzLevel {
            n,
            she_points: m,
            dbar: constants.dbar,
            r_n: constants.r_n,
            final_gap,
            particle_stats: kept(&a),
            she_stats: kept(&b),
            report,
        });
    }
    let gaps_non_increasing = levels.windows(2).all(|w| w[1].final_gap <= w[0].final_gap);
    let mut times = p.times.clone();
    times.sort_by(f64::total_cmp);
    Ok(KpzOutcome { times, lags: p.lags.clone(), levels, gaps_non_increasing })
}
