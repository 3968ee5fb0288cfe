use rand::Rng;
use serde::{Deserialize, Serialize};

use super::output::{Outcome, Table};
use super::params::{AzumaParams, ExactSuiteParams, Kv2Params, KvParams};
use super::Context;
use crate::cells;
use crate::dynamics::{simulate_localized, LocalizedSimConfig, Observable, Variant};
use crate::ensembles::{EnsembleSpec, LocalFunction};
use crate::exact::{
    azuma_conditional_defect, azuma_tail_fit, build_generator, entropy_production_check, entropy_time_grid, expectation,
    forward_grid, kv_exact_oracle, local_reduction_check, lp_moments, resolvent_checks, structure_checks, AzumaTailReport,
    BlockFunction, GeneratorVariant, LocalReductionReport, ResolventReport, StateSpace, StructureReport, SymmetricPart,
};
use crate::rng::{stream, Role};
use crate::stats::Summary;
use crate::{Error, Result};

/// Odd integer nearest N^{1/3 + 0.1}.
fn default_ring(n: usize) -> usize {
    let x = (n as f64).powf(1.0 / 3.0 + 0.1);
    let r = x.round() as usize;
    if r % 2 == 1 {
        r
    } else if x > r as f64 {
        r + 1
    } else {
        r.saturating_sub(1).max(1)
    }
}

/// Block table (bit i = site lo + i) as a local function with support starting at 0.
fn block_local(b: &BlockFunction) -> Result<LocalFunction> {
    LocalFunction::from_fn(0, b.sites.len(), |spins| {
        let pattern = spins.iter().enumerate().fold(0usize, |acc, (i, &s)| acc | (usize::from(s > 0) << i));
        b.table[pattern]
    })
}

/// Second moment of X and the standard error of that estimate.
fn second_moment(xs: &[f64]) -> (f64, f64) {
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let s = Summary::of(&sq);
    (s.mean, s.std_error())
}

struct LocalRun<'a> {
    ring: usize,
    n: usize,
    d: &'a LocalFunction,
    variant: Variant,
    initial: EnsembleSpec,
    horizon: f64,
    seed: u64,
}

impl LocalRun<'_> {
    /// Time integrals of the observables over [0, horizon] for one replica.
    fn integrals(&self, replica: usize, observables: &[Observable]) -> Result<Vec<f64>> {
        let cfg = LocalizedSimConfig {
            half_width: (self.ring - 1) / 2,
            n: self.n,
            d: self.d.clone(),
            alpha: 1.0,
            variant: self.variant,
            initial: self.initial,
            horizon: self.horizon,
            seed: self.seed,
            replica: replica as u64,
            record_times: vec![self.horizon],
            observables: observables.to_vec(),
            log_events: false,
        };
        let record = simulate_localized(&cfg)?;
        let last = record.snapshots.last().ok_or_else(|| Error::Numeric("no snapshot at the horizon".into()))?;
        Ok(last.integrals.clone())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KvOracleCheck {
    pub ring: usize,
    pub plus_count: usize,
    pub n: usize,
    pub t: f64,
    pub replicas: usize,
    /// Monte Carlo E|t⁻¹∫₀^t f|² and its standard error.
    pub mc: f64,
    pub mc_se: f64,
    pub oracle: f64,
    /// (mc − oracle)/se.
    pub z: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KvOutcome {
    pub n: usize,
    pub tau: f64,
    pub ring: usize,
    pub blocks: usize,
    pub block_len: usize,
    pub replicas: usize,
    /// Monte Carlo E|τ⁻¹∫₀^τ n⁻¹Σf_i|².
    pub lhs: f64,
    pub lhs_se: f64,
    /// N⁻²τ⁻¹n⁻¹ max|𝕀_i|².
    pub rhs: f64,
    pub ratio: f64,
    pub oracle: KvOracleCheck,
}

impl Outcome for KvOutcome {}

fn resolve_tau(n: usize, tau: Option<f64>) -> Result<f64> {
    let tau = tau.unwrap_or((n as f64).powf(-4.0 / 3.0));
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::Validation(format!("τ = {tau} must be positive")));
    }
    Ok(tau)
}

pub fn kv(p: &KvParams, ctx: &Context) -> Result<KvOutcome> {
    let tau = resolve_tau(p.n, p.tau)?;
    let ring = p.ring.unwrap_or_else(|| default_ring(p.n));
    if ring % 2 == 0 || p.block_len < 2 || p.block_len > ring {
        return Err(Error::Validation(format!("need an odd ring and blocks of 2..={ring} sites")));
    }
    let d = p.driving.build()?;
    let blocks = ring / p.block_len;
    let mut rng = stream(ctx.sub_seed("kv-tables"), 0, Role::Sampling);
    let observables = (0..blocks)
        .map(|i| {
            let b = BlockFunction::random_centred((0..p.block_len).collect(), &mut rng);
            Ok(Observable { f: block_local(&b)?, site: (i * p.block_len) as i64 })
        })
        .collect::<Result<Vec<_>>>()?;
    let run = LocalRun {
        ring,
        n: p.n,
        d: &d,
        variant: Variant::Full,
        initial: EnsembleSpec::Product { sigma: 0.0 },
        horizon: tau,
        seed: ctx.sub_seed("kv-dynamics"),
    };
    let averages = ctx.pool.map(ctx.replicas, |r| {
        let ints = run.integrals(r, &observables)?;
        Ok(ints.iter().sum::<f64>() / (blocks as f64 * tau))
    })?;
    let (lhs, lhs_se) = second_moment(&averages);
    let nf = p.n as f64;
    let rhs = (p.block_len * p.block_len) as f64 / (nf * nf * tau * blocks as f64);
    let oracle = kv_oracle_check(p, ctx, &d)?;
    Ok(KvOutcome {
        n: p.n,
        tau,
        ring,
        blocks,
        block_len: p.block_len,
        replicas: ctx.replicas,
        lhs,
        lhs_se,
        rhs,
        ratio: lhs / rhs,
        oracle,
    })
}

fn kv_oracle_check(p: &KvParams, ctx: &Context, d: &LocalFunction) -> Result<KvOracleCheck> {
    let ring = p.oracle_ring;
    let plus = ring / 2;
    let space = StateSpace::hyperplane(ring, plus)?;
    let pi = space.weights(0.0);
    let gen = build_generator(&space, p.oracle_n, d, GeneratorVariant::Free)?;
    let mut rng = stream(ctx.sub_seed("kv-oracle-table"), 0, Role::Sampling);
    let f = block_local(&BlockFunction::random_centred((0..p.block_len).collect(), &mut rng))?;
    let table = space.tabulate(|eta| f.eval_at(eta, 0));
    let t = (p.oracle_n as f64).powf(-4.0 / 3.0);
    let oracle = kv_exact_oracle(&gen, None, &pi, &table, t)?.second_moment / (t * t);
    let run = LocalRun {
        ring,
        n: p.oracle_n,
        d,
        variant: Variant::Free,
        initial: EnsembleSpec::canonical(ring, plus)?,
        horizon: t,
        seed: ctx.sub_seed("kv-oracle-dynamics"),
    };
    let obs = [Observable { f, site: 0 }];
    let xs = ctx.pool.map(p.oracle_replicas, |r| Ok(run.integrals(r, &obs)?[0] / t))?;
    let (mc, mc_se) = second_moment(&xs);
    Ok(KvOracleCheck {
        ring,
        plus_count: plus,
        n: p.oracle_n,
        t,
        replicas: p.oracle_replicas,
        mc,
        mc_se,
        oracle,
        z: (mc - oracle) / mc_se,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Kv2Outcome {
    pub n: usize,
    pub tau: f64,
    pub ring: usize,
    pub i1_len: usize,
    pub i2_len: usize,
    pub replicas: usize,
    pub lhs: f64,
    pub lhs_se: f64,
    /// N⁻²τ⁻¹|𝕀₁|².
    pub rhs: f64,
    pub ratio: f64,
    /// The Kipnis–Varadhan right-hand side with the joint support, N⁻²τ⁻¹(|𝕀₁| + |𝕀₂|)², for comparison.
    pub joint_rhs: f64,
}

impl Outcome for Kv2Outcome {}

pub fn kv2(p: &Kv2Params, ctx: &Context) -> Result<Kv2Outcome> {
    let tau = resolve_tau(p.n, p.tau)?;
    let ring = p.ring.unwrap_or_else(|| default_ring(p.n));
    if ring % 2 == 0 || p.i1_len < 1 || p.i2_len < 1 || p.i1_len + p.i2_len > ring {
        return Err(Error::Validation(format!("supports of {} and {} sites must fit in the odd ring {ring}", p.i1_len, p.i2_len)));
    }
    let d = p.driving.build()?;
    let mut rng = stream(ctx.sub_seed("kv2-tables"), 0, Role::Sampling);
    let f1 = block_local(&BlockFunction::random_centred((0..p.i1_len).collect(), &mut rng))?;
    let table2: Vec<f64> = (0..1usize << p.i2_len).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let f2 = LocalFunction::new(p.i1_len as i64, p.i2_len, table2)?;
    let product = f1.mul(&f2)?;
    let run = LocalRun {
        ring,
        n: p.n,
        d: &d,
        variant: Variant::Full,
        initial: EnsembleSpec::Product { sigma: 0.0 },
        horizon: tau,
        seed: ctx.sub_seed("kv2-dynamics"),
    };
    let obs = [Observable { f: product, site: 0 }];
    let xs = ctx.pool.map(ctx.replicas, |r| Ok(run.integrals(r, &obs)?[0] / tau))?;
    let (lhs, lhs_se) = second_moment(&xs);
    let nf = p.n as f64;
    let scale = 1.0 / (nf * nf * tau);
    let rhs = scale * (p.i1_len * p.i1_len) as f64;
    Ok(Kv2Outcome {
        n: p.n,
        tau,
        ring,
        i1_len: p.i1_len,
        i2_len: p.i2_len,
        replicas: ctx.replicas,
        lhs,
        lhs_se,
        rhs,
        ratio: lhs / rhs,
        joint_rhs: scale * ((p.i1_len + p.i2_len) as f64).powi(2),
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AzumaOutcome {
    pub tails: AzumaTailReport,
    /// Largest c with P(|Av| ≥ K·sup|f|·n^{−1/2}) ≤ exp(−cK²) at every K.
    pub c_bound: f64,
    pub exact_ring: usize,
    pub conditional_defect: f64,
    pub passed: bool,
}

impl Outcome for AzumaOutcome {
    fn tables(&self) -> Vec<Table> {
        let mut t = Table::new("tails", &["k", "probability", "bound"]);
        for &(k, p) in &self.tails.tail {
            t.push(cells![k, p, (-self.c_bound * k * k).exp()]);
        }
        vec![t]
    }
}

pub fn azuma(p: &AzumaParams, ctx: &Context) -> Result<AzumaOutcome> {
    if p.ks.is_empty() {
        return Err(Error::Validation("need at least one K".into()));
    }
    let tails = azuma_tail_fit(p.blocks, p.block_len, &p.ks, ctx.replicas, ctx.sub_seed("azuma-tails"))?;
    let c_bound = tails
        .tail
        .iter()
        .map(|&(k, prob)| if prob > 0.0 { -prob.ln() / (k * k) } else { f64::INFINITY })
        .fold(f64::INFINITY, f64::min);
    let space = StateSpace::hyperplane(p.exact_ring, p.exact_ring / 2)?;
    let pi = space.weights(0.0);
    let mut rng = stream(ctx.sub_seed("azuma-exact"), 0, Role::Sampling);
    let blocks: Vec<BlockFunction> = (0..p.exact_ring / p.block_len)
        .map(|i| BlockFunction::random_centred((i * p.block_len..(i + 1) * p.block_len).collect(), &mut rng))
        .collect();
    let conditional_defect = azuma_conditional_defect(&space, &pi, &blocks)?;
    let passed = tails.c_hat > 0.0 && c_bound > 0.0 && conditional_defect <= 1e-12;
    Ok(AzumaOutcome { tails, c_bound, exact_ring: p.exact_ring, conditional_defect, passed })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyCase {
    pub n: usize,
    pub density: usize,
    pub entropy: f64,
    pub constant: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactSuiteOutcome {
    pub structure: Vec<StructureReport>,
    pub entropy: Vec<EntropyCase>,
    pub max_entropy_constant: f64,
    pub lp_ring: usize,
    pub lp_n: usize,
    /// (p, max over t ≤ N^{−4/3} of E|𝔭_t|^p).
    pub lp: Vec<(f64, f64)>,
    pub resolvent: Vec<ResolventReport>,
    pub max_resolvent_ratio: f64,
    pub local_reduction: LocalReductionReport,
    pub passed: bool,
}

impl Outcome for ExactSuiteOutcome {
    fn tables(&self) -> Vec<Table> {
        let mut r = Table::new(
            "resolvent",
            &["n", "lambda", "h_minus1_sq", "l2_ratio", "dirichlet_ratio", "linf_ratio", "linf_ratio_scaled", "solve_residual"],
        );
        for x in &self.resolvent {
            r.push(cells![
                x.n,
                x.lambda,
                x.h_minus1_sq,
                x.l2_ratio,
                x.dirichlet_ratio,
                x.linf_ratio,
                x.linf_ratio_scaled,
                x.solve_residual
            ]);
        }
        let mut e = Table::new("entropy", &["n", "density", "entropy", "constant"]);
        for c in &self.entropy {
            e.push(cells![c.n, c.density, c.entropy, c.constant]);
        }
        vec![r, e]
    }
}

fn random_density(space: &StateSpace, pi: &[f64], rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(0.0f64..1.0).powi(2)).collect();
    let mass = expectation(pi, &raw);
    raw.iter().map(|v| v / mass).collect()
}

pub fn exact_suite(p: &ExactSuiteParams, ctx: &Context) -> Result<ExactSuiteOutcome> {
    let d = p.driving.build()?;
    let structure = p
        .rings
        .iter()
        .map(|&ring| structure_checks(ring, p.n, &d, p.instances, ctx.sub_seed(&format!("structure-{ring}"))))
        .collect::<Result<Vec<_>>>()?;

    let cube = StateSpace::cube(7)?;
    let pi = cube.weights(0.0);
    let mut entropy = Vec::new();
    for &n in &p.entropy_ns {
        let gen = build_generator(&cube, n, &d, GeneratorVariant::Full)?;
        let grid = entropy_time_grid(n, 0.05, 40);
        let mut rng = stream(ctx.sub_seed(&format!("entropy-{n}")), 0, Role::Sampling);
        for k in 0..p.densities {
            let p0 = random_density(&cube, &pi, &mut rng);
            let rep = entropy_production_check(&cube, &gen, &pi, &p0, &grid)?;
            entropy.push(EntropyCase { n, density: k, entropy: rep.entropy, constant: rep.constant });
        }
    }
    let max_entropy_constant = entropy.iter().map(|c| c.constant).fold(0.0, f64::max);

    let lp_n = 64;
    let gen = build_generator(&cube, lp_n, &d, GeneratorVariant::Full)?;
    let horizon = (lp_n as f64).powf(-4.0 / 3.0);
    let times: Vec<f64> = (1..=20).map(|k| horizon * k as f64 / 20.0).collect();
    let dens = forward_grid(&gen, &pi, &vec![1.0; cube.len()], &times)?;
    let lp = lp_moments(&pi, &dens, &[2.0, 4.0, 8.0]);

    let mut resolvent = Vec::new();
    let mut rng = stream(ctx.sub_seed("resolvent"), 0, Role::Sampling);
    for &ring in &p.resolvent_rings {
        let space = StateSpace::hyperplane(ring, ring / 2)?;
        let wts = space.weights(0.0);
        for &n in &p.resolvent_ns {
            let free = build_generator(&space, n, &d, GeneratorVariant::Free)?;
            let sym = SymmetricPart::new(&free, &wts)?;
            let nf = n as f64;
            for lambda in [nf * nf, nf.powf(4.0 / 3.0), nf] {
                for _ in 0..p.functions {
                    let mut f: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let m = expectation(&wts, &f);
                    f.iter_mut().for_each(|v| *v -= m);
                    resolvent.push(resolvent_checks(&space, &free, &sym, &wts, &f, lambda)?);
                }
            }
        }
    }
    let max_resolvent_ratio = resolvent
        .iter()
        .flat_map(|r| [r.l2_ratio, r.dirichlet_ratio, r.linf_ratio, r.linf_ratio_scaled])
        .fold(0.0, f64::max);

    let ring = 10;
    let space = StateSpace::cube(ring)?;
    let wts = space.weights(0.0);
    let mut rng = stream(ctx.sub_seed("local-reduction"), 0, Role::Sampling);
    let p0 = random_density(&space, &wts, &mut rng);
    let f = LocalFunction::from_fn(0, 2, |s| (s[0] - s[1]) as f64)?;
    let local_reduction = local_reduction_check(ring, &d, &f, &p0, 1.0, 200)?;

    let passed = structure.iter().all(|s| s.passed)
        && max_entropy_constant <= 10.0
        && lp.iter().all(|&(_, m)| m <= 2.0)
        && max_resolvent_ratio <= 5.0
        && resolvent.iter().all(|r| r.solve_residual <= 1e-10 * (1.0 + r.lambda))
        && local_reduction.lhs >= 0.0
        && local_reduction.constant.is_finite();
    Ok(ExactSuiteOutcome {
        structure,
        entropy,
        max_entropy_constant,
        lp_ring: 7,
        lp_n,
        lp,
        resolvent,
        max_resolvent_ratio,
        local_reduction,
        passed,
    })
}
