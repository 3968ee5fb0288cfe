use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::forms::relative_entropy;
use super::forward::forward_grid;
use super::generator::{build_generator, GeneratorMatrix, GeneratorVariant};
use super::state::{expectation, inner, StateSpace};
use crate::ensembles::{canonical_expectation, LocalFunction};
use crate::rng::{stream, Role};
use crate::stats::linear_fit;
use crate::{Error, Result};

/// max_j |Σ_i π_i Q_ij|.
pub fn invariance_defect(gen: &GeneratorMatrix, pi: &[f64]) -> f64 {
    gen.apply_left(pi).iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// max |π_i A_ij + π_j A_ji| over pairs, including the diagonal.
pub fn antisymmetry_defect(gen: &GeneratorMatrix, pi: &[f64]) -> f64 {
    let a = gen.to_dense();
    let m = gen.len();
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            worst = worst.max((pi[i] * a[(i, j)] + pi[j] * a[(j, i)]).abs());
        }
    }
    worst
}

/// |E[f A g] + E[g A f]|.
pub fn antisymmetry_pairing(gen: &GeneratorMatrix, pi: &[f64], f: &[f64], g: &[f64]) -> f64 {
    (inner(pi, f, &gen.apply(g)) + inner(pi, g, &gen.apply(f))).abs()
}

/// A table on the sites of one block, centred on each of its particle-count hyperplanes.
#[derive(Clone, Debug)]
pub struct BlockFunction {
    pub sites: Vec<usize>,
    pub table: Vec<f64>,
}

impl BlockFunction {
    /// Uniform(−1, 1) table minus its canonical means.
    pub fn random_centred(sites: Vec<usize>, rng: &mut impl Rng) -> Self {
        let b = sites.len();
        let mut table: Vec<f64> = (0..1usize << b).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for k in 0..=b {
            let idx: Vec<usize> = (0..1usize << b).filter(|m| m.count_ones() as usize == k).collect();
            let mean = idx.iter().map(|&m| table[m]).sum::<f64>() / idx.len() as f64;
            for m in idx {
                table[m] -= mean;
            }
        }
        BlockFunction { sites, table }
    }

    /// η_a − η_b for the first two sites.
    pub fn difference(a: usize, b: usize) -> Self {
        let table = (0..4usize).map(|m| {
            let s = |bit: usize| if (m >> bit) & 1 == 1 { 1.0 } else { -1.0 };
            s(0) - s(1)
        });
        BlockFunction { sites: vec![a, b], table: table.collect() }
    }

    fn pattern(&self, mask: u64) -> usize {
        self.sites.iter().enumerate().fold(0, |acc, (i, &x)| acc | ((((mask >> x) & 1) as usize) << i))
    }

    pub fn eval_mask(&self, mask: u64) -> f64 {
        self.table[self.pattern(mask)]
    }

    pub fn sup_norm(&self) -> f64 {
        self.table.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// max over m and over conditioning patterns of |E^π[f_{m+1} | η on 𝕀₁ ∪ … ∪ 𝕀_m]|.
pub fn azuma_conditional_defect(space: &StateSpace, pi: &[f64], blocks: &[BlockFunction]) -> Result<f64> {
    let mut seen = vec![false; space.ring()];
    for b in blocks {
        for &x in &b.sites {
            if x >= space.ring() || std::mem::replace(&mut seen[x], true) {
                return Err(Error::Domain("block supports must be disjoint and inside the ring".into()));
            }
        }
    }
    let mut worst = 0.0f64;
    let mut cond_mask = 0u32;
    for b in blocks {
        let mut groups: std::collections::HashMap<u32, (f64, f64)> = Default::default();
        for i in 0..space.len() {
            let s = space.state(i);
            let e = groups.entry(s & cond_mask).or_insert((0.0, 0.0));
            e.0 += pi[i] * b.eval_mask(s as u64);
            e.1 += pi[i];
        }
        for (num, den) in groups.values() {
            worst = worst.max((num / den).abs());
        }
        for &x in &b.sites {
            cond_mask |= 1 << x;
        }
    }
    Ok(worst)
}

/// κ⁻¹E[𝔭 log 𝔭] + κ⁻¹ log E[e^{κf}] − E[f𝔭]; nonnegative by the entropy inequality.
pub fn entropy_inequality_slack(pi: &[f64], p: &[f64], f: &[f64], kappa: f64) -> f64 {
    let mgf: f64 = pi.iter().zip(f).map(|(w, v)| w * (kappa * v).exp()).sum();
    relative_entropy(pi, p) / kappa + mgf.ln() / kappa - inner(pi, f, p)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureReport {
    pub ring: usize,
    pub n: usize,
    pub invariance_defect: f64,
    pub antisymmetry_defect: f64,
    pub antisymmetry_pairing: f64,
    pub azuma_defect: f64,
    pub azuma_difference_defect: f64,
    pub entropy_instances: usize,
    pub entropy_min_slack: f64,
    pub decomposition_error: f64,
    pub passed: bool,
}

/// Runs the four structural checks on the half-filled hyperplane of a ring of `ring` sites.
pub fn structure_checks(ring: usize, n: usize, d: &LocalFunction, instances: usize, seed: u64) -> Result<StructureReport> {
    let space = StateSpace::hyperplane(ring, ring / 2)?;
    let pi = space.weights(0.0);
    let free = build_generator(&space, n, d, GeneratorVariant::Free)?;
    let asym = build_generator(&space, n, d, GeneratorVariant::FreeAsym)?;
    let mut rng = stream(seed, 0, Role::Sampling);

    let invariance_defect = invariance_defect(&free, &pi);
    let antisymmetry_defect = antisymmetry_defect(&asym, &pi);
    let mut pairing = 0.0f64;
    for _ in 0..16 {
        let f: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let g: Vec<f64> = (0..space.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        pairing = pairing.max(antisymmetry_pairing(&asym, &pi, &f, &g));
    }

    let mut sites: Vec<usize> = (0..ring).collect();
    sites.shuffle(&mut rng);
    let blocks: Vec<BlockFunction> = sites.chunks(2).filter(|c| c.len() == 2).map(|c| BlockFunction::random_centred(c.to_vec(), &mut rng)).collect();
    let azuma_defect = azuma_conditional_defect(&space, &pi, &blocks)?;
    let diffs: Vec<BlockFunction> = (0..ring / 2).map(|i| BlockFunction::difference(2 * i, 2 * i + 1)).collect();
    let azuma_difference_defect = azuma_conditional_defect(&space, &pi, &diffs)?;

    let cube = StateSpace::cube(ring.min(10))?;
    let mut min_slack = f64::INFINITY;
    for _ in 0..instances {
        let sigma: f64 = rng.gen_range(-0.9..0.9);
        let w = cube.weights(sigma);
        let raw: Vec<f64> = (0..cube.len()).map(|_| rng.gen_range(0.0f64..1.0).powi(3)).collect();
        let mass = expectation(&w, &raw);
        let p: Vec<f64> = raw.iter().map(|v| v / mass).collect();
        let f: Vec<f64> = (0..cube.len()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let kappa = rng.gen_range(0.05..5.0);
        min_slack = min_slack.min(entropy_inequality_slack(&w, &p, &f, kappa));
    }

    let full = build_generator(&space, n, d, GeneratorVariant::Full)?;
    let sym = build_generator(&space, n, d, GeneratorVariant::Sym)?;
    let drift = build_generator(&space, n, d, GeneratorVariant::DriftOnly)?;
    let decomposition_error = super::generator::decomposition_error(&full, &[&sym, &asym, &drift]);

    let nf = n as f64;
    let scale = nf * nf;
    let passed = invariance_defect <= 1e-12 * scale
        && antisymmetry_defect <= 1e-12 * scale
        && pairing <= 1e-9 * scale
        && azuma_defect <= 1e-12
        && azuma_difference_defect <= 1e-12
        && min_slack >= -1e-12
        && decomposition_error <= 1e-12 * scale;
    Ok(StructureReport {
        ring,
        n,
        invariance_defect,
        antisymmetry_defect,
        antisymmetry_pairing: pairing,
        azuma_defect,
        azuma_difference_defect,
        entropy_instances: instances,
        entropy_min_slack: min_slack,
        decomposition_error,
        passed,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AzumaTailReport {
    pub blocks: usize,
    pub block_len: usize,
    pub replicas: usize,
    pub sup_norm: f64,
    /// (K, P(|Av| ≥ K n^{−1/2})).
    pub tail: Vec<(f64, f64)>,
    /// Least-squares fit of log P against K²: log P ≈ a − ĉK².
    pub c_hat: f64,
    pub intercept: f64,
}

/// Empirical tails of the block average (1/n)Σ f_i under the canonical measure at σ = 0 on a ring
/// of n·b sites, with f_i a shared canonically-centred table on consecutive blocks.
pub fn azuma_tail_fit(blocks: usize, block_len: usize, ks: &[f64], replicas: usize, seed: u64) -> Result<AzumaTailReport> {
    if blocks == 0 || block_len < 2 || block_len > 12 {
        return Err(Error::Domain("need at least one block of 2..=12 sites".into()));
    }
    let mut rng = stream(seed, 0, Role::Sampling);
    let proto = BlockFunction::random_centred((0..block_len).collect(), &mut rng);
    let sup = proto.sup_norm();
    let len = blocks * block_len;
    let mut spins: Vec<u8> = (0..len).map(|i| u8::from(i < len / 2)).collect();
    let mut averages = Vec::with_capacity(replicas);
    for r in 0..replicas {
        let mut rr = stream(seed, r as u64 + 1, Role::Sampling);
        spins.shuffle(&mut rr);
        let mut total = 0.0;
        for blk in spins.chunks(block_len) {
            let pattern = blk.iter().enumerate().fold(0usize, |acc, (i, &s)| acc | ((s as usize) << i));
            total += proto.table[pattern];
        }
        averages.push(total / blocks as f64);
    }
    let scale = (blocks as f64).sqrt().recip() * sup;
    let tail: Vec<(f64, f64)> = ks
        .iter()
        .map(|&k| {
            let hits = averages.iter().filter(|a| a.abs() >= k * scale).count();
            (k, hits as f64 / replicas as f64)
        })
        .collect();
    let pts: Vec<(f64, f64)> = tail.iter().filter(|(_, p)| *p > 0.0).map(|(k, p)| (k * k, p.ln())).collect();
    let (c_hat, intercept) = if pts.len() >= 2 {
        let fit = linear_fit(&pts.iter().map(|p| p.0).collect::<Vec<_>>(), &pts.iter().map(|p| p.1).collect::<Vec<_>>())?;
        (-fit.slope, fit.intercept)
    } else {
        (f64::INFINITY, 0.0)
    };
    Ok(AzumaTailReport { blocks, block_len, replicas, sup_norm: sup, tail, c_hat, intercept })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LocalReductionReport {
    pub n: usize,
    pub t: f64,
    pub kappa: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
}

/// ∫₀^t N⁻¹Σ_y E|f(τ_yη_s)|ds for the full process on a ring of N ≤ 14 sites from density `p0`
/// against κ⁻¹N⁻²|𝕀|³ + sup_σ E^{σ,𝕀}|f| with κ = 1/‖f‖_∞.
pub fn local_reduction_check(n: usize, d: &LocalFunction, f: &LocalFunction, p0: &[f64], t: f64, steps: usize) -> Result<LocalReductionReport> {
    let space = StateSpace::cube(n)?;
    let pi = space.weights(0.0);
    let gen = build_generator(&space, n, d, GeneratorVariant::Full)?;
    let times: Vec<f64> = (0..=steps).map(|k| t * k as f64 / steps as f64).collect();
    let dens = forward_grid(&gen, &pi, p0, &times)?;
    let avg: Vec<f64> = space.tabulate(|eta| (0..n as i64).map(|y| f.eval_at(eta, y).abs()).sum::<f64>() / n as f64);
    let vals: Vec<f64> = dens.iter().map(|p| inner(&pi, p, &avg)).collect();
    let h = t / steps as f64;
    let lhs = (1..vals.len()).map(|k| 0.5 * h * (vals[k] + vals[k - 1])).sum::<f64>();
    let support = f.len();
    let abs_f = f.map(f64::abs);
    let canonical = (0..=support).map(|k| canonical_expectation(&abs_f, support, k)).collect::<Result<Vec<_>>>()?;
    let sup_can = canonical.into_iter().fold(0.0f64, f64::max);
    let kappa = f.sup_norm().max(f64::MIN_POSITIVE).recip();
    let nf = n as f64;
    let rhs = (support as f64).powi(3) / (kappa * nf * nf) + sup_can;
    Ok(LocalReductionReport { n, t, kappa, lhs, rhs, constant: if rhs > 0.0 { lhs / rhs } else { 0.0 } })
}
