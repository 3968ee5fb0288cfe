//! Acceptance suite: one line per criterion.
//!
//! `KPZLAB_ACCEPTANCE=1,7,13` restricts the run to the listed criteria. Failing criteria are
//! reported but only turn into a nonzero exit status when `KPZLAB_ACCEPTANCE_STRICT` is set,
//! so that the remaining test binaries of a workspace run still execute.

use std::collections::HashMap;
use std::time::Instant;

use kpzlab::ensembles::*;
use kpzlab::experiments::{self, resolve_threads, Context, ExactSuiteOutcome, Kind};
use kpzlab::rng::{stream, Role};
use kpzlab::Result;
use rand::Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn context(kind: Kind) -> Context {
    let threads = resolve_threads(None, None).unwrap_or(1);
    Context::new(kind.default_replicas(), 0, threads)
}

/// E⁰ of a function of the spins on sites lo..lo+len, by enumeration.
fn e0(lo: i64, len: usize, f: impl Fn(&dyn Fn(i64) -> f64) -> f64) -> f64 {
    let mut total = 0.0;
    for mask in 0..1usize << len {
        let spin = |x: i64| if mask >> (x - lo) & 1 == 1 { 1.0 } else { -1.0 };
        total += f(&spin);
    }
    total / (1usize << len) as f64
}

fn c1() -> Result<Verdict> {
    let zero = compute_constants(&driving_zero(), 128)?;
    let exact = 64.0 - 1.0 / 24.0;
    let c = compute_constants(&driving_left_neighbour(), 128)?;
    // Oracles for d = η₋₁ on sites −1..1 and the shifted copy on −7..−5.
    let flux = |s: &dyn Fn(i64) -> f64| s(-1) * (1.0 - s(0) * s(1));
    let dbar = 0.5 * e0(-1, 3, |s| flux(s) * (s(-1) + s(0) + s(1)));
    let r21 = -0.5 * e0(-1, 3, flux);
    let r23 = -0.5 * e0(-7, 3, |s| s(-7) * (1.0 - s(-6) * s(-5)))
        - 0.5 * e0(-1, 3, |s| s(-1) * (s(1) - s(0)));
    let r22 = 0.5 * dbar;
    let errs = [
        (zero.r_n - exact).abs(),
        (c.dbar - dbar).abs(),
        (c.r21 - r21).abs(),
        (c.r22 - r22).abs(),
        (c.r23 - r23).abs(),
        (c.dbar - 0.5).abs(),
        c.r21.abs(),
        (c.r22 - 0.25).abs(),
        c.r23.abs(),
    ];
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    verdict(
        zero.r_n == exact && worst <= 1e-12,
        format!("R_N(d=0,N=128) = {:.15}, d̄ = {}, R21 = {}, R22 = {}, R23 = {}, max error {worst:.1e}", zero.r_n, c.dbar, c.r21, c.r22, c.r23),
    )
}

fn c2() -> Result<Verdict> {
    let mut rng = stream(2, 0, Role::Sampling);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let radius = i % 4;
        let table: Vec<f64> = (0..1usize << (2 * radius + 1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let d = LocalFunction::driving(radius, table)?;
        let (adjusted, _) = adjust_driving(&d)?;
        worst = worst.max(check_flatness(&adjusted)?.abs());
    }
    verdict(worst <= 1e-12, format!("max |∂²_σ E^σ| after adjustment over 100 drivings: {worst:.1e}"))
}

fn c3() -> Result<Verdict> {
    let mut pair = 0.0f64;
    for len in 2..=10usize {
        for k in 0..=len {
            let s = canonical_density(len, k);
            let v = canonical_expectation(&LocalFunction::product(&[0, 1]), len, k)?;
            pair = pair.max((v - (s * s - (1.0 - s * s) / (len as f64 - 1.0))).abs());
        }
    }
    let mut rng = stream(3, 0, Role::Sampling);
    let mut total = 0.0f64;
    for _ in 0..50 {
        let table: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = LocalFunction::new(0, 3, table)?;
        let sigma: f64 = rng.gen_range(-0.9..0.9);
        let p = 0.5 * (1.0 + sigma);
        for len in 3..=10usize {
            let mut mix = 0.0;
            for k in 0..=len {
                let binom: f64 = (0..k).map(|i| (len - i) as f64 / (i + 1) as f64).product();
                mix += binom * p.powi(k as i32) * (1.0 - p).powi((len - k) as i32) * canonical_expectation(&f, len, k)?;
            }
            total = total.max((mix - product_expectation(&f, sigma)).abs());
        }
    }
    verdict(pair <= 1e-12 && total <= 1e-10, format!("pair correlation error {pair:.1e}, total expectation error {total:.1e}"))
}

fn c4() -> Result<Verdict> {
    let f = build_flux_terms(&driving_left_neighbour())?.q_bar;
    let smallest = f.len();
    let (mut mean, mut tele, mut cases) = (0.0f64, 0.0f64, 0);
    for outer in smallest..=8usize {
        // Every increasing scale sequence in smallest..=outer.
        let pool: Vec<usize> = (smallest..=outer).collect();
        for subset in 1..1usize << pool.len() {
            let scales: Vec<usize> = pool.iter().enumerate().filter(|(i, _)| subset >> i & 1 == 1).map(|(_, &l)| l).collect();
            if scales[0] != smallest {
                continue;
            }
            let c = centering_check(&f, &scales, outer)?;
            mean = mean.max(c.max_mean);
            tele = tele.max(c.max_telescoping);
            cases += 1;
        }
    }
    verdict(mean <= 1e-12 && tele <= 1e-12, format!("{cases} scale sequences: max |E R̃_k| {mean:.1e}, telescoping {tele:.1e}"))
}

fn c5() -> Result<Verdict> {
    let f = build_flux_terms(&driving_left_neighbour())?.q_bar;
    let d = canonical_decay(&f, &[8, 16, 32, 64])?;
    verdict((d.slope + 1.5).abs() <= 0.25, format!("maxima {:?}, slope {:.3}", d.maxima, d.slope))
}

fn c6(suite: &ExactSuiteOutcome) -> Result<Verdict> {
    let mut worst = 0.0f64;
    for s in &suite.structure {
        let scale = (s.n * s.n) as f64;
        worst = worst.max(s.invariance_defect.max(s.antisymmetry_defect).max(s.decomposition_error) / scale);
    }
    let rings: Vec<usize> = suite.structure.iter().map(|s| s.ring).collect();
    verdict(worst <= 1e-12, format!("rings {rings:?}: max defect relative to N² {worst:.1e}"))
}

fn c7() -> Result<Verdict> {
    let out = experiments::duality(&Default::default())?;
    let parts: Vec<String> = out
        .cases
        .iter()
        .map(|c| format!("N={} {}: {:.3}", c.sweep.n, c.driving, c.sweep.max_residual))
        .collect();
    verdict(out.passed, format!("max relative residual (tolerance {:.0e}) {}", out.tolerance, parts.join(", ")))
}

fn c8(suite: &ExactSuiteOutcome) -> Result<Verdict> {
    let worst = suite.lp.iter().map(|&(_, m)| m).fold(0.0, f64::max);
    verdict(worst <= 2.0, format!("max E|𝔭_t|^p for p in 2,4,8: {:?}", suite.lp.iter().map(|p| p.1).collect::<Vec<_>>()))
}

fn c9(suite: &ExactSuiteOutcome) -> Result<Verdict> {
    verdict(
        suite.max_entropy_constant <= 10.0,
        format!("max fitted constant {:.4} over {} densities", suite.max_entropy_constant, suite.entropy.len()),
    )
}

fn c10(suite: &ExactSuiteOutcome) -> Result<Verdict> {
    verdict(
        suite.max_resolvent_ratio <= 5.0,
        format!("max ratio {:.4} over {} cases", suite.max_resolvent_ratio, suite.resolvent.len()),
    )
}

fn c11() -> Result<Verdict> {
    let kv = experiments::kv(&Default::default(), &context(Kind::Kv))?;
    let kv2 = experiments::kv2(&Default::default(), &context(Kind::Kv2))?;
    let z = kv.oracle.z;
    verdict(
        kv.ratio <= 100.0 && kv2.ratio <= 100.0 && z.abs() <= 3.0,
        format!(
            "kv LHS/RHS {:.4}, kv2 LHS/RHS {:.4} (N={}, ring {}); oracle {:.5} vs MC {:.5} ± {:.5}, z = {z:.2}",
            kv.ratio, kv2.ratio, kv.n, kv.ring, kv.oracle.oracle, kv.oracle.mc, kv.oracle.mc_se
        ),
    )
}

fn c12() -> Result<Verdict> {
    let a = experiments::azuma(&Default::default(), &context(Kind::Azuma))?;
    verdict(
        a.passed,
        format!("ĉ fit {:.3}, min -ln P/K² {:.3}, conditional defect {:.1e}", a.tails.c_hat, a.c_bound, a.conditional_defect),
    )
}

fn c13() -> Result<Verdict> {
    let h = experiments::heatkernel_verify(&Default::default(), &context(Kind::HeatkernelVerify))?;
    let expm = h.expm_errors.iter().map(|e| e.1).fold(0.0, f64::max);
    verdict(
        h.max_row_sum_error <= 1e-12 && expm <= 1e-10 && h.max_on_diagonal <= 5.0 && h.mc_within_3_sigma,
        format!(
            "row sums {:.1e}, expm {:.1e}, on-diagonal constant {:.3}, MC within 3σ: {}",
            h.max_row_sum_error, expm, h.max_on_diagonal, h.mc_within_3_sigma
        ),
    )
}

fn c14() -> Result<Verdict> {
    let p = experiments::SimulateParams { n: 128, horizon: 1.0, profile_replicas: 0, ..Default::default() };
    let s = experiments::simulate(&p, &context(Kind::Simulate))?;
    let last = s.times.last().expect("horizon is recorded");
    verdict(
        last.mean_centred_h0.abs() <= 0.5,
        format!(
            "R_N t = {:.4}, mean h - R_N t = {:.4} ± {:.4} over {} replicas",
            s.r_n * last.t,
            last.mean_centred_h0,
            last.se,
            s.replicas
        ),
    )
}

fn c15() -> Result<Verdict> {
    let b = experiments::bg_decay(&Default::default(), &context(Kind::BgDecay))?;
    let means: Vec<String> = b.levels.iter().map(|l| format!("N={}: {:.4} ± {:.4}", l.n, l.mean_sup_bg, l.se_bg)).collect();
    verdict(
        b.strictly_decreasing && b.exponent_bg < 0.0,
        format!("{}; exponent {:.3}", means.join(", "), b.exponent_bg),
    )
}

fn c16() -> Result<Verdict> {
    let c = experiments::coupling(&Default::default(), &context(Kind::Coupling))?;
    verdict(
        c.probability <= 0.01,
        format!("P(entry) = {:.4} ± {:.4} ({} of {} replicas, N={})", c.probability, c.se, c.entered, c.replicas, c.n),
    )
}

fn c17() -> Result<Verdict> {
    let k = experiments::kpz_compare(&Default::default(), &context(Kind::KpzCompare))?;
    let gaps: Vec<String> = k.levels.iter().map(|l| format!("N={}: {:.3}", l.n, l.final_gap)).collect();
    let last = k.levels.last().expect("at least one level").final_gap;
    verdict(
        last <= 0.25 && k.gaps_non_increasing,
        format!("relative variance gaps at the last time {}", gaps.join(", ")),
    )
}

fn main() {
    let selected: Option<Vec<usize>> = std::env::var("KPZLAB_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let wanted = |i: usize| selected.as_ref().map_or(true, |s| s.contains(&i));

    let names: HashMap<usize, &str> = [
        (1, "constants"),
        (2, "flatness"),
        (3, "canonical ensembles"),
        (4, "multiscale centering"),
        (5, "canonical decay"),
        (6, "generator structure"),
        (7, "duality identity"),
        (8, "Lp stability"),
        (9, "entropy production"),
        (10, "resolvent bounds"),
        (11, "Kipnis-Varadhan"),
        (12, "Azuma tails"),
        (13, "heat kernel"),
        (14, "renormalization drift"),
        (15, "BG decay trend"),
        (16, "coupling"),
        (17, "KPZ comparison"),
    ]
    .into_iter()
    .collect();

    let mut suite: Option<ExactSuiteOutcome> = None;
    let mut failures = 0;
    for id in 1..=17usize {
        if !wanted(id) {
            continue;
        }
        let start = Instant::now();
        let outcome = match id {
            6 | 8 | 9 | 10 => {
                if suite.is_none() {
                    match experiments::exact_suite(&Default::default(), &context(Kind::ExactSuite)) {
                        Ok(s) => suite = Some(s),
                        Err(e) => {
                            failures += 1;
                            println!("FAIL #{id:<2} {}: {e}", names[&id]);
                            continue;
                        }
                    }
                }
                let s = suite.as_ref().expect("computed above");
                match id {
                    6 => c6(s),
                    8 => c8(s),
                    9 => c9(s),
                    _ => c10(s),
                }
            }
            1 => c1(),
            2 => c2(),
            3 => c3(),
            4 => c4(),
            5 => c5(),
            7 => c7(),
            11 => c11(),
            12 => c12(),
            13 => c13(),
            14 => c14(),
            15 => c15(),
            16 => c16(),
            _ => c17(),
        };
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(v) => {
                if !v.pass {
                    failures += 1;
                }
                println!("{} #{id:<2} {}: {} [{secs:.1}s]", if v.pass { "PASS" } else { "FAIL" }, names[&id], v.detail);
            }
            Err(e) => {
                failures += 1;
                println!("FAIL #{id:<2} {}: error: {e} [{secs:.1}s]", names[&id]);
            }
        }
    }
    println!("acceptance: {failures} failing criteria");
    if failures > 0 && std::env::var_os("KPZLAB_ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
