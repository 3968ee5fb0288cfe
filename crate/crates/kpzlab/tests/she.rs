use std::f64::consts::PI;

use kpzlab::she::*;
use kpzlab::stats::Summary;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fourier_start(m: usize, k: f64, amp: f64) -> Vec<f64> {
    // Z₀ = 1 + amp·cos(2πkX), stored as h = −log Z₀
    (0..m).map(|j| -(1.0 + amp * (2.0 * PI * k * j as f64 / m as f64).cos()).ln()).collect()
}

fn mode_amplitude(z: &[f64], k: f64) -> f64 {
    let m = z.len() as f64;
    2.0 * z.iter().enumerate().map(|(j, v)| v * (2.0 * PI * k * j as f64 / m).cos()).sum::<f64>() / m
}

#[test]
fn deterministic_fourier_mode_decays() {
    for scheme in [Scheme::Explicit, Scheme::SemiImplicit] {
        let m = 64;
        let dx = 1.0 / m as f64;
        let dt = 0.25 * dx * dx;
        let mut cfg = SheConfig::flat(m, dt, 0.02, 0, scheme);
        cfg.initial_h = fourier_start(m, 1.0, 0.5);
        cfg.noise = 0.0;
        let field = solve_she(&cfg).unwrap();
        let last = field.z.len() - 1;
        let got = mode_amplitude(&field.z[last], 1.0);
        let expect = 0.5 * (-0.5 * (2.0 * PI).powi(2) * 0.02).exp();
        assert!((got - expect).abs() < 5.0 * (dt + dx * dx), "{scheme:?}: {got} vs {expect}");
    }
}

#[test]
fn single_step_moments() {
    let m = 16;
    let dx = 1.0 / m as f64;
    let dt = 0.5 * dx * dx;
    let replicas = 100_000;
    let mut values = Vec::with_capacity(replicas);
    for r in 0..replicas {
        let mut cfg = SheConfig::flat(m, dt, dt, 42, Scheme::Explicit);
        cfg.replica = r as u64;
        let f = solve_she(&cfg).unwrap();
        values.push(f.z[1][3]);
    }
    let s = Summary::of(&values);
    assert!((s.mean - 1.0).abs() <= 3.0 * s.std_error());
    let var = dt / dx;
    let se = Summary::variance_std_error(&values);
    assert!((s.variance - var).abs() <= 3.0 * se, "{} vs {var} ± {se}", s.variance);
}

#[test]
fn spatial_mean_of_expectation_conserved() {
    let m = 32;
    let dx = 1.0 / m as f64;
    let mut means = Vec::new();
    let start = fourier_start(m, 2.0, 0.3);
    let z0: f64 = start.iter().map(|h| (-h).exp()).sum::<f64>() / m as f64;
    for r in 0..2000 {
        let mut cfg = SheConfig::flat(m, 0.5 * dx * dx, 0.05, 7, Scheme::Explicit);
        cfg.initial_h = start.clone();
        cfg.replica = r;
        let f = solve_she(&cfg).unwrap();
        let last = f.z.len() - 1;
        means.push(f.z[last].iter().sum::<f64>() / m as f64);
    }
    let s = Summary::of(&means);
    assert!((s.mean - z0).abs() <= 3.0 * s.std_error(), "{} vs {z0}", s.mean);
}

#[test]
fn explicit_rejects_large_steps() {
    let cfg = SheConfig::flat(64, 1e-3, 0.1, 0, Scheme::Explicit);
    assert!(cfg.validate().is_err());
    let cfg = SheConfig::flat(64, 1e-3, 0.1, 0, Scheme::SemiImplicit);
    assert!(cfg.validate().is_ok());
}

#[test]
fn positivity_loss_aborts() {
    let mut cfg = SheConfig::flat(16, 1e-3, 0.5, 3, Scheme::Explicit);
    cfg.noise = 20.0;
    let err = solve_she(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 3);
}

#[test]
fn cyclic_solver_inverts_stencil() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for m in [3, 4, 17, 256] {
        let c = rng.gen_range(0.1..50.0);
        let x: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r: Vec<f64> = (0..m).map(|j| (1.0 + 2.0 * c) * x[j] - c * (x[(j + m - 1) % m] + x[(j + 1) % m])).collect();
        let y = CyclicSolver::new(m, c).solve(&r);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}

#[test]
fn cole_hopf_round_trip() {
    let mut cfg = SheConfig::flat(32, 1e-4, 0.01, 1, Scheme::SemiImplicit);
    cfg.record_times = vec![0.005];
    let f = solve_she(&cfg).unwrap();
    assert_eq!(f.times, vec![0.0, 0.005, 0.01]);
    for k in 0..f.times.len() {
        let h = f.h(k);
        for (hv, zv) in h.iter().zip(&f.z[k]) {
            assert!((-zv.ln() - hv).abs() <= 1e-12);
        }
    }
}

#[test]
fn deterministic_per_seed() {
    let cfg = SheConfig::flat(32, 1e-4, 0.01, 9, Scheme::SemiImplicit);
    assert_eq!(solve_she(&cfg).unwrap().z, solve_she(&cfg).unwrap().z);
}

fn ensemble(seed: u64, replicas: u64) -> FieldEnsemble {
    let mut ens = FieldEnsemble::new(vec![0.0, 0.05, 0.1], 32);
    for r in 0..replicas {
        let mut cfg = SheConfig::flat(32, 2e-4, 0.1, seed, Scheme::SemiImplicit);
        cfg.replica = r;
        cfg.record_times = vec![0.05];
        let f = solve_she(&cfg).unwrap();
        ens.push((0..3).map(|k| f.h(k)).collect()).unwrap();
    }
    ens
}

#[test]
fn compare_with_itself_is_zero() {
    let a = ensemble(1, 50);
    let rep = kpz_compare(&a, &a, 0.0, &[1, 4]).unwrap();
    for t in &rep.times {
        assert_eq!(t.ks, 0.0);
        assert_eq!(t.var_gap, 0.0);
    }
    let b = ensemble(2, 50);
    let rep = kpz_compare(&a, &b, 0.0, &[1]).unwrap();
    assert_eq!(rep.times[0].ks, 0.0);
    assert_eq!(rep.times[0].var_gap, 0.0);
    assert!(rep.times[2].ks > 0.0);
}

#[test]
fn martingale_diagnostic_is_centred() {
    let a = ensemble(5, 400);
    let d = martingale_diagnostic(&a, 0.0).unwrap();
    assert!(d.mean.abs() <= 4.0 * (d.variance / 400.0).sqrt(), "{d:?}");
    assert!(d.ratio > 0.5 && d.ratio < 2.0, "{d:?}");
}

#[test]
fn interpolation_keeps_samples() {
    let h = vec![0.0, 1.0, 0.0, -1.0];
    let g = interpolate_profile(&h, 8);
    assert_eq!(g, vec![0.0, 0.5, 1.0, 0.5, 0.0, -0.5, -1.0, -0.5]);
}
