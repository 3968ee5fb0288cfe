use approx::assert_abs_diff_eq;
use kpzlab::dynamics::{simulate_torus, InitialCondition, SimConfig, Snapshot, TrajectoryRecord};
use kpzlab::ensembles::*;
use kpzlab::heat_kernel::build_kernel;
use kpzlab::observables::*;
use proptest::prelude::*;

fn record_with(eta: SpinConfig, times: &[f64]) -> TrajectoryRecord {
    TrajectoryRecord {
        ring_size: eta.ring_size(),
        horizon: *times.last().unwrap(),
        seed: 0,
        initial: eta.clone(),
        snapshots: times.iter().map(|&t| Snapshot { time: t, config: eta.clone(), flux: 0, integrals: Vec::new() }).collect(),
        observables: Vec::new(),
        events: None,
        event_count: 0,
        proposal_count: 0,
    }
}

#[test]
fn height_closes_around_the_ring() {
    let mut c = SimConfig::new(24, driving_left_neighbour(), 0.05, 3);
    c.initial = InitialCondition::Uniform;
    let rec = simulate_torus(&c).unwrap();
    let h = height_profile(&rec, 0.05).unwrap();
    let (eta, flux) = rec.state_at(0.05).unwrap();
    let a = 24f64.sqrt().recip();
    assert_abs_diff_eq!(h.values[0], 2.0 * a * flux as f64, epsilon = 1e-12);
    // With N/2 particles the increments around the ring sum to zero.
    assert_abs_diff_eq!(h.values[23] + a * eta.get(0) as f64, h.values[0], epsilon = 1e-12);
    let z = gartner_profile(&rec, 0.05, 7.0).unwrap();
    for (zv, hv) in z.values.iter().zip(&h.values) {
        assert_abs_diff_eq!(zv.ln(), -hv + 7.0 * 0.05, epsilon = 1e-12);
    }
}

#[test]
fn mean_height_drifts_with_renormalization() {
    let n = 32;
    let constants = compute_constants(&driving_zero(), n).unwrap();
    let mut total = 0.0;
    let replicas = 400;
    for r in 0..replicas {
        let mut c = SimConfig::new(n, driving_zero(), 0.5, 12);
        c.replica = r;
        total += height_profile(&simulate_torus(&c).unwrap(), 0.5).unwrap().values[0];
    }
    let mean = total / replicas as f64;
    // Loose statistical check; the acceptance suite runs the sharp version.
    assert!((mean - constants.r_n * 0.5).abs() < 1.0, "{mean} vs {}", constants.r_n * 0.5);
}

#[test]
fn gradients_and_laplacian() {
    let f: Vec<f64> = (0..8).map(|i| (i * i) as f64).collect();
    assert_eq!(spatial_gradient(&f, 1)[2], 5.0);
    assert_eq!(spatial_gradient(&f, -1)[0], 49.0);
    assert_abs_diff_eq!(laplacian(&f).iter().sum::<f64>(), 0.0, epsilon = 1e-12);
    let series = vec![vec![0.0; 3], vec![1.0; 3], vec![3.0; 3]];
    assert_eq!(time_gradient(&series, 0, 2), vec![3.0; 3]);
    assert_eq!(time_gradient(&series, 2, 5), vec![0.0; 3]);
}

#[test]
fn regularity_of_flat_and_rough_fields() {
    let frames: Vec<(f64, Vec<f64>)> = (0..5).map(|k| (k as f64 * 0.01, vec![1.0; 64])).collect();
    let r = regularity_moduli(&frames, Thresholds::default()).unwrap();
    assert_eq!(r.space_modulus, 0.0);
    assert_eq!(r.time_modulus, 0.0);
    assert!(!r.exceeded.any());
    assert_eq!(r.t_stop, 0.04);

    let rough: Vec<(f64, Vec<f64>)> =
        (0..5).map(|k| (k as f64 * 0.01, (0..64).map(|x| if (x + k) % 2 == 0 { 1e3 } else { 1e-3 }).collect())).collect();
    let r = regularity_moduli(&rough, Thresholds::default()).unwrap();
    assert!(r.exceeded.size);
    assert_eq!(r.t_stop, 0.0);
    assert!(regularity_moduli(&[], Thresholds::default()).is_err());
}

#[test]
fn duality_sweep_is_exhaustive() {
    for d in [driving_zero(), driving_left_neighbour()] {
        let c = compute_constants(&d, 32).unwrap();
        let f = build_flux_terms(&d).unwrap();
        let sweep = duality_sweep(32, &d, &c, &f).unwrap();
        let l = c.support_length.max(f.support_length);
        assert_eq!(sweep.windows, 1 << (2 * (3 * l + 2) + 1));
        assert!(sweep.max_residual.is_finite());
    }
    let d = driving_left_neighbour();
    let c = compute_constants(&d, 32).unwrap();
    let f = build_flux_terms(&d).unwrap();
    let eta = SpinConfig::alternating(32);
    assert!(verify_duality(&eta, 0, &d, &c, &f, 1.0).is_err());
    let x = *interior_range(32, c.support_length).start();
    assert!(verify_duality(&eta, x, &d, &c, &f, 1.0).is_ok());
}

#[test]
fn upsilon_single_step_matches_quadrature() {
    let n = 16;
    let d = driving_left_neighbour();
    let flux = build_flux_terms(&d).unwrap();
    let kernel = build_kernel(n, flux.dbar).unwrap();
    let mut rng = kpzlab::rng::stream(5, 0, kpzlab::rng::Role::Sampling);
    let eta = SpinConfig::random_with_count(n, n / 2, &mut rng).unwrap();
    let t = 0.004;
    let rec = record_with(eta.clone(), &[t]);
    let cfg = UpsilonConfig { report_times: vec![t], sites: (0..n).collect(), thresholds: Thresholds::default(), clip: false };
    let r_n = 3.0;
    let out = bg_functional(&rec, &kernel, &flux, r_n, &cfg).unwrap();

    // Forcing frozen at s = 0: Υ_t = ∫₀^t H(t − s) F ds, by Simpson's rule.
    let y0 = gartner_from_height(&height_from_config(&eta, 0, 0.0), r_n).values;
    let forcing: Vec<f64> = (0..n).map(|x| (n as f64).sqrt() * flux.q_bar.eval_at(&eta, x as i64) * y0[x]).collect();
    let steps = 400;
    let h = t / steps as f64;
    let mut integral = vec![0.0; n];
    for i in 0..=steps {
        let w = if i == 0 || i == steps { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let m = kernel.matrix(t - i as f64 * h).unwrap();
        for x in 0..n {
            integral[x] += w * h / 3.0 * (0..n).map(|y| m[x][y] * forcing[y]).sum::<f64>();
        }
    }
    for x in 0..n {
        assert_abs_diff_eq!(out.values_bg[0][x], integral[x], epsilon = 1e-9);
    }
    assert_abs_diff_eq!(out.sup_bg[0], integral.iter().fold(0.0f64, |m, v| m.max(v.abs())), epsilon = 1e-9);
}

#[test]
fn upsilon_vanishes_without_driving() {
    let n = 16;
    let flux = build_flux_terms(&driving_zero()).unwrap();
    let kernel = build_kernel(n, 0.0).unwrap();
    let rec = record_with(SpinConfig::alternating(n), &[0.01, 0.02]);
    let cfg = UpsilonConfig { report_times: vec![0.02], sites: vec![0, 5], thresholds: Thresholds::default(), clip: true };
    let out = bg_functional(&rec, &kernel, &flux, 8.0, &cfg).unwrap();
    assert_eq!(out.sup_bg, vec![0.0]);
    assert_eq!(out.sup_hl, vec![0.0]);
    let bad = UpsilonConfig { report_times: vec![0.015], ..cfg };
    assert!(bg_functional(&rec, &kernel, &flux, 8.0, &bad).is_err());
}

proptest! {
    #[test]
    fn height_increments(spins in prop::collection::vec(prop::bool::ANY, 2..64), flux in -50i64..50) {
        let s: Vec<i8> = spins.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let eta = SpinConfig::from_spins(&s).unwrap();
        let h = height_from_config(&eta, flux, 0.3);
        let a = (s.len() as f64).sqrt().recip();
        prop_assert!((h.values[0] - 2.0 * a * flux as f64).abs() < 1e-12);
        for x in 1..s.len() {
            prop_assert!((h.values[x] - h.values[x - 1] - a * s[x] as f64).abs() < 1e-12);
        }
    }
}
