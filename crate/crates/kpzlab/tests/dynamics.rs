use kpzlab::dynamics::trajfile::TrajectoryFile;
use kpzlab::dynamics::*;
use kpzlab::ensembles::*;
use kpzlab::exact::{build_from_rates, forward_evolve, StateSpace};
use kpzlab::stats::chi_square;
use proptest::prelude::*;

fn cfg(n: usize, d: LocalFunction, horizon: f64, seed: u64) -> SimConfig {
    SimConfig::new(n, d, horizon, seed)
}

#[test]
fn same_seed_same_path() {
    let mut c = cfg(32, driving_left_neighbour(), 0.3, 5);
    c.record_times = vec![0.1, 0.2, 0.3];
    let a = simulate_torus(&c).unwrap();
    let b = simulate_torus(&c).unwrap();
    assert_eq!(a.summary(), b.summary());
    assert_eq!(a.snapshots.iter().map(|s| s.flux).collect::<Vec<_>>(), b.snapshots.iter().map(|s| s.flux).collect::<Vec<_>>());
    c.replica = 1;
    let other = simulate_torus(&c).unwrap();
    assert_ne!(a.summary().event_count, other.summary().event_count);
}

#[test]
fn replay_reproduces_snapshots() {
    let mut c = cfg(16, driving_left_neighbour(), 0.05, 9);
    c.record_times = vec![0.01, 0.03, 0.05];
    c.log_events = true;
    c.initial = InitialCondition::Uniform;
    let rec = simulate_torus(&c).unwrap();
    let events = rec.events.as_ref().unwrap();
    assert_eq!(events.len() as u64, rec.event_count);
    for s in &rec.snapshots {
        let (eta, flux) = replay(&rec.initial, events, s.time);
        assert_eq!(eta, s.config);
        assert_eq!(flux, s.flux);
        let (eta2, flux2) = rec.state_at(s.time).unwrap();
        assert_eq!((eta2, flux2), (eta, flux));
    }
}

#[test]
fn law_at_fixed_time_matches_exact_evolution() {
    // Ring of 6 sites, 3 particles: 20 states, compared with the forward equation.
    let n = 6;
    let d = driving_left_neighbour();
    let t = 0.02;
    let space = StateSpace::hyperplane(n, n / 2).unwrap();
    let gen = build_from_rates(&space, n, &d).unwrap();
    let start = SpinConfig::alternating(n);
    let start_idx = space.index(start.to_mask() as u32).unwrap();
    // Uniform reference measure so densities are probabilities times |space|.
    let pi = vec![1.0 / space.len() as f64; space.len()];
    let mut p0 = vec![0.0; space.len()];
    p0[start_idx] = space.len() as f64;
    let probs: Vec<f64> = forward_evolve(&gen, &pi, &p0, t).unwrap().iter().zip(&pi).map(|(p, w)| p * w).collect();

    let replicas = 20_000;
    let mut counts = vec![0u64; space.len()];
    let mut c = cfg(n, d, t, 77);
    c.initial = InitialCondition::Given(start);
    for r in 0..replicas {
        c.replica = r;
        let rec = simulate_torus(&c).unwrap();
        let eta = &rec.snapshots.last().unwrap().config;
        counts[space.index(eta.to_mask() as u32).unwrap()] += 1;
    }
    let stat = chi_square(&counts, &probs);
    // 19 degrees of freedom; the 0.999 quantile is about 43.8.
    assert!(stat < 43.8, "chi-square {stat}");
}

#[test]
fn free_variant_preserves_canonical_measure() {
    // Under the free localized dynamics the canonical measure is invariant: the one-site
    // marginal stays at the initial density.
    let half_width = 3;
    let m = 2 * half_width + 1;
    let mut plus_at_zero = 0usize;
    let replicas = 4000;
    for r in 0..replicas {
        let c = LocalizedSimConfig {
            half_width,
            n: 64,
            d: driving_left_neighbour(),
            alpha: 1.0,
            variant: Variant::Free,
            initial: EnsembleSpec::canonical(m, 2).unwrap(),
            horizon: 0.01,
            seed: 3,
            replica: r,
            record_times: vec![0.01],
            observables: Vec::new(),
            log_events: false,
        };
        let rec = simulate_localized(&c).unwrap();
        let eta = &rec.snapshots[0].config;
        assert_eq!(eta.plus_count(), 2);
        plus_at_zero += usize::from(eta.is_plus(0));
    }
    let p = plus_at_zero as f64 / replicas as f64;
    let expected = 2.0 / m as f64;
    let se = (expected * (1.0 - expected) / replicas as f64).sqrt();
    assert!((p - expected).abs() < 4.0 * se, "{p} vs {expected}");
}

#[test]
fn coupling_geometry_and_marginal() {
    let g = CouplingGeometry::centred(64, 2, 0.1).unwrap();
    assert_eq!(g.inner_len, 5);
    assert_eq!(g.enlarged_len, g.inner_len + 2 * g.inner_offset);
    assert!(CouplingGeometry::centred(16, 3, 0.9).is_err());
    let mut entered = 0;
    for r in 0..200 {
        let c = CouplingConfig {
            n: 64,
            d: driving_left_neighbour(),
            alpha: 1.0,
            tau: 64f64.powf(-4.0 / 3.0),
            seed: 1,
            replica: r,
            epsilon: 0.1,
            geometry: g,
            stop_on_entry: true,
        };
        let rep = coupled_simulate(&c).unwrap();
        if let Some(t) = rep.first_discrepancy_in_l {
            assert!(t <= c.tau);
            entered += 1;
        }
        assert!(rep.max_excursion <= g.enlarged_len);
    }
    assert!(entered < 200);
}

#[test]
fn trajectory_file_round_trip() {
    let mut c = cfg(20, driving_left_neighbour(), 0.02, 4);
    c.record_times = vec![0.01, 0.02];
    let rec = simulate_torus(&c).unwrap();
    let file = TrajectoryFile::from_record(&rec);
    let mut bytes = Vec::new();
    file.write_to(&mut bytes).unwrap();
    assert_eq!(&bytes[..8], b"KPZTRAJ1");
    assert_eq!(TrajectoryFile::read_from(bytes.as_slice()).unwrap(), file);
    bytes[0] = b'X';
    assert!(TrajectoryFile::read_from(bytes.as_slice()).is_err());
}

#[test]
fn rejects_bad_configs() {
    assert!(simulate_torus(&cfg(7, driving_zero(), 1.0, 0)).is_err());
    let mut c = cfg(8, driving_zero(), 1.0, 0);
    c.record_times = vec![0.5, 0.2];
    assert!(simulate_torus(&c).is_err());
    c.record_times = vec![2.0];
    assert!(simulate_torus(&c).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn particles_conserved_and_flux_consistent(seed in 0u64..1000, half in 2usize..12) {
        let n = 2 * half;
        let mut c = cfg(n, driving_left_neighbour(), 0.02, seed);
        c.record_times = vec![0.005, 0.01, 0.02];
        c.initial = InitialCondition::Uniform;
        let rec = simulate_torus(&c).unwrap();
        for s in &rec.snapshots {
            prop_assert_eq!(s.config.plus_count(), n / 2);
        }
        prop_assert!(rec.event_count <= rec.proposal_count);
    }

    #[test]
    fn rates_nonnegative_when_valid(table in prop::collection::vec(-1.0f64..1.0, 8), n in 4usize..64) {
        let d = LocalFunction::driving(1, table).unwrap();
        let n = 2 * (n / 2);
        if validate_rates(n, &d, 1.0) {
            let rates = RateModel::new(n, Some(d), 1.0).unwrap();
            let eta = SpinConfig::alternating(n);
            for x in 0..n {
                prop_assert!(rates.swap_rate(&eta, x) >= 0.0);
                prop_assert!(rates.swap_rate(&eta, x) <= rates.cap() + 1e-9);
            }
        }
    }
}
