use approx::assert_abs_diff_eq;
use kpzlab::ensembles::*;
use proptest::prelude::*;

fn brute_poly(f: &LocalFunction, sigma: f64) -> f64 {
    let mut spins = vec![0i8; f.len()];
    (0..1usize << f.len())
        .map(|idx| {
            decode_into(idx, &mut spins);
            let w: f64 = spins.iter().map(|&s| 0.5 * (1.0 + sigma * s as f64)).product();
            w * f.eval_index(idx)
        })
        .sum()
}

#[test]
fn single_site_and_pair_polynomials() {
    let p = product_expectation_poly(&LocalFunction::site(0));
    assert_abs_diff_eq!(p.coeff(0), 0.0);
    assert_abs_diff_eq!(p.coeff(1), 1.0);
    let p = product_expectation_poly(&LocalFunction::product(&[0, 1]));
    assert_abs_diff_eq!(p.coeff(2), 1.0, epsilon = 1e-15);
    assert_abs_diff_eq!(p.coeff(1), 0.0, epsilon = 1e-15);
}

#[test]
fn left_neighbour_flux_polynomial() {
    let d = driving_left_neighbour();
    let p = product_expectation_poly(&flux_of(&d).unwrap());
    for (k, c) in [0.0, 1.0, 0.0, -1.0].into_iter().enumerate() {
        assert_abs_diff_eq!(p.coeff(k), c, epsilon = 1e-14);
    }
    assert_abs_diff_eq!(compute_dbar(&d).unwrap(), 0.5, epsilon = 1e-14);
    assert_abs_diff_eq!(check_flatness(&d).unwrap(), 0.0, epsilon = 1e-14);
}

#[test]
fn dbar_of_symmetric_product_vanishes() {
    let d = LocalFunction::product(&[-1, 1]);
    assert_abs_diff_eq!(compute_dbar(&d).unwrap(), 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(compute_dbar(&driving_constant(2.5)).unwrap(), 0.0, epsilon = 1e-14);
}

#[test]
fn adjust_driving_removes_defect() {
    let d = LocalFunction::product(&[0, 1]);
    let (d2, c) = adjust_driving(&d).unwrap();
    assert!(c != 0.0);
    assert_abs_diff_eq!(check_flatness(&d2).unwrap(), 0.0, epsilon = 1e-12);
}

#[test]
fn constants_zero_driving() {
    let c = compute_constants(&driving_zero(), 128).unwrap();
    assert_eq!(c.r_n, 64.0 - 1.0 / 24.0);
}

#[test]
fn constants_left_neighbour() {
    let c = compute_constants(&driving_left_neighbour(), 64).unwrap();
    assert_abs_diff_eq!(c.r21, 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(c.r22, 0.25, epsilon = 1e-14);
    assert_abs_diff_eq!(c.r23, 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(c.r_n, 32.0 - 1.0 / 24.0 + 0.25, epsilon = 1e-12);
    assert_eq!(c.support_length, 1);
}

#[test]
fn constants_constant_driving() {
    let c = compute_constants(&driving_constant(0.7), 16).unwrap();
    assert_abs_diff_eq!(c.r21, -0.35, epsilon = 1e-14);
    assert_abs_diff_eq!(c.r22, 0.0, epsilon = 1e-14);
    assert_abs_diff_eq!(c.r23, -0.35, epsilon = 1e-14);
}

#[test]
fn constants_reject_odd_ring() {
    assert!(compute_constants(&driving_zero(), 7).is_err());
}

#[test]
fn shifted_flux_for_left_neighbour() {
    let fs = build_flux_terms(&driving_left_neighbour()).unwrap();
    let oracle = |s: &[i8]| 0.5 * s[0] as f64 * (1.0 - (s[1] * s[2]) as f64);
    for idx in 0..64usize {
        let spins: Vec<i8> = (0..6).map(|i| if idx >> i & 1 == 1 { 1 } else { -1 }).collect();
        // spins[i] is the spin at site i − 3
        let v = fs.q_tilde.eval_with(|x| spins[(x + 3) as usize]);
        assert_abs_diff_eq!(v, oracle(&spins[0..3]), epsilon = 1e-15);
    }
    let p = product_expectation_poly(&fs.q_bar);
    assert_abs_diff_eq!(p.coeff(0), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.coeff(1), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(p.coeff(2), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(fs.s.mean_uniform(), 0.0, epsilon = 1e-12);
    assert_abs_diff_eq!(fs.g.mean_uniform(), 0.0, epsilon = 1e-12);
}

#[test]
fn zero_driving_flux_terms_vanish() {
    let fs = build_flux_terms(&driving_zero()).unwrap();
    for f in [&fs.q_bar, &fs.s, &fs.g] {
        assert_eq!(f.sup_norm(), 0.0);
    }
}

#[test]
fn canonical_pair_small_case() {
    let f = LocalFunction::product(&[0, 2]);
    assert_abs_diff_eq!(canonical_expectation(&f, 4, 2).unwrap(), -1.0 / 3.0, epsilon = 1e-14);
}

#[test]
fn canonical_rejects_oversized_support() {
    let f = LocalFunction::product(&[0, 5]);
    assert!(canonical_expectation(&f, 4, 2).is_err());
    assert!(canonical_expectation(&LocalFunction::site(0), 4, 5).is_err());
}

#[test]
fn canonical_block_pair() {
    let eta = SpinConfig::from_spins(&[-1, 1, -1, 1, 1, -1]).unwrap();
    // block {4, 5} is (+, −)
    let f = LocalFunction::product(&[-1, 0]);
    assert_abs_diff_eq!(canonical_block_expectation(&eta, 5, 2, &f).unwrap(), -1.0, epsilon = 1e-15);
}

#[test]
fn pair_correlation_and_total_expectation() {
    for len in 2..=10usize {
        for k in 0..=len {
            let s = canonical_density(len, k);
            let v = canonical_expectation(&LocalFunction::product(&[0, 1]), len, k).unwrap();
            assert_abs_diff_eq!(v, s * s - (1.0 - s * s) / (len as f64 - 1.0), epsilon = 1e-12);
        }
    }
}

#[test]
fn multiscale_telescopes() {
    let n = 64;
    let mut rng = kpzlab::rng::stream(1, 0, kpzlab::rng::Role::Sampling);
    let eta = SpinConfig::random_with_count(n, n / 2, &mut rng).unwrap();
    let f = LocalFunction::product(&[-1, 0]);
    let terms = multiscale_terms(&eta, 10, &f, 0.25, 3).unwrap();
    assert_eq!(terms.scales, vec![3, 8, 23]);
    let total: f64 = terms.terms.iter().sum::<f64>() + terms.tail;
    assert_abs_diff_eq!(total, terms.value, epsilon = 1e-12);
}

#[test]
fn json_round_trip() {
    let d = driving_left_neighbour();
    let text = d.to_json_string().unwrap();
    let back = LocalFunction::from_json_str(&text).unwrap();
    assert_eq!(back.table(), d.table());
    assert!(LocalFunction::from_json_str(r#"{"radius": 1, "table": [1, 2]}"#).is_err());
}

fn small_function() -> impl Strategy<Value = LocalFunction> {
    (-2i64..=1, 1usize..=4).prop_flat_map(|(lo, len)| {
        prop::collection::vec(-2.0f64..2.0, 1 << len).prop_map(move |t| LocalFunction::new(lo, len, t).unwrap())
    })
}

proptest! {
    #[test]
    fn poly_matches_brute_force(f in small_function(), sigma in -1.0f64..1.0) {
        let p = product_expectation_poly(&f);
        prop_assert!((p.eval(sigma) - brute_poly(&f, sigma)).abs() < 1e-12);
        prop_assert!((product_expectation(&f, sigma) - brute_poly(&f, sigma)).abs() < 1e-12);
    }

    #[test]
    fn poly_is_linear(f in small_function(), g in small_function(), a in -3.0f64..3.0) {
        let h = f.scale(a).add(&g).unwrap();
        let (pf, pg, ph) = (product_expectation_poly(&f), product_expectation_poly(&g), product_expectation_poly(&h));
        for s in [-0.7, 0.0, 0.3, 1.0] {
            prop_assert!((ph.eval(s) - a * pf.eval(s) - pg.eval(s)).abs() < 1e-12);
        }
    }

    #[test]
    fn total_expectation(f in small_function(), extra in 0usize..5, sigma in -0.9f64..0.9) {
        let len = f.len() + extra;
        let g = f.shifted(-(f.lo() + f.len() as i64 - 1));
        let p = 0.5 * (1.0 + sigma);
        let mut total = 0.0;
        let mut binom = 1.0f64;
        for k in 0..=len {
            if k > 0 { binom *= (len - k + 1) as f64 / k as f64; }
            let w = binom * p.powi(k as i32) * (1.0 - p).powi((len - k) as i32);
            total += w * canonical_expectation(&g, len, k).unwrap();
        }
        prop_assert!((total - product_expectation(&g, sigma)).abs() < 1e-10);
    }

    #[test]
    fn qbar_centering(table in prop::collection::vec(-1.0f64..1.0, 8)) {
        let d = LocalFunction::driving(1, table).unwrap();
        let fs = build_flux_terms(&d).unwrap();
        let p = product_expectation_poly(&fs.q_bar);
        prop_assert!(p.coeff(0).abs() < 1e-12 && p.coeff(1).abs() < 1e-12);
        let (d2, _) = adjust_driving(&d).unwrap();
        let p2 = product_expectation_poly(&build_flux_terms(&d2).unwrap().q_bar);
        prop_assert!(p2.coeff(2).abs() < 1e-12);
    }

    #[test]
    fn spin_packing_round_trip(spins in prop::collection::vec(prop::bool::ANY, 1..200)) {
        let s: Vec<i8> = spins.iter().map(|&b| if b { 1 } else { -1 }).collect();
        let cfg = SpinConfig::from_spins(&s).unwrap();
        prop_assert_eq!(cfg.plus_count(), spins.iter().filter(|b| **b).count());
        let back = SpinConfig::from_packed_bytes(s.len(), &cfg.packed_bytes()).unwrap();
        prop_assert_eq!(back, cfg);
    }
}

#[test]
fn canonical_decay_of_qbar() {
    let fs = build_flux_terms(&driving_left_neighbour()).unwrap();
    let d = canonical_decay(&fs.q_bar, &[8, 16, 32, 64]).unwrap();
    assert!(d.maxima.windows(2).all(|w| w[1] < w[0]));
    assert!((d.slope + 1.5).abs() <= 0.25, "slope {}", d.slope);
}

#[test]
fn multiscale_terms_are_centred() {
    let fs = build_flux_terms(&driving_left_neighbour()).unwrap();
    let c = centering_check(&fs.q_bar, &[4, 6], 8).unwrap();
    assert!(c.max_mean <= 1e-12 && c.max_telescoping <= 1e-12);
    assert!(centering_check(&fs.q_bar, &[3, 6], 8).is_err());
    assert!(centering_check(&fs.q_bar, &[6, 4], 8).is_err());
}
