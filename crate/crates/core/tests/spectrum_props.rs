mod common;

use common::*;
use fas_core::correlation::{build_correlation, energy_ratio, log_det, ApertureGeometry, LogDet};
use fas_core::rank::{effective_ranks, entropy_rank, knee_of_segment, turn_cosines};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn spec(n: usize, w: f64) -> fas_core::correlation::CorrelationSpectrum {
    build_correlation(&ApertureGeometry::new(n, w).unwrap()).unwrap()
}

#[test]
fn two_port_closed_forms() {
    let rho = j0_series_oracle(PI);
    let s = spec(2, 0.5);
    assert!((s.matrix()[(0, 1)] - rho).abs() < 1e-14);
    assert!((s.eigenvalues()[0] - (1.0 + rho.abs())).abs() < 1e-13);
    assert!((s.eigenvalues()[1] - (1.0 - rho.abs())).abs() < 1e-13);
    match log_det(&s, None).unwrap() {
        LogDet::Finite(v) => assert!((v - (1.0 - rho * rho).ln()).abs() < 1e-12),
        LogDet::Singular => panic!("two-port spectrum is regular"),
    }
}

#[test]
fn matrix_entries_follow_the_series_oracle() {
    let (n, w) = (17, 3.3);
    let s = spec(n, w);
    for i in 0..n {
        for j in 0..n {
            let arg = 2.0 * PI * w * i.abs_diff(j) as f64 / (n - 1) as f64;
            assert!((s.matrix()[(i, j)] - j0_series_oracle(arg)).abs() < 1e-10);
        }
    }
}

#[test]
fn wide_aperture_energy_and_rank() {
    for &w in &[0.5, 1.0, 2.0, 4.0, 6.0, 8.0] {
        let r = effective_ranks(&spec(100, w));
        assert!(r.energy_at_n_eff1.unwrap() >= 0.978, "W = {w}");
    }
    let big = spec(200, 4.0);
    let e = entropy_rank(big.eigenvalues()).unwrap();
    eprintln!("entropy rank at N = 200, W = 4: {e}");
    assert!((e - 9.0).abs() <= 1.0);
}

#[test]
fn n_eff1_is_nondecreasing_in_width() {
    let mut last = 0;
    for &w in &[0.5, 1.0, 2.0, 4.0, 6.0, 8.0] {
        let k = effective_ranks(&spec(100, w)).n_eff1.unwrap();
        assert!(k >= last);
        last = k;
    }
}

#[test]
fn energy_ratio_matches_direct_sum() {
    let s = spec(60, 2.5);
    let total: f64 = s.eigenvalues().iter().sum();
    for k in [1, 5, 6, 30, 60] {
        let direct: f64 = s.eigenvalues()[..k].iter().sum::<f64>() / total;
        assert!((energy_ratio(&s, k).unwrap() - direct).abs() < 1e-14);
    }
}

/// Random descending spectra: a few clean decades, a knee, then a steep drop.
fn synthetic_spectrum(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let len = rng.random_range(3..60);
    let knee = rng.random_range(1..len - 1);
    let slow = rng.random_range(0.01..0.3);
    let fast = rng.random_range(0.5..4.0);
    let mut log = 0.0;
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        out.push(10f64.powf(log));
        log -= if i < knee { slow } else { fast } * rng.random_range(0.5..1.5);
    }
    out
}

#[test]
fn knee_detection_matches_brute_force_on_random_spectra() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for case in 0..100 {
        let lambda = synthetic_spectrum(&mut rng);
        let points: Vec<(f64, f64)> =
            lambda.iter().enumerate().map(|(i, l)| ((i + 1) as f64, l.log10())).collect();
        let got = knee_of_segment(&points).unwrap();
        assert_eq!(got, brute_force_knee(&points), "case {case}");
        assert_eq!(got, knee_of_segment(&points).unwrap(), "case {case}: not deterministic");

        // Every c_i agrees with a direct recomputation.
        let cos = turn_cosines(&points);
        assert_eq!(cos.len(), points.len() - 2);
        let best = cos.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(cos[got - 1], best);
        assert!(cos[..got - 1].iter().all(|&c| c < best));
    }
}

#[test]
fn two_slope_spectrum_knee() {
    let lambda: Vec<f64> = (1..=20)
        .map(|i| if i <= 10 { 10f64.powf(-0.1 * i as f64) } else { 10f64.powf(-1.0 - 2.0 * (i - 10) as f64) })
        .collect();
    let points: Vec<(f64, f64)> = lambda.iter().enumerate().map(|(i, l)| ((i + 1) as f64, l.log10())).collect();
    let local = knee_of_segment(&points).unwrap();
    assert_eq!(local, brute_force_knee(&points));
    assert_eq!(local + 1, 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn spectrum_invariants(n in 1usize..=200, w in 0.05f64..16.0) {
        let s = spec(n, w);
        let lambda = s.eigenvalues();
        prop_assert!(lambda.iter().all(|&l| l >= 0.0));
        prop_assert!(lambda.windows(2).all(|p| p[0] >= p[1]));
        let trace: f64 = lambda.iter().sum();
        prop_assert!((trace - n as f64).abs() <= 1e-8 * n as f64);
        let diff = (s.reconstruct() - s.matrix()).abs().max();
        prop_assert!(diff <= 1e-8, "reconstruction error {diff:e}");
        if let LogDet::Finite(v) = log_det(&s, None).unwrap() {
            prop_assert!(v <= 1e-12);
        }
        // Orthonormal eigenvectors.
        let u = s.eigenvectors();
        let gram = u.transpose() * u;
        let eye = nalgebra::DMatrix::<f64>::identity(n, n);
        prop_assert!((gram - eye).abs().max() <= 1e-10);
    }

    #[test]
    fn rank_report_is_deterministic_and_ordered(n in 3usize..=150, w in 0.1f64..12.0) {
        let s = spec(n, w);
        let a = effective_ranks(&s);
        let b = effective_ranks(&s);
        prop_assert_eq!(&a, &b);
        let ks: Vec<usize> = [a.n_eff1, a.n_eff2, a.n_eff3].into_iter().flatten().collect();
        prop_assert!(ks.windows(2).all(|p| p[0] <= p[1]));
        prop_assert!(ks.iter().all(|&k| k >= 1 && k <= n));
        prop_assert!(a.entropy_rank >= 1.0 - 1e-12);
        prop_assert!(a.entropy_rank <= s.positive_count() as f64 + 1e-9);
    }
}
