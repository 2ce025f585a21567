mod common;

use std::f64::consts::TAU;

use approx::assert_abs_diff_eq;
use common::*;
use hhscaling::emd::{decompose, EmdConfig};
use hhscaling::hilbert::{spectral_track, SpectralTrack};
use hhscaling::scaling::{
    amplitude_distribution, complexity, measure_correlation, rolling_scaling_exponent, scaling_exponent,
    AmplitudeWeight, ComplexityTrack, ScalingTrack,
};
use hhscaling::sim::{path_rng, simulate_fbm};
use hhscaling::stats::nan_mean;
use proptest::prelude::*;
use rand_distr::{Distribution, Normal};

fn track_of(x: Vec<f64>) -> SpectralTrack {
    let d = decompose(&series(x), &EmdConfig::default()).unwrap();
    spectral_track(&d, 0.0).unwrap()
}

fn same_or_both_nan(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        if x.is_nan() || y.is_nan() {
            assert!(x.is_nan() && y.is_nan(), "{x} vs {y}");
        } else {
            assert_abs_diff_eq!(x, y, epsilon = tol);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn distribution_sums_to_one_and_entropy_bounded(seed in any::<u64>(), len in 200usize..3000, h in 0.2f64..0.9) {
        let inputs = [white_noise(len, seed), simulate_fbm(h, len.max(64), seed).unwrap().into_values()];
        for x in inputs {
            let track = track_of(x);
            prop_assume!(track.n_imfs() >= 2);
            for weight in [AmplitudeWeight::Squared, AmplitudeWeight::Linear] {
                for t in 0..track.len() {
                    if let Some(p) = amplitude_distribution(&track, t, weight) {
                        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                    }
                }
                let c = complexity(&track, weight).unwrap();
                let bound = (track.n_imfs() as f64).ln();
                prop_assert!(c.c_star.iter().filter(|v| !v.is_nan()).all(|&v| (0.0..=bound).contains(&v)));
            }
        }
    }
}

#[test]
fn entropy_extremes() {
    for n in [2usize, 5, 13] {
        let freq = vec![vec![0.1; 50]; n];
        let uniform = SpectralTrack::from_parts(vec![vec![2.5; 50]; n], freq.clone(), 0.0).unwrap();
        let c = complexity(&uniform, AmplitudeWeight::Squared).unwrap();
        assert!(c.c_star.iter().all(|v| (v - (n as f64).ln()).abs() < 1e-12));

        let mut amps = vec![vec![0.0; 50]; n];
        amps[n / 2] = vec![1.7; 50];
        let single = SpectralTrack::from_parts(amps, freq, 0.0).unwrap();
        let c = complexity(&single, AmplitudeWeight::Squared).unwrap();
        assert!(c.c_star.iter().all(|&v| v == 0.0));
    }
}

#[test]
fn measures_invariant_under_rescaling() {
    let inputs = [
        white_noise(3000, 5),
        simulate_fbm(0.7, 4000, 2).unwrap().into_values(),
        (0..2048)
            .map(|t| (TAU * t as f64 / 16.0).sin() + 0.5 * (TAU * t as f64 / 200.0).cos())
            .collect(),
    ];
    for x in inputs {
        let scaled: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let (a, b) = (track_of(x), track_of(scaled));
        assert_eq!(a.n_imfs(), b.n_imfs());
        let (ha, hb) = (scaling_exponent(&a).unwrap(), scaling_exponent(&b).unwrap());
        same_or_both_nan(&ha.h_star, &hb.h_star, 1e-9);
        let (ca, cb) = (
            complexity(&a, AmplitudeWeight::Squared).unwrap(),
            complexity(&b, AmplitudeWeight::Squared).unwrap(),
        );
        same_or_both_nan(&ca.c_star, &cb.c_star, 1e-9);
    }
}

#[test]
fn noisy_power_law_recovered() {
    let (n, len, h, sigma) = (7usize, 2000usize, 0.65, 0.05);
    let periods: Vec<f64> = (0..n).map(|k| 3.0 * 2f64.powi(k as i32)).collect();
    let mut rng = path_rng(99, 0);
    let noise = Normal::new(0.0, sigma).unwrap();
    let mut amps = vec![Vec::with_capacity(len); n];
    for _ in 0..len {
        for k in 0..n {
            amps[k].push((h * periods[k].ln() + noise.sample(&mut rng)).exp());
        }
    }
    let freq: Vec<Vec<f64>> = periods.iter().map(|p| vec![TAU / p; len]).collect();
    let s = scaling_exponent(&SpectralTrack::from_parts(amps, freq, 0.0).unwrap()).unwrap();

    let x: Vec<f64> = periods.iter().map(|p| p.ln()).collect();
    let xm = mean(&x);
    let se = sigma / x.iter().map(|v| (v - xm).powi(2)).sum::<f64>().sqrt();
    let within = s.h_star.iter().filter(|v| (*v - h).abs() < 3.0 * se).count();
    assert!(within as f64 >= 0.99 * len as f64, "{within} of {len}");
    assert!((s.grand_mean - h).abs() < 3.0 * se / (len as f64).sqrt());
    assert!(s.points_used.iter().all(|&p| p == n));
}

#[test]
fn independent_tracks_uncorrelated() {
    for seed in 0..50 {
        let a = white_noise(10_000, 2 * seed);
        let b = white_noise(10_000, 2 * seed + 1);
        let s = ScalingTrack {
            grand_mean: nan_mean(&a),
            grand_std: 1.0,
            points_used: vec![3; a.len()],
            r_squared: vec![1.0; a.len()],
            h_star: a,
        };
        let c = ComplexityTrack { c_star: b, n_imfs: 4 };
        assert!(measure_correlation(&s, &c).unwrap().abs() < 0.05);
    }
}

#[test]
fn measured_tracks_length_and_bounds() {
    let track = track_of(simulate_fbm(0.6, 3000, 8).unwrap().into_values());
    let s = scaling_exponent(&track).unwrap();
    for t in 0..s.len() {
        if s.h_star[t].is_nan() {
            continue;
        }
        assert!(s.points_used[t] >= 3);
        assert!((0.0..=1.0).contains(&s.r_squared[t]));
    }
    let r = rolling_scaling_exponent(&track, 300).unwrap();
    assert!(r.h_star[..299].iter().all(|v| v.is_nan()));
    assert!(r.h_star[299..].iter().all(|v| !v.is_nan()));
}
