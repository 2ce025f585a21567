mod common;

use std::f64::consts::{PI, TAU};

use common::*;
use hhscaling::emd::{decompose, EmdConfig};
use hhscaling::hilbert::{hilbert_transform, spectral_track, spectral_track_of};
use proptest::prelude::*;

/// Direct convolution with the discrete Hilbert kernel of the
/// analytic-signal method, `g[j] = (2/N) Σ_{k=1}^{K} sin(2πkj/N)`, where
/// `K` is the last strictly positive frequency bin.
fn kernel_oracle(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let k_max = n.div_ceil(2) - 1;
    let g: Vec<f64> = (0..n)
        .map(|j| {
            (1..=k_max)
                .map(|k| (TAU * (k * j) as f64 / n as f64).sin())
                .sum::<f64>()
                * 2.0
                / n as f64
        })
        .collect();
    (0..n)
        .map(|i| (0..n).map(|m| x[m] * g[(i + n - m) % n]).sum())
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn fft_matches_kernel_sum(x in prop::collection::vec(-10.0f64..10.0, 4..=64)) {
        let fast = hilbert_transform(&x).unwrap();
        let slow = kernel_oracle(&x);
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
    }

    #[test]
    fn spectral_track_invariants(seed in any::<u64>(), len in 32usize..1500, trim in 0.0f64..0.3) {
        let d = decompose(&series(white_noise(len, seed)), &EmdConfig::default()).unwrap();
        prop_assume!(d.n_imfs() > 0);
        let track = spectral_track(&d, trim).unwrap();
        let margin = (trim * len as f64).floor() as usize;
        for k in 0..track.n_imfs() {
            for t in 0..len {
                prop_assert!(track.amplitudes[k][t] >= 0.0);
                let expect = track.frequencies[k][t] > 0.0 && t >= margin && t + margin < len;
                prop_assert_eq!(track.validity[k][t], expect);
                prop_assert_eq!(track.periods[k][t].is_nan(), !expect);
            }
            for w in track.phases[k].windows(2) {
                prop_assert!((w[1] - w[0]).abs() <= PI + 1e-12);
            }
        }
    }
}

#[test]
fn cosine_to_sine_on_interior() {
    let n = 1024;
    let h = hilbert_transform(&tone(n, 64.0, 0.0)).unwrap();
    let edge = n / 20;
    for t in edge..n - edge {
        assert!((h[t] - (TAU * t as f64 / 64.0).sin()).abs() < 1e-6);
    }
}

#[test]
fn white_noise_frequencies_ordered() {
    for seed in 0..50 {
        let d = decompose(&series(white_noise(4000, seed)), &EmdConfig::default()).unwrap();
        let track = spectral_track(&d, 0.0).unwrap();
        let means: Vec<f64> = (0..track.n_imfs())
            .map(|k| {
                let valid: Vec<f64> = (0..track.len())
                    .filter(|&t| track.validity[k][t])
                    .map(|t| track.frequencies[k][t])
                    .collect();
                mean(&valid)
            })
            .collect();
        for w in means.windows(2) {
            assert!(w[0] > w[1], "seed {seed}: {means:?}");
        }
    }
}

#[test]
fn amplitude_follows_circular_shift() {
    let n = 1024;
    let base: Vec<f64> = (0..n)
        .map(|t| (1.0 + 0.4 * (TAU * t as f64 / 512.0).cos()) * (TAU * t as f64 / 32.0).cos())
        .collect();
    let shift = 100;
    let shifted: Vec<f64> = (0..n).map(|t| base[(t + n - shift) % n]).collect();
    let a = spectral_track_of(&[base], 0.0).unwrap();
    let b = spectral_track_of(&[shifted], 0.0).unwrap();
    let edge = n / 20;
    for t in edge + shift..n - edge {
        assert!((a.amplitudes[0][t - shift] - b.amplitudes[0][t]).abs() < 1e-9);
    }
}

#[test]
fn tone_energy_matches_power() {
    let n = 2048;
    for amp in [0.5, 1.0, 3.0] {
        let x: Vec<f64> = tone(n, 64.0, 0.2).iter().map(|v| amp * v).collect();
        let track = spectral_track_of(std::slice::from_ref(&x), 0.0).unwrap();
        let edge = n / 20;
        let a2: Vec<f64> = track.amplitudes[0][edge..n - edge].iter().map(|a| a * a).collect();
        let c2: Vec<f64> = x[edge..n - edge].iter().map(|v| v * v).collect();
        assert!((0.5 * mean(&a2) / (0.5 * amp * amp) - 1.0).abs() < 0.01);
        assert!((0.5 * mean(&a2) / mean(&c2) - 1.0).abs() < 0.01);
    }
}
