//! Fractional Gaussian noise by circulant embedding of its covariance.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::{cumulative_sum, path_rng};
use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Autocovariance of unit-variance fGn at lag `k`:
/// `½(|k+1|^{2H} − 2|k|^{2H} + |k−1|^{2H})`.
pub fn fgn_autocovariance(h: f64, k: usize) -> f64 {
    let k = k as f64;
    let e = 2.0 * h;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// Exact fGn sampler for a fixed `(H, n)`.
pub struct FbmGenerator {
    n: usize,
    /// `sqrt(λ_k / 2N)` for the circulant eigenvalues `λ_k`.
    scale: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

impl FbmGenerator {
    pub fn new(h: f64, n: usize) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidParameter(format!("h must be in (0, 1), got {h}")));
        }
        if n < 2 {
            return Err(Error::TooShort { needed: 2, got: n });
        }
        let size = 2 * n;
        let mut row: Vec<Complex<f64>> = (0..=n).map(|k| Complex::new(fgn_autocovariance(h, k), 0.0)).collect();
        row.extend((1..n).rev().map(|k| Complex::new(fgn_autocovariance(h, k), 0.0)));
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);
        let peak = row.iter().fold(0.0f64, |m, z| m.max(z.re.abs()));
        let mut scale = Vec::with_capacity(size);
        for z in &row {
            if z.re < -1e-9 * peak {
                return Err(Error::Internal(format!(
                    "circulant embedding not positive semi-definite (eigenvalue {})",
                    z.re
                )));
            }
            scale.push((z.re.max(0.0) / size as f64).sqrt());
        }
        Ok(Self { n, scale, fft })
    }

    /// `n` fGn increments with unit variance.
    pub fn sample_increments<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut buf: Vec<Complex<f64>> = self
            .scale
            .iter()
            .map(|&s| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex::new(s * re, s * im)
            })
            .collect();
        self.fft.process(&mut buf);
        buf.truncate(self.n);
        buf.into_iter().map(|z| z.re).collect()
    }
}

/// One fBm path of `length` samples: the cumulative sum of exact fGn.
pub fn simulate_fbm(h: f64, length: usize, seed: u64) -> Result<TimeSeries> {
    if length < 64 {
        return Err(Error::TooShort {
            needed: 64,
            got: length,
        });
    }
    let g = FbmGenerator::new(h, length)?;
    TimeSeries::from_values(cumulative_sum(&g.sample_increments(&mut path_rng(seed, 0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Lag autocorrelation using the known zero mean of fGn.
    fn lag_autocorr(x: &[f64], lag: usize) -> f64 {
        let n = x.len();
        let c0: f64 = x.iter().map(|v| v * v).sum::<f64>() / n as f64;
        let ck: f64 = (0..n - lag).map(|t| x[t] * x[t + lag]).sum::<f64>() / (n - lag) as f64;
        ck / c0
    }

    #[test]
    fn autocovariance_values() {
        assert_eq!(fgn_autocovariance(0.7, 0), 1.0);
        assert!((fgn_autocovariance(0.7, 1) - (2f64.powf(0.4) - 1.0)).abs() < 1e-12);
        assert!(fgn_autocovariance(0.5, 3).abs() < 1e-12);
    }

    #[test]
    fn brownian_increments_uncorrelated() {
        let n = 10_000;
        let path = simulate_fbm(0.5, n, 11).unwrap();
        let inc: Vec<f64> = path.values().windows(2).map(|w| w[1] - w[0]).collect();
        assert!(lag_autocorr(&inc, 1).abs() < 3.0 / (n as f64).sqrt());
    }

    #[test]
    fn lag_one_correlation_matches_theory() {
        // Analytic ρ(1) = 2^{2H-1} - 1; ensemble of 50 paths of 4096.
        let h = 0.7;
        let want = 2f64.powf(2.0 * h - 1.0) - 1.0;
        assert!((want - 0.3195).abs() < 1e-4);
        let g = FbmGenerator::new(h, 4096).unwrap();
        let estimates: Vec<f64> = (0..50)
            .map(|i| lag_autocorr(&g.sample_increments(&mut path_rng(5, i)), 1))
            .collect();
        let mean = estimates.iter().sum::<f64>() / 50.0;
        let sd = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 49.0).sqrt();
        let se = sd / 50f64.sqrt();
        assert!((mean - want).abs() < 3.0 * se, "mean {mean} want {want} se {se}");
    }

    #[test]
    fn unit_variance_increments() {
        let g = FbmGenerator::new(0.3, 20_000).unwrap();
        let x = g.sample_increments(&mut path_rng(1, 0));
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!((var - 1.0).abs() < 0.05, "variance {var}");
    }
}
