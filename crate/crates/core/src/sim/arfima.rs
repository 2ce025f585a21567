//! ARFIMA(0,d,0) by a truncated moving-average filter applied with FFT
//! convolution.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use super::{check_d, check_length, cumulative_sum, path_rng};
use crate::error::Result;
use crate::series::TimeSeries;

/// Truncation length of the MA(∞) kernel relative to the output length.
pub const TRUNCATION_FACTOR: usize = 10;

/// `ψ_0..=ψ_J` of `(1 − B)^{−d}`: `ψ_0 = 1`, `ψ_j = ψ_{j−1} (j − 1 + d) / j`.
pub fn arfima_weights(d: f64, j_max: usize) -> Vec<f64> {
    let mut psi = Vec::with_capacity(j_max + 1);
    psi.push(1.0);
    for j in 1..=j_max {
        let prev = psi[j - 1];
        psi.push(prev * (j as f64 - 1.0 + d) / j as f64);
    }
    psi
}

/// Fractional-noise sampler for a fixed `(d, T)`.
pub struct ArfimaGenerator {
    n: usize,
    truncation: usize,
    kernel_spectrum: Vec<Complex<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl ArfimaGenerator {
    pub fn new(d: f64, n: usize) -> Result<Self> {
        check_d(d)?;
        check_length(n, 2)?;
        let truncation = TRUNCATION_FACTOR * n;
        // Outputs J..J+T of a circular convolution of this size never wrap.
        let size = n + truncation;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(size);
        let inverse = planner.plan_fft_inverse(size);
        let mut kernel_spectrum: Vec<Complex<f64>> = arfima_weights(d, truncation)
            .into_iter()
            .map(|w| Complex::new(w, 0.0))
            .collect();
        kernel_spectrum.resize(size, Complex::new(0.0, 0.0));
        forward.process(&mut kernel_spectrum);
        Ok(Self {
            n,
            truncation,
            kernel_spectrum,
            forward,
            inverse,
        })
    }

    /// `T` samples of `x_t = Σ_{j=0}^{J} ψ_j ε_{t−j}` with Gaussian `ε`.
    pub fn sample_noise<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let size = self.kernel_spectrum.len();
        let mut buf: Vec<Complex<f64>> = (0..size)
            .map(|_| Complex::new(StandardNormal.sample(rng), 0.0))
            .collect();
        self.forward.process(&mut buf);
        for (z, k) in buf.iter_mut().zip(&self.kernel_spectrum) {
            *z *= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / size as f64;
        buf[self.truncation..self.truncation + self.n]
            .iter()
            .map(|z| z.re * scale)
            .collect()
    }
}

/// Integrated ARFIMA(0,d,0) path of `length` samples.
pub fn simulate_arfima(d: f64, length: usize, seed: u64) -> Result<TimeSeries> {
    check_length(length, 64)?;
    let g = ArfimaGenerator::new(d, length)?;
    TimeSeries::from_values(cumulative_sum(&g.sample_noise(&mut path_rng(seed, 0))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_recursion() {
        let psi = arfima_weights(0.3, 2);
        assert!((psi[1] - 0.3).abs() < 1e-15);
        assert!((psi[2] - 0.195).abs() < 1e-15);
        assert!(arfima_weights(0.0, 10)[1..].iter().all(|&w| w == 0.0));
    }

    #[test]
    fn weights_match_gamma_ratio() {
        // ψ_j = Γ(j + d) / (Γ(j + 1) Γ(d)) via log-gamma by Stirling series.
        fn ln_gamma(x: f64) -> f64 {
            // Shift up then Stirling; accurate to ~1e-12 for x > 0.
            let mut x = x;
            let mut acc = 0.0;
            while x < 10.0 {
                acc -= x.ln();
                x += 1.0;
            }
            acc + (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
                - 1.0 / (360.0 * x.powi(3))
                + 1.0 / (1260.0 * x.powi(5))
        }
        let d = 0.35;
        let psi = arfima_weights(d, 200);
        for j in [1usize, 5, 50, 200] {
            let want = (ln_gamma(j as f64 + d) - ln_gamma(j as f64 + 1.0) - ln_gamma(d)).exp();
            assert!((psi[j] / want - 1.0).abs() < 1e-9, "j={j}");
        }
    }

    #[test]
    fn fft_convolution_matches_direct_sum() {
        let d = 0.25;
        let n = 64;
        let g = ArfimaGenerator::new(d, n).unwrap();
        let mut rng = path_rng(2, 0);
        let x = g.sample_noise(&mut rng);
        let mut rng = path_rng(2, 0);
        let eps: Vec<f64> = (0..n + g.truncation).map(|_| StandardNormal.sample(&mut rng)).collect();
        let psi = arfima_weights(d, g.truncation);
        for t in 0..n {
            let idx = g.truncation + t;
            let direct: f64 = (0..=g.truncation).map(|j| psi[j] * eps[idx - j]).sum();
            assert!((x[t] - direct).abs() < 1e-9);
        }
    }

    #[test]
    fn white_noise_when_d_is_zero() {
        let g = ArfimaGenerator::new(0.0, 5000).unwrap();
        let x = g.sample_noise(&mut path_rng(8, 0));
        let var = x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64;
        assert!((var - 1.0).abs() < 0.08);
        let r1 = x.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (x.len() as f64 * var);
        assert!(r1.abs() < 3.0 / (x.len() as f64).sqrt());
    }
}
