//! Reference stochastic processes: Brownian motion, fractional Brownian
//! motion, symmetric α-stable Lévy motion and integrated ARFIMA(0,d,0).
//!
//! Every generator is a pure function of its parameters and a seed. Paths
//! of an ensemble share the seed and use the path index as the ChaCha
//! stream, so any path can be regenerated on its own.

mod arfima;
mod ensemble;
mod fbm;
mod stable;

pub use arfima::{arfima_weights, simulate_arfima, ArfimaGenerator};
pub use ensemble::{monte_carlo_ensemble, EnsembleOptions, EnsembleStats};
pub use fbm::{fgn_autocovariance, simulate_fbm, FbmGenerator};
pub use stable::{sample_symmetric_stable, simulate_slm};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Description of the random source, recorded in run metadata.
pub const RNG_DESCRIPTION: &str = "ChaCha8Rng::seed_from_u64(seed), stream = path index";

/// Stable-generator constants `(m, M)` whose product with `M + T` must be a
/// power of two.
pub const SLM_M_SMALL: u64 = 128;
pub const SLM_M_LARGE: u64 = 6000;
/// Path length that makes `128 * (6000 + T)` equal `2^21`.
pub const SLM_DEFAULT_LENGTH: usize = 10_384;

/// Random stream for one path.
pub fn path_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Running sum, `x_t = Σ_{s ≤ t} increments_s`.
pub fn cumulative_sum(increments: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    increments
        .iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Process {
    Bm,
    Fbm { h: f64 },
    Slm { alpha: f64 },
    Arfima { d: f64 },
}

impl Process {
    /// Self-similarity exponent the process is expected to exhibit.
    pub fn nominal_h(&self) -> f64 {
        match *self {
            Process::Bm => 0.5,
            Process::Fbm { h } => h,
            Process::Slm { alpha } => 1.0 / alpha,
            Process::Arfima { d } => d + 0.5,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Process::Bm => "bm",
            Process::Fbm { .. } => "fbm",
            Process::Slm { .. } => "slm",
            Process::Arfima { .. } => "arfima",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub process: Process,
    pub length: usize,
    pub seed: u64,
    /// `(m, M)` for the stable generator.
    pub slm_params: (u64, u64),
}

impl SimConfig {
    pub fn new(process: Process, length: usize, seed: u64) -> Self {
        Self {
            process,
            length,
            seed,
            slm_params: (SLM_M_SMALL, SLM_M_LARGE),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.process {
            Process::Bm => check_length(self.length, 2),
            Process::Fbm { h } => {
                check_open_unit("h", h)?;
                check_length(self.length, 64)
            }
            Process::Slm { alpha } => {
                check_alpha(alpha)?;
                check_slm_params(self.length, self.slm_params)
            }
            Process::Arfima { d } => {
                check_d(d)?;
                check_length(self.length, 64)
            }
        }
    }

    /// Prepares a sampler; expensive set-up (spectra, kernels) is shared by
    /// all paths.
    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        let kind = match self.process {
            Process::Bm => SamplerKind::Bm,
            Process::Fbm { h } => SamplerKind::Fbm(FbmGenerator::new(h, self.length)?),
            Process::Slm { alpha } => SamplerKind::Slm(alpha),
            Process::Arfima { d } => SamplerKind::Arfima(ArfimaGenerator::new(d, self.length)?),
        };
        Ok(Sampler {
            kind,
            length: self.length,
            seed: self.seed,
        })
    }
}

enum SamplerKind {
    Bm,
    Fbm(FbmGenerator),
    Slm(f64),
    Arfima(ArfimaGenerator),
}

/// A prepared generator for one [`SimConfig`].
pub struct Sampler {
    kind: SamplerKind,
    length: usize,
    seed: u64,
}

impl Sampler {
    /// Path number `index` of the ensemble.
    pub fn path(&self, index: u64) -> Result<TimeSeries> {
        let mut rng = path_rng(self.seed, index);
        let values = match &self.kind {
            SamplerKind::Bm => {
                let inc: Vec<f64> = (0..self.length).map(|_| StandardNormal.sample(&mut rng)).collect();
                cumulative_sum(&inc)
            }
            SamplerKind::Fbm(g) => cumulative_sum(&g.sample_increments(&mut rng)),
            SamplerKind::Slm(alpha) => {
                let inc: Vec<f64> = (0..self.length)
                    .map(|_| sample_symmetric_stable(*alpha, &mut rng))
                    .collect();
                cumulative_sum(&inc)
            }
            SamplerKind::Arfima(g) => cumulative_sum(&g.sample_noise(&mut rng)),
        };
        TimeSeries::from_values(values)
    }
}

/// Standard Brownian motion of `length` samples.
pub fn simulate_bm(length: usize, seed: u64) -> Result<TimeSeries> {
    SimConfig::new(Process::Bm, length, seed).sampler()?.path(0)
}

fn check_length(length: usize, min: usize) -> Result<()> {
    if length < min {
        return Err(Error::TooShort {
            needed: min,
            got: length,
        });
    }
    Ok(())
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::InvalidParameter(format!("{name} must be in (0, 1), got {v}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::InvalidParameter(format!("alpha must be in (0, 2], got {alpha}")));
    }
    Ok(())
}

fn check_d(d: f64) -> Result<()> {
    if !(d > -0.5 && d < 0.5) {
        return Err(Error::InvalidParameter(format!("d must be in (-0.5, 0.5), got {d}")));
    }
    Ok(())
}

fn check_slm_params(length: usize, (m, big_m): (u64, u64)) -> Result<()> {
    check_length(length, 2)?;
    let product = m.checked_mul(big_m + length as u64);
    match product {
        Some(p) if p.is_power_of_two() => Ok(()),
        _ => Err(Error::InvalidParameter(format!(
            "m * (M + T) = {m} * ({big_m} + {length}) is not a power of two"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slm_parameter_constraint() {
        assert!(check_slm_params(SLM_DEFAULT_LENGTH, (128, 6000)).is_ok());
        assert!(check_slm_params(10_000, (128, 6000)).is_err());
        assert_eq!(128 * (6000 + SLM_DEFAULT_LENGTH as u64), 1 << 21);
    }

    #[test]
    fn parameter_ranges() {
        assert!(SimConfig::new(Process::Fbm { h: 1.0 }, 100, 0).validate().is_err());
        assert!(SimConfig::new(Process::Fbm { h: 0.5 }, 10, 0).validate().is_err());
        assert!(SimConfig::new(Process::Slm { alpha: 2.1 }, SLM_DEFAULT_LENGTH, 0)
            .validate()
            .is_err());
        assert!(SimConfig::new(Process::Slm { alpha: 0.0 }, SLM_DEFAULT_LENGTH, 0)
            .validate()
            .is_err());
        assert!(SimConfig::new(Process::Arfima { d: 0.5 }, 100, 0).validate().is_err());
        assert!(SimConfig::new(Process::Arfima { d: -0.49 }, 100, 0).validate().is_ok());
    }

    #[test]
    fn paths_are_pure_functions_of_seed_and_index() {
        for process in [Process::Bm, Process::Fbm { h: 0.3 }, Process::Arfima { d: 0.2 }] {
            let s = SimConfig::new(process, 256, 42).sampler().unwrap();
            assert_eq!(s.path(3).unwrap(), s.path(3).unwrap());
            assert_ne!(s.path(3).unwrap(), s.path(4).unwrap());
        }
        let slm = SimConfig::new(Process::Slm { alpha: 1.5 }, SLM_DEFAULT_LENGTH, 42)
            .sampler()
            .unwrap();
        assert_eq!(slm.path(0).unwrap(), slm.path(0).unwrap());
    }

    #[test]
    fn nominal_exponents() {
        assert_eq!(Process::Slm { alpha: 1.25 }.nominal_h(), 0.8);
        assert!((Process::Arfima { d: 0.1 }.nominal_h() - 0.6).abs() < 1e-15);
    }
}
