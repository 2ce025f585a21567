//! Monte-Carlo ensembles: simulate, decompose, track, regress, aggregate.

use rayon::prelude::*;

use super::SimConfig;
use crate::emd::{decompose, EmdConfig};
use crate::error::{Error, Result};
use crate::hilbert::spectral_track;
use crate::scaling::{generalized_hurst_q1, scaling_exponent};
use crate::stats::{nan_mean, nan_std, CompensatedSum};

/// Paths evaluated concurrently before each ordered reduction step.
const BATCH: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleOptions {
    pub emd: EmdConfig,
    pub trim_fraction: f64,
    /// Largest lag of the GHE fit.
    pub tau_max: usize,
}

impl Default for EnsembleOptions {
    fn default() -> Self {
        Self {
            emd: EmdConfig::default(),
            trim_fraction: 0.0,
            tau_max: 19,
        }
    }
}

/// Aggregates over paths and time.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub paths: usize,
    /// `⟨H*(t)⟩`, the per-time mean over paths.
    pub mean_h_by_time: Vec<f64>,
    /// `⟨⟨H*⟩⟩`, the time average of `⟨H*(t)⟩`.
    pub grand_mean_h: f64,
    /// Standard deviation of `H*_i(t)` about `⟨⟨H*⟩⟩` over all `(t, i)`.
    pub std_h: f64,
    /// `⟨⟨R²⟩⟩`.
    pub grand_mean_r2: f64,
    pub ghe_mean: f64,
    pub ghe_std: f64,
}

struct PathResult {
    h_star: Vec<f64>,
    r_squared: Vec<f64>,
    ghe: f64,
}

fn evaluate_path(cfg: &SimConfig, sampler: &super::Sampler, opts: &EnsembleOptions, index: u64) -> Result<PathResult> {
    let path = sampler.path(index)?;
    let decomposition = decompose(&path, &opts.emd)?;
    let track = spectral_track(&decomposition, opts.trim_fraction)?;
    let scaling = scaling_exponent(&track)?;
    let ghe = generalized_hurst_q1(&path, opts.tau_max)?;
    debug_assert_eq!(scaling.len(), cfg.length);
    Ok(PathResult {
        h_star: scaling.h_star,
        r_squared: scaling.r_squared,
        ghe: ghe.h,
    })
}

/// Runs `paths` independent realisations of `cfg` through the full pipeline.
///
/// Paths are evaluated in parallel on the current rayon pool and reduced in
/// path order, so results do not depend on the number of threads.
pub fn monte_carlo_ensemble(cfg: &SimConfig, paths: usize, opts: &EnsembleOptions) -> Result<EnsembleStats> {
    if paths == 0 {
        return Err(Error::InvalidParameter("ensemble needs at least one path".into()));
    }
    let sampler = cfg.sampler()?;
    let len = cfg.length;
    let mut sum_h = vec![CompensatedSum::new(); len];
    let mut sum_h2 = vec![CompensatedSum::new(); len];
    let mut count_h = vec![0usize; len];
    let mut sum_r2 = vec![CompensatedSum::new(); len];
    let mut count_r2 = vec![0usize; len];
    let mut ghe = Vec::with_capacity(paths);

    for start in (0..paths).step_by(BATCH) {
        let end = (start + BATCH).min(paths);
        let batch: Vec<PathResult> = (start..end)
            .into_par_iter()
            .map(|i| evaluate_path(cfg, &sampler, opts, i as u64))
            .collect::<Result<_>>()?;
        for r in batch {
            for t in 0..len {
                let h = r.h_star[t];
                if !h.is_nan() {
                    sum_h[t].add(h);
                    sum_h2[t].add(h * h);
                    count_h[t] += 1;
                }
                let q = r.r_squared[t];
                if !q.is_nan() {
                    sum_r2[t].add(q);
                    count_r2[t] += 1;
                }
            }
            ghe.push(r.ghe);
        }
    }

    let per_time_mean = |sums: &[CompensatedSum], counts: &[usize]| -> Vec<f64> {
        sums.iter()
            .zip(counts)
            .map(|(s, &c)| if c == 0 { f64::NAN } else { s.value() / c as f64 })
            .collect()
    };
    let mean_h_by_time = per_time_mean(&sum_h, &count_h);
    let grand_mean_h = nan_mean(&mean_h_by_time);
    let grand_mean_r2 = nan_mean(&per_time_mean(&sum_r2, &count_r2));

    let mut ss = CompensatedSum::new();
    let mut total = 0usize;
    for t in 0..len {
        let c = count_h[t] as f64;
        ss.add(sum_h2[t].value() - 2.0 * grand_mean_h * sum_h[t].value() + c * grand_mean_h * grand_mean_h);
        total += count_h[t];
    }
    let std_h = if total > 1 {
        (ss.value().max(0.0) / (total - 1) as f64).sqrt()
    } else {
        f64::NAN
    };

    Ok(EnsembleStats {
        paths,
        mean_h_by_time,
        grand_mean_h,
        std_h,
        grand_mean_r2,
        ghe_mean: nan_mean(&ghe),
        ghe_std: if ghe.len() > 1 { nan_std(&ghe) } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Process;

    #[test]
    fn single_path_ensemble_equals_path() {
        let cfg = SimConfig::new(Process::Fbm { h: 0.6 }, 2048, 17);
        let opts = EnsembleOptions::default();
        let stats = monte_carlo_ensemble(&cfg, 1, &opts).unwrap();
        let path = cfg.sampler().unwrap().path(0).unwrap();
        let track = spectral_track(&decompose(&path, &opts.emd).unwrap(), 0.0).unwrap();
        let single = scaling_exponent(&track).unwrap();
        for (a, b) in stats.mean_h_by_time.iter().zip(&single.h_star) {
            assert!(a == b || (a.is_nan() && b.is_nan()));
        }
        assert!((stats.grand_mean_h - single.grand_mean).abs() < 1e-12);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SimConfig::new(Process::Arfima { d: 0.1 }, 1024, 5);
        let opts = EnsembleOptions::default();
        let a = monte_carlo_ensemble(&cfg, 6, &opts).unwrap();
        let b = monte_carlo_ensemble(&cfg, 6, &opts).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_ensemble(&cfg, 0, &opts).is_err());
    }
}
