//! Intraday segmentation of measure tracks: day × time-of-day panels,
//! day-averaged profiles, Brownian-motion percentile bands and the
//! outside-band likelihood.

use std::ops::Range;

use rayon::prelude::*;

use crate::emd::{decompose, EmdConfig};
use crate::error::{Error, Result};
use crate::hilbert::spectral_track;
use crate::scaling::{complexity, rolling_scaling_exponent, scaling_exponent, AmplitudeWeight};
use crate::series::{TimeSeries, TradingCalendar};
use crate::sim::{Process, SimConfig};
use crate::stats::{nan_mean, percentile_sorted};

pub const BAND_LOWER_PERCENTILE: f64 = 5.0;
pub const BAND_UPPER_PERCENTILE: f64 = 95.0;

/// Which time-dependent measure a pipeline produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Measure {
    #[default]
    HStar,
    CStar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureConfig {
    pub measure: Measure,
    pub emd: EmdConfig,
    pub trim_fraction: f64,
    pub weight: AmplitudeWeight,
    /// Trailing window for `H̄*`; `None` gives the per-time `H*`.
    pub rolling_window: Option<usize>,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            measure: Measure::HStar,
            emd: EmdConfig::default(),
            trim_fraction: 0.0,
            weight: AmplitudeWeight::Squared,
            rolling_window: None,
        }
    }
}

/// Runs decomposition, spectral tracking and the selected measure.
pub fn measure_track(ts: &TimeSeries, cfg: &MeasureConfig) -> Result<Vec<f64>> {
    let d = decompose(ts, &cfg.emd)?;
    let track = spectral_track(&d, cfg.trim_fraction)?;
    Ok(match cfg.measure {
        Measure::HStar => match cfg.rolling_window {
            Some(w) => rolling_scaling_exponent(&track, w)?.h_star,
            None => scaling_exponent(&track)?.h_star,
        },
        Measure::CStar => complexity(&track, cfg.weight)?.c_star,
    })
}

/// Day × intraday-index matrix of a measure with its profiles. Undefined
/// entries and padding are `NaN`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayPanel {
    pub matrix: Vec<Vec<f64>>,
    pub day_mean: Vec<f64>,
    pub band_lo: Vec<f64>,
    pub band_hi: Vec<f64>,
    pub likelihood: Vec<f64>,
    /// Column where the afternoon session starts, for two-session markets.
    pub lunch_break: Option<usize>,
}

impl IntradayPanel {
    pub fn n_days(&self) -> usize {
        self.matrix.len()
    }

    pub fn n_columns(&self) -> usize {
        self.day_mean.len()
    }

    /// Attaches a reference band and computes the outside-band likelihood.
    pub fn with_band(mut self, band: &ReferenceBand) -> Result<Self> {
        let cols = self.n_columns();
        let fit = |v: &[f64]| -> Vec<f64> { (0..cols).map(|c| v.get(c).copied().unwrap_or(f64::NAN)).collect() };
        self.band_lo = fit(&band.lo);
        self.band_hi = fit(&band.hi);
        self.likelihood = outside_band_likelihood(&self.matrix, &self.band_lo, &self.band_hi)?;
        Ok(self)
    }
}

fn column_means(matrix: &[Vec<f64>], cols: usize) -> Vec<f64> {
    (0..cols)
        .map(|c| {
            let column: Vec<f64> = matrix.iter().map(|row| row[c]).collect();
            nan_mean(&column)
        })
        .collect()
}

/// Splits `track` into one row per calendar day; shorter days are padded.
pub fn panelize(track: &[f64], cal: &TradingCalendar) -> Result<IntradayPanel> {
    if track.len() != cal.coverage() {
        return Err(Error::LengthMismatch(format!(
            "track has {} samples, calendar covers {}",
            track.len(),
            cal.coverage()
        )));
    }
    cal.validate(track.len())?;
    let cols = cal.max_day_len();
    let matrix: Vec<Vec<f64>> = cal
        .days
        .iter()
        .map(|day| {
            let mut row = track[day.range.clone()].to_vec();
            row.resize(cols, f64::NAN);
            row
        })
        .collect();
    let day_mean = column_means(&matrix, cols);
    Ok(IntradayPanel {
        matrix,
        day_mean,
        band_lo: vec![f64::NAN; cols],
        band_hi: vec![f64::NAN; cols],
        likelihood: vec![f64::NAN; cols],
        lunch_break: cal.lunch_break_column(),
    })
}

/// Inverse of [`panelize`]: concatenates each day's samples, dropping padding.
pub fn flatten(panel: &IntradayPanel, cal: &TradingCalendar) -> Vec<f64> {
    panel
        .matrix
        .iter()
        .zip(&cal.days)
        .flat_map(|(row, day)| row[..day.len()].iter().copied())
        .collect()
}

/// Per-index fraction of defined entries that fall outside `[lo, hi]`.
/// Indices with no defined entries, or no band, are `NaN`.
pub fn outside_band_likelihood(matrix: &[Vec<f64>], lo: &[f64], hi: &[f64]) -> Result<Vec<f64>> {
    let cols = lo.len();
    if hi.len() != cols || matrix.iter().any(|row| row.len() != cols) {
        return Err(Error::LengthMismatch(format!(
            "band has {} / {} columns, panel rows must match",
            lo.len(),
            hi.len()
        )));
    }
    Ok((0..cols)
        .map(|c| {
            if lo[c].is_nan() || hi[c].is_nan() {
                return f64::NAN;
            }
            let (mut outside, mut defined) = (0usize, 0usize);
            for row in matrix {
                let v = row[c];
                if v.is_nan() {
                    continue;
                }
                defined += 1;
                if v < lo[c] || v > hi[c] {
                    outside += 1;
                }
            }
            if defined == 0 {
                f64::NAN
            } else {
                outside as f64 / defined as f64
            }
        })
        .collect())
}

/// Per-index percentile band of reference day-mean profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBand {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Median of the reference profiles, per index.
    pub center: Vec<f64>,
    pub n_sims: usize,
}

/// Day-mean profiles of Brownian paths `streams`, each path `n_days *
/// day_len` long, measured on the whole path and then windowed into days.
pub fn bm_day_mean_profiles(
    day_len: usize,
    n_days: usize,
    streams: Range<u64>,
    seed: u64,
    cfg: &MeasureConfig,
) -> Result<Vec<Vec<f64>>> {
    if day_len == 0 || n_days == 0 {
        return Err(Error::InvalidParameter(
            "day length and day count must be positive".into(),
        ));
    }
    let sampler = SimConfig::new(Process::Bm, day_len * n_days, seed).sampler()?;
    let calendar = TradingCalendar::uniform(n_days, day_len);
    streams
        .into_par_iter()
        .map(|i| {
            let path = sampler.path(i)?;
            let track = measure_track(&path, cfg)?;
            Ok(panelize(&track, &calendar)?.day_mean)
        })
        .collect()
}

/// Bands from a set of profiles, linear interpolation between order
/// statistics. Indices where no profile is defined are `NaN`.
pub fn band_from_profiles(profiles: &[Vec<f64>]) -> ReferenceBand {
    let cols = profiles.first().map_or(0, Vec::len);
    let mut lo = Vec::with_capacity(cols);
    let mut hi = Vec::with_capacity(cols);
    let mut center = Vec::with_capacity(cols);
    for c in 0..cols {
        let mut v: Vec<f64> = profiles.iter().map(|p| p[c]).filter(|x| !x.is_nan()).collect();
        v.sort_by(f64::total_cmp);
        lo.push(percentile_sorted(&v, BAND_LOWER_PERCENTILE));
        hi.push(percentile_sorted(&v, BAND_UPPER_PERCENTILE));
        center.push(percentile_sorted(&v, 50.0));
    }
    ReferenceBand {
        lo,
        hi,
        center,
        n_sims: profiles.len(),
    }
}

/// 5th/95th percentile band of day-averaged measures over `n_sims`
/// Brownian reference paths.
pub fn bm_reference_band(
    day_len: usize,
    n_days: usize,
    n_sims: usize,
    seed: u64,
    cfg: &MeasureConfig,
) -> Result<ReferenceBand> {
    if n_sims < 10 {
        return Err(Error::InvalidParameter(format!(
            "reference band needs at least 10 simulations, got {n_sims}"
        )));
    }
    let profiles = bm_day_mean_profiles(day_len, n_days, 0..n_sims as u64, seed, cfg)?;
    Ok(band_from_profiles(&profiles))
}
