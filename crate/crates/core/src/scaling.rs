//! Time-dependent amplitude scaling exponent `H*(t)`, its rolling variant,
//! the entropy-like complexity `C*(t)`, and the generalized Hurst exponent
//! comparator.
//!
//! At every time `t` the IMF amplitudes are regressed against their periods
//! in log-log space, `ln a_k(t) = H*(t) ln τ_k(t) + const`. Undefined samples
//! are `NaN`.

use crate::error::{Error, Result};
use crate::hilbert::SpectralTrack;
use crate::series::TimeSeries;
use crate::stats::{fit_line, nan_mean, nan_std, pearson};

/// Fewest `(ln τ, ln a)` points a per-time regression accepts.
pub const MIN_POINTS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingTrack {
    pub h_star: Vec<f64>,
    pub r_squared: Vec<f64>,
    pub points_used: Vec<usize>,
    /// Mean of `h_star` over defined samples.
    pub grand_mean: f64,
    /// Sample standard deviation of `h_star` over defined samples.
    pub grand_std: f64,
}

impl ScalingTrack {
    fn from_columns(h_star: Vec<f64>, r_squared: Vec<f64>, points_used: Vec<usize>) -> Self {
        Self {
            grand_mean: nan_mean(&h_star),
            grand_std: nan_std(&h_star),
            h_star,
            r_squared,
            points_used,
        }
    }

    pub fn len(&self) -> usize {
        self.h_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_star.is_empty()
    }

    /// Mean `R²` over defined samples.
    pub fn mean_r_squared(&self) -> f64 {
        nan_mean(&self.r_squared)
    }

    /// Mean `R²` over samples whose `H*` falls in `(lo, hi)`.
    pub fn conditional_mean_r_squared(&self, lo: f64, hi: f64) -> f64 {
        let picked: Vec<f64> = self
            .h_star
            .iter()
            .zip(&self.r_squared)
            .filter(|(h, _)| **h > lo && **h < hi)
            .map(|(_, r)| *r)
            .collect();
        nan_mean(&picked)
    }
}

/// Regresses `ln a` on `ln τ` for one time step. Returns `(slope, r², n)`.
fn regress(points: &mut Vec<(f64, f64)>) -> (f64, f64, usize) {
    points.retain(|(tau, a)| *tau > 0.0 && *a > 0.0 && tau.is_finite() && a.is_finite());
    let n = points.len();
    if n < MIN_POINTS {
        return (f64::NAN, f64::NAN, n);
    }
    let (x, y): (Vec<f64>, Vec<f64>) = points.iter().map(|(tau, a)| (tau.ln(), a.ln())).unzip();
    match fit_line(&x, &y) {
        Some(fit) => (fit.slope, fit.r_squared, n),
        None => (f64::NAN, f64::NAN, n),
    }
}

fn require_imfs(track: &SpectralTrack) -> Result<()> {
    if track.n_imfs() < MIN_POINTS {
        return Err(Error::Degenerate(format!(
            "scaling regression needs at least {MIN_POINTS} IMFs, track has {}",
            track.n_imfs()
        )));
    }
    Ok(())
}

/// Per-time OLS slope of `ln a_k(t)` against `ln τ_k(t)` over valid IMFs.
pub fn scaling_exponent(track: &SpectralTrack) -> Result<ScalingTrack> {
    require_imfs(track)?;
    let len = track.len();
    let mut h = Vec::with_capacity(len);
    let mut r2 = Vec::with_capacity(len);
    let mut used = Vec::with_capacity(len);
    let mut points = Vec::with_capacity(track.n_imfs());
    for t in 0..len {
        points.clear();
        for k in 0..track.n_imfs() {
            if track.validity[k][t] {
                points.push((track.periods[k][t], track.amplitudes[k][t]));
            }
        }
        let (slope, r, n) = regress(&mut points);
        h.push(slope);
        r2.push(r);
        used.push(n);
    }
    Ok(ScalingTrack::from_columns(h, r2, used))
}

/// `H̄*(t)` from trailing means of amplitude and period over the last
/// `window` samples. Only valid samples enter each IMF's means; samples
/// before the first full window are undefined.
pub fn rolling_scaling_exponent(track: &SpectralTrack, window: usize) -> Result<ScalingTrack> {
    require_imfs(track)?;
    let len = track.len();
    if window < 2 || window > len {
        return Err(Error::InvalidParameter(format!(
            "rolling window must be in [2, {len}], got {window}"
        )));
    }
    let n = track.n_imfs();
    let mut sum_a = vec![0.0; n];
    let mut sum_tau = vec![0.0; n];
    let mut count = vec![0usize; n];
    let mut h = Vec::with_capacity(len);
    let mut r2 = Vec::with_capacity(len);
    let mut used = Vec::with_capacity(len);
    let mut points = Vec::with_capacity(n);

    for t in 0..len {
        for k in 0..n {
            if track.validity[k][t] {
                sum_a[k] += track.amplitudes[k][t];
                sum_tau[k] += track.periods[k][t];
                count[k] += 1;
            }
            if t >= window {
                let old = t - window;
                if track.validity[k][old] {
                    sum_a[k] -= track.amplitudes[k][old];
                    sum_tau[k] -= track.periods[k][old];
                    count[k] -= 1;
                }
            }
            if count[k] == 0 {
                // Re-anchor so drift from add/subtract cannot accumulate.
                sum_a[k] = 0.0;
                sum_tau[k] = 0.0;
            }
        }
        if t + 1 < window {
            h.push(f64::NAN);
            r2.push(f64::NAN);
            used.push(0);
            continue;
        }
        points.clear();
        for k in 0..n {
            if count[k] > 0 {
                let c = count[k] as f64;
                points.push((sum_tau[k] / c, sum_a[k] / c));
            }
        }
        let (slope, r, m) = regress(&mut points);
        h.push(slope);
        r2.push(r);
        used.push(m);
    }
    Ok(ScalingTrack::from_columns(h, r2, used))
}

/// Weighting of amplitudes in the relative distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AmplitudeWeight {
    /// `a_k²`, the energy share.
    #[default]
    Squared,
    /// `a_k`.
    Linear,
}

impl AmplitudeWeight {
    fn apply(self, a: f64) -> f64 {
        match self {
            AmplitudeWeight::Squared => a * a,
            AmplitudeWeight::Linear => a,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityTrack {
    pub c_star: Vec<f64>,
    pub n_imfs: usize,
}

impl ComplexityTrack {
    pub fn len(&self) -> usize {
        self.c_star.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c_star.is_empty()
    }
}

/// Relative distribution `p_k(t)` of weighted amplitudes at time `t`, or
/// `None` when every amplitude is zero.
pub fn amplitude_distribution(track: &SpectralTrack, t: usize, weight: AmplitudeWeight) -> Option<Vec<f64>> {
    let w: Vec<f64> = track.amplitudes.iter().map(|row| weight.apply(row[t])).collect();
    let total: f64 = w.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return None;
    }
    Some(w.into_iter().map(|v| v / total).collect())
}

/// Shannon entropy of the amplitude distribution across IMFs at every time.
pub fn complexity(track: &SpectralTrack, weight: AmplitudeWeight) -> Result<ComplexityTrack> {
    let n = track.n_imfs();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "complexity needs at least 2 IMFs, track has {n}"
        )));
    }
    let bound = (n as f64).ln();
    let c_star = (0..track.len())
        .map(|t| match amplitude_distribution(track, t, weight) {
            Some(p) => {
                let h: f64 = p.iter().filter(|&&v| v > 0.0).map(|&v| -v * v.ln()).sum();
                h.clamp(0.0, bound)
            }
            None => f64::NAN,
        })
        .collect();
    Ok(ComplexityTrack { c_star, n_imfs: n })
}

/// Generalized Hurst exponent fit for `q = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GheFit {
    pub h: f64,
    pub r_squared: f64,
}

/// Scaling of the first absolute moment of increments,
/// `E|X(t+τ) − X(t)| ∝ τ^H`, fitted over `τ = 1..=tau_max`.
pub fn generalized_hurst_q1(series: &TimeSeries, tau_max: usize) -> Result<GheFit> {
    if tau_max < 2 {
        return Err(Error::InvalidParameter(format!(
            "tau_max must be at least 2, got {tau_max}"
        )));
    }
    let x = series.values();
    if x.len() < 10 * tau_max {
        return Err(Error::TooShort {
            needed: 10 * tau_max,
            got: x.len(),
        });
    }
    let mut log_tau = Vec::with_capacity(tau_max);
    let mut log_moment = Vec::with_capacity(tau_max);
    for tau in 1..=tau_max {
        let m = x.len() - tau;
        let moment = (0..m).map(|t| (x[t + tau] - x[t]).abs()).sum::<f64>() / m as f64;
        if moment.is_nan() || moment <= 0.0 {
            return Err(Error::Degenerate(format!("zero first moment at lag {tau}")));
        }
        log_tau.push((tau as f64).ln());
        log_moment.push(moment.ln());
    }
    let fit = fit_line(&log_tau, &log_moment).ok_or_else(|| Error::Internal("GHE fit failed".into()))?;
    Ok(GheFit {
        h: fit.slope,
        r_squared: fit.r_squared,
    })
}

/// Pearson correlation between `H*(t)` and `C*(t)` over jointly defined samples.
pub fn measure_correlation(s: &ScalingTrack, c: &ComplexityTrack) -> Result<f64> {
    if s.len() != c.len() {
        return Err(Error::LengthMismatch(format!(
            "scaling track has {} samples, complexity track {}",
            s.len(),
            c.len()
        )));
    }
    pearson(&s.h_star, &c.c_star)
        .ok_or_else(|| Error::Degenerate("fewer than 2 jointly defined samples or zero variance".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Track with `n` IMFs of fixed periods `2^(k+1)` and amplitude `f(τ)`.
    fn synthetic(n: usize, len: usize, amp: impl Fn(f64, usize) -> f64) -> SpectralTrack {
        let mut a = Vec::new();
        let mut w = Vec::new();
        for k in 0..n {
            let tau = 2f64.powi(k as i32 + 1);
            a.push((0..len).map(|t| amp(tau, t)).collect());
            w.push(vec![2.0 * PI / tau; len]);
        }
        SpectralTrack::from_parts(a, w, 0.0).unwrap()
    }

    #[test]
    fn exact_power_law() {
        let tr = synthetic(6, 50, |tau, _| tau.powf(0.7));
        let s = scaling_exponent(&tr).unwrap();
        for t in 0..50 {
            assert!((s.h_star[t] - 0.7).abs() < 1e-12);
            assert!((s.r_squared[t] - 1.0).abs() < 1e-12);
            assert_eq!(s.points_used[t], 6);
        }
        assert!((s.grand_mean - 0.7).abs() < 1e-12);
    }

    #[test]
    fn flat_amplitudes_give_zero() {
        let tr = synthetic(5, 10, |_, _| 3.0);
        let s = scaling_exponent(&tr).unwrap();
        assert!(s.h_star.iter().all(|&h| h == 0.0));
        assert!(s.r_squared.iter().all(|&r| r == 0.0));
    }

    #[test]
    fn too_few_valid_points_undefined() {
        let mut tr = synthetic(4, 8, |tau, _| tau.sqrt());
        tr.validity[0][3] = false;
        tr.validity[1][3] = false;
        let s = scaling_exponent(&tr).unwrap();
        assert!(s.h_star[3].is_nan());
        assert_eq!(s.points_used[3], 2);
        assert!((s.h_star[4] - 0.5).abs() < 1e-12);
        assert!(scaling_exponent(&synthetic(2, 8, |t, _| t)).is_err());
    }

    #[test]
    fn rolling_exact_and_degenerate_window() {
        let tr = synthetic(6, 100, |tau, _| tau.powf(0.7));
        let s = rolling_scaling_exponent(&tr, 20).unwrap();
        assert!(s.h_star[..19].iter().all(|h| h.is_nan()));
        for h in &s.h_star[19..] {
            assert!((h - 0.7).abs() < 1e-9);
        }
        let full = rolling_scaling_exponent(&tr, 100).unwrap();
        assert_eq!(full.h_star.iter().filter(|h| !h.is_nan()).count(), 1);
        assert!((full.h_star[99] - 0.7).abs() < 1e-9);
        assert!(rolling_scaling_exponent(&tr, 1).is_err());
        assert!(rolling_scaling_exponent(&tr, 101).is_err());
    }

    #[test]
    fn complexity_examples() {
        let n = 5;
        let uniform = complexity(&synthetic(n, 4, |_, _| 2.0), AmplitudeWeight::Squared).unwrap();
        for c in &uniform.c_star {
            assert!((c - (n as f64).ln()).abs() < 1e-12);
        }
        let single = complexity(
            &synthetic(n, 4, |tau, _| if tau == 2.0 { 1.0 } else { 0.0 }),
            AmplitudeWeight::Squared,
        )
        .unwrap();
        assert!(single.c_star.iter().all(|&c| c == 0.0));
        let two = complexity(
            &synthetic(n, 4, |tau, _| if tau <= 4.0 { 1.0 } else { 0.0 }),
            AmplitudeWeight::Squared,
        )
        .unwrap();
        for c in &two.c_star {
            assert!((c - 2f64.ln()).abs() < 1e-12);
        }
        let zero = complexity(&synthetic(n, 3, |_, _| 0.0), AmplitudeWeight::Squared).unwrap();
        assert!(zero.c_star.iter().all(|c| c.is_nan()));
    }

    #[test]
    fn linear_weight_differs_from_squared() {
        let tr = synthetic(4, 2, |tau, _| tau);
        let sq = complexity(&tr, AmplitudeWeight::Squared).unwrap();
        let lin = complexity(&tr, AmplitudeWeight::Linear).unwrap();
        assert!(lin.c_star[0] > sq.c_star[0]);
        let p = amplitude_distribution(&tr, 0, AmplitudeWeight::Linear).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghe_on_a_line() {
        let ts = TimeSeries::from_values((0..500).map(|t| t as f64).collect()).unwrap();
        let fit = generalized_hurst_q1(&ts, 19).unwrap();
        assert!((fit.h - 1.0).abs() < 1e-12);
        let flat = TimeSeries::from_values(vec![1.0; 500]).unwrap();
        assert!(matches!(generalized_hurst_q1(&flat, 19), Err(Error::Degenerate(_))));
        let short = TimeSeries::from_values(vec![1.0; 100]).unwrap();
        assert!(matches!(generalized_hurst_q1(&short, 19), Err(Error::TooShort { .. })));
    }

    #[test]
    fn correlation_of_affine_tracks() {
        let h: Vec<f64> = (0..20).map(|t| (t as f64 * 0.3).sin()).collect();
        let s = ScalingTrack::from_columns(h.clone(), vec![1.0; 20], vec![5; 20]);
        let c = ComplexityTrack {
            c_star: h.iter().map(|v| 1.2 - 0.5 * v).collect(),
            n_imfs: 5,
        };
        assert!((measure_correlation(&s, &c).unwrap() + 1.0).abs() < 1e-12);
        let short = ComplexityTrack {
            c_star: vec![0.0; 3],
            n_imfs: 5,
        };
        assert!(measure_correlation(&s, &short).is_err());
    }
}
