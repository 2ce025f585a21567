//! Discrete Hilbert transform and the per-IMF instantaneous amplitude, phase,
//! frequency and period tracks.

use std::cell::RefCell;
use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::emd::ImfDecomposition;
use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Harmonic conjugate of `c` by the analytic-signal method: negative
/// frequencies are zeroed, positive ones doubled, DC and Nyquist kept.
pub fn hilbert_transform(c: &[f64]) -> Result<Vec<f64>> {
    Ok(analytic_signal(c)?.into_iter().map(|z| z.im).collect())
}

/// `c + i * H[c]`.
pub fn analytic_signal(c: &[f64]) -> Result<Vec<Complex<f64>>> {
    let n = c.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    if let Some(i) = c.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut buf: Vec<Complex<f64>> = c.iter().map(|&v| Complex::new(v, 0.0)).collect();
    let (fwd, inv) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    });
    fwd.process(&mut buf);
    let half = n / 2;
    let positive_end = if n.is_multiple_of(2) { half } else { half + 1 };
    for z in &mut buf[1..positive_end] {
        *z *= 2.0;
    }
    for z in &mut buf[half + 1..] {
        *z = Complex::new(0.0, 0.0);
    }
    inv.process(&mut buf);
    let scale = 1.0 / n as f64;
    Ok(buf.into_iter().map(|z| z * scale).collect())
}

/// Unwraps a phase sequence so adjacent samples never differ by more than π.
pub fn unwrap_phase(phase: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(phase.len());
    let Some(&first) = phase.first() else {
        return out;
    };
    out.push(first);
    let mut acc = first;
    for w in phase.windows(2) {
        let d = w[1] - w[0];
        acc += d - 2.0 * PI * (d / (2.0 * PI)).round();
        out.push(acc);
    }
    out
}

/// Central differences, one-sided at the ends.
fn derivative(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|t| match t {
                0 => x[1] - x[0],
                t if t == n - 1 => x[n - 1] - x[n - 2],
                t => 0.5 * (x[t + 1] - x[t - 1]),
            })
            .collect(),
    }
}

/// Instantaneous attributes of each IMF (rows) over time (columns).
///
/// Frequencies are in radians per sample and periods `2π / ω` in samples.
/// `validity[k][t]` is false where `ω ≤ 0` or `t` lies in the trimmed margin;
/// periods are `NaN` there.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralTrack {
    pub amplitudes: Vec<Vec<f64>>,
    pub phases: Vec<Vec<f64>>,
    pub frequencies: Vec<Vec<f64>>,
    pub periods: Vec<Vec<f64>>,
    pub validity: Vec<Vec<bool>>,
}

impl SpectralTrack {
    pub fn n_imfs(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Builds a track from given amplitudes and frequencies, with no phase
    /// information. Used for synthetic inputs.
    pub fn from_parts(amplitudes: Vec<Vec<f64>>, frequencies: Vec<Vec<f64>>, trim_fraction: f64) -> Result<Self> {
        if amplitudes.len() != frequencies.len() || amplitudes.iter().zip(&frequencies).any(|(a, f)| a.len() != f.len())
        {
            return Err(Error::LengthMismatch("amplitude and frequency shapes differ".into()));
        }
        let len = amplitudes.first().map_or(0, Vec::len);
        if amplitudes.iter().any(|a| a.len() != len) {
            return Err(Error::LengthMismatch("ragged amplitude rows".into()));
        }
        let margin = trim_margin(len, trim_fraction)?;
        let mut periods = Vec::with_capacity(frequencies.len());
        let mut validity = Vec::with_capacity(frequencies.len());
        for omega in &frequencies {
            let valid: Vec<bool> = omega
                .iter()
                .enumerate()
                .map(|(t, &w)| w > 0.0 && w.is_finite() && t >= margin && t + margin < len)
                .collect();
            periods.push(
                omega
                    .iter()
                    .zip(&valid)
                    .map(|(&w, &ok)| if ok { 2.0 * PI / w } else { f64::NAN })
                    .collect(),
            );
            validity.push(valid);
        }
        Ok(Self {
            phases: vec![Vec::new(); amplitudes.len()],
            amplitudes,
            frequencies,
            periods,
            validity,
        })
    }

    /// Copy with every amplitude raised to `power`; `power = 2` gives energies.
    pub fn amplitude_powers(&self, power: f64) -> Vec<Vec<f64>> {
        self.amplitudes
            .iter()
            .map(|row| row.iter().map(|a| a.powf(power)).collect())
            .collect()
    }
}

fn trim_margin(len: usize, trim_fraction: f64) -> Result<usize> {
    if !(0.0..0.5).contains(&trim_fraction) {
        return Err(Error::InvalidParameter(format!(
            "trim fraction must be in [0, 0.5), got {trim_fraction}"
        )));
    }
    Ok((trim_fraction * len as f64).floor() as usize)
}

/// Amplitude, unwrapped phase, frequency and period of every IMF in `d`;
/// the residue is excluded.
pub fn spectral_track(d: &ImfDecomposition, trim_fraction: f64) -> Result<SpectralTrack> {
    spectral_track_of(&d.imfs, trim_fraction)
}

/// As [`spectral_track`], on raw component rows.
pub fn spectral_track_of(imfs: &[Vec<f64>], trim_fraction: f64) -> Result<SpectralTrack> {
    if imfs.is_empty() {
        return Err(Error::Degenerate("decomposition has no IMFs".into()));
    }
    let mut amplitudes = Vec::with_capacity(imfs.len());
    let mut phases = Vec::with_capacity(imfs.len());
    let mut frequencies = Vec::with_capacity(imfs.len());
    for c in imfs {
        let z = analytic_signal(c)?;
        amplitudes.push(z.iter().map(|z| z.norm()).collect::<Vec<_>>());
        let theta = unwrap_phase(&z.iter().map(|z| z.im.atan2(z.re)).collect::<Vec<_>>());
        frequencies.push(derivative(&theta));
        phases.push(theta);
    }
    let mut track = SpectralTrack::from_parts(amplitudes, frequencies, trim_fraction)?;
    track.phases = phases;
    Ok(track)
}
