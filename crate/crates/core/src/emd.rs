//! Empirical mode decomposition.
//!
//! A series is sifted into intrinsic mode functions (IMFs), highest frequency
//! first, by repeatedly subtracting the mean of the cubic-spline envelopes
//! through its local maxima and minima. Whatever remains once the residue
//! stops oscillating is returned as the residue, so the IMFs and residue sum
//! back to the input exactly.

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::spline::NaturalSpline;

/// Minimum series length accepted by [`decompose`].
pub const MIN_LENGTH: usize = 16;

/// When to accept a sifting candidate as an IMF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SiftCriterion {
    /// Cauchy-type criterion: stop once
    /// `Σ (h_old − h_new)² / Σ h_old² < threshold`.
    Sd { threshold: f64 },
    /// Envelope-ratio criterion on `σ(t) = |mean envelope| / half envelope
    /// range`: stop once `σ < theta1` on all but a fraction `tolerance` of
    /// samples and `σ < theta2` everywhere.
    EnvelopeRatio { theta1: f64, theta2: f64, tolerance: f64 },
}

impl SiftCriterion {
    /// Thresholds `(0.05, 0.5, 0.05)`.
    pub const ENVELOPE_RATIO_DEFAULT: SiftCriterion = SiftCriterion::EnvelopeRatio {
        theta1: 0.05,
        theta2: 0.5,
        tolerance: 0.05,
    };

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            SiftCriterion::Sd { threshold } => threshold > 0.0 && threshold.is_finite(),
            SiftCriterion::EnvelopeRatio {
                theta1,
                theta2,
                tolerance,
            } => theta1 > 0.0 && theta2 >= theta1 && (0.0..1.0).contains(&tolerance),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid sifting criterion {self:?}")))
        }
    }

    fn is_met(&self, step: &SiftStep) -> bool {
        match *self {
            SiftCriterion::Sd { threshold } => step.sd < threshold,
            SiftCriterion::EnvelopeRatio {
                theta1,
                theta2,
                tolerance,
            } => {
                let mut above = 0usize;
                for (m, a) in step.mean_envelope.iter().zip(&step.half_range) {
                    let ratio = if *a > 0.0 { m.abs() / a } else { 0.0 };
                    if ratio > theta2 {
                        return false;
                    }
                    if ratio > theta1 {
                        above += 1;
                    }
                }
                (above as f64) <= tolerance * step.mean_envelope.len() as f64
            }
        }
    }
}

/// Sifting parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct EmdConfig {
    pub criterion: SiftCriterion,
    pub max_sift_iterations: usize,
    /// `None` means `ceil(log2 T) + 2`.
    pub max_imfs: Option<usize>,
    /// Extrema mirrored beyond each end before fitting envelopes.
    pub mirror_extrema: usize,
}

impl Default for EmdConfig {
    fn default() -> Self {
        Self {
            criterion: SiftCriterion::ENVELOPE_RATIO_DEFAULT,
            max_sift_iterations: 100,
            max_imfs: None,
            mirror_extrema: 2,
        }
    }
}

impl EmdConfig {
    /// Default configuration with the SD criterion at `threshold`.
    pub fn with_sd_threshold(threshold: f64) -> Self {
        Self {
            criterion: SiftCriterion::Sd { threshold },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.criterion.validate()?;
        if self.max_sift_iterations == 0 {
            return Err(Error::InvalidParameter("max sift iterations must be at least 1".into()));
        }
        if self.mirror_extrema == 0 {
            return Err(Error::InvalidParameter("mirror extrema must be at least 1".into()));
        }
        if self.max_imfs == Some(0) {
            return Err(Error::InvalidParameter("max imfs must be at least 1".into()));
        }
        Ok(())
    }

    /// IMF cap for a series of `len` samples.
    pub fn imf_limit(&self, len: usize) -> usize {
        self.max_imfs
            .unwrap_or_else(|| (len.max(2) as f64).log2().ceil() as usize + 2)
    }
}

/// Why sifting of one IMF ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The sifting criterion was met.
    Converged,
    MaxIterations,
    /// The candidate ran out of extrema mid-sift and was accepted as is.
    InsufficientExtrema,
}

/// IMFs plus residue for one input series.
#[derive(Debug, Clone, PartialEq)]
pub struct ImfDecomposition {
    pub imfs: Vec<Vec<f64>>,
    pub residue: Vec<f64>,
    pub sift_counts: Vec<usize>,
    pub stop_reasons: Vec<StopReason>,
}

impl ImfDecomposition {
    pub fn n_imfs(&self) -> usize {
        self.imfs.len()
    }

    pub fn len(&self) -> usize {
        self.residue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residue.is_empty()
    }

    /// Sum of all IMFs and the residue.
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = self.residue.clone();
        for imf in &self.imfs {
            for (o, v) in out.iter_mut().zip(imf) {
                *o += v;
            }
        }
        out
    }
}

/// Indices of local maxima and minima. Flat runs count once, at their centre;
/// end samples are never extrema.
pub fn local_extrema(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let n = x.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    if n < 3 {
        return (maxima, minima);
    }
    let mut i = 1;
    while i < n - 1 {
        let mut j = i;
        while j < n - 1 && x[j + 1] == x[i] {
            j += 1;
        }
        if j >= n - 1 {
            break;
        }
        let (left, right) = (x[i - 1], x[j + 1]);
        if x[i] > left && x[i] > right {
            maxima.push((i + j) / 2);
        } else if x[i] < left && x[i] < right {
            minima.push((i + j) / 2);
        }
        i = j + 1;
    }
    (maxima, minima)
}

/// Envelope knots `(positions, values)` for maxima and minima after
/// mirroring `nsym` extrema about each end.
struct Knots {
    max_t: Vec<f64>,
    max_v: Vec<f64>,
    min_t: Vec<f64>,
    min_v: Vec<f64>,
}

fn reversed(s: &[usize]) -> Vec<usize> {
    s.iter().rev().copied().collect()
}

/// Mirror boundary extension in the style of the widely used reference
/// sifting code: reflect about the end sample, or about the first/last
/// extremum when the end sample lies inside the envelope.
fn mirrored_knots(x: &[f64], imax: &[usize], imin: &[usize], nsym: usize) -> Knots {
    let last = x.len() - 1;
    let (nmax, nmin) = (imax.len(), imin.len());

    let (mut lmax, mut lmin, mut lsym);
    if imax[0] < imin[0] {
        if x[0] > x[imin[0]] {
            lmax = reversed(&imax[1..nmax.min(nsym + 1)]);
            lmin = reversed(&imin[..nmin.min(nsym)]);
            lsym = imax[0];
        } else {
            lmax = reversed(&imax[..nmax.min(nsym)]);
            lmin = reversed(&imin[..nmin.min(nsym - 1)]);
            lmin.push(0);
            lsym = 0;
        }
    } else if x[0] < x[imax[0]] {
        lmax = reversed(&imax[..nmax.min(nsym)]);
        lmin = reversed(&imin[1..nmin.min(nsym + 1)]);
        lsym = imin[0];
    } else {
        lmax = reversed(&imax[..nmax.min(nsym - 1)]);
        lmax.push(0);
        lmin = reversed(&imin[..nmin.min(nsym)]);
        lsym = 0;
    }

    let (mut rmax, mut rmin, mut rsym);
    if imax[nmax - 1] < imin[nmin - 1] {
        if x[last] < x[imax[nmax - 1]] {
            rmax = reversed(&imax[nmax.saturating_sub(nsym)..]);
            rmin = reversed(&imin[nmin.saturating_sub(nsym + 1)..nmin - 1]);
            rsym = imin[nmin - 1];
        } else {
            rmax = vec![last];
            rmax.extend(reversed(&imax[nmax.saturating_sub(nsym - 1)..]));
            rmin = reversed(&imin[nmin.saturating_sub(nsym)..]);
            rsym = last;
        }
    } else if x[last] > x[imin[nmin - 1]] {
        rmax = reversed(&imax[nmax.saturating_sub(nsym + 1)..nmax - 1]);
        rmin = reversed(&imin[nmin.saturating_sub(nsym)..]);
        rsym = imax[nmax - 1];
    } else {
        rmax = reversed(&imax[nmax.saturating_sub(nsym)..]);
        rmin = vec![last];
        rmin.extend(reversed(&imin[nmin.saturating_sub(nsym - 1)..]));
        rsym = last;
    }

    let reflect =
        |sym: usize, idx: &[usize]| -> Vec<f64> { idx.iter().map(|&i| 2.0 * sym as f64 - i as f64).collect() };
    let mut tlmax = reflect(lsym, &lmax);
    let mut tlmin = reflect(lsym, &lmin);
    let mut trmax = reflect(rsym, &rmax);
    let mut trmin = reflect(rsym, &rmin);

    // Mirrored knots must reach past the ends; otherwise reflect about the
    // end sample instead.
    let short_left = |a: &[f64], b: &[f64]| a.first().is_none_or(|&v| v > 0.0) || b.first().is_none_or(|&v| v > 0.0);
    if short_left(&tlmin, &tlmax) && lsym != 0 {
        if lsym == imax[0] {
            lmax = reversed(&imax[..nmax.min(nsym)]);
        } else {
            lmin = reversed(&imin[..nmin.min(nsym)]);
        }
        lsym = 0;
        tlmax = reflect(lsym, &lmax);
        tlmin = reflect(lsym, &lmin);
    }
    let short_right = |a: &[f64], b: &[f64]| {
        let end = last as f64;
        a.last().is_none_or(|&v| v < end) || b.last().is_none_or(|&v| v < end)
    };
    if short_right(&trmin, &trmax) && rsym != last {
        if rsym == imax[nmax - 1] {
            rmax = reversed(&imax[nmax.saturating_sub(nsym)..]);
        } else {
            rmin = reversed(&imin[nmin.saturating_sub(nsym)..]);
        }
        rsym = last;
        trmax = reflect(rsym, &rmax);
        trmin = reflect(rsym, &rmin);
    }

    let assemble = |tl: Vec<f64>, l: &[usize], mid: &[usize], tr: Vec<f64>, r: &[usize]| {
        let mut t = tl;
        let mut v: Vec<f64> = l.iter().map(|&i| x[i]).collect();
        t.extend(mid.iter().map(|&i| i as f64));
        v.extend(mid.iter().map(|&i| x[i]));
        t.extend(tr);
        v.extend(r.iter().map(|&i| x[i]));
        dedup_knots(t, v)
    };
    let (max_t, max_v) = assemble(tlmax, &lmax, imax, trmax, &rmax);
    let (min_t, min_v) = assemble(tlmin, &lmin, imin, trmin, &rmin);
    Knots {
        max_t,
        max_v,
        min_t,
        min_v,
    }
}

/// Sorts knots and drops repeated positions (keeping the first).
fn dedup_knots(t: Vec<f64>, v: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    if t.windows(2).all(|w| w[1] > w[0]) {
        return (t, v);
    }
    let mut pairs: Vec<(f64, f64)> = t.into_iter().zip(v).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.dedup_by(|b, a| a.0 == b.0);
    pairs.into_iter().unzip()
}

/// One sifting step.
#[derive(Debug, Clone, PartialEq)]
pub struct SiftStep {
    /// `h - mean_envelope`.
    pub next: Vec<f64>,
    pub mean_envelope: Vec<f64>,
    /// Half the distance between the upper and lower envelopes.
    pub half_range: Vec<f64>,
    /// `sum (h_old - h_new)^2 / sum h_old^2`.
    pub sd: f64,
}

/// Subtracts the mean of the upper and lower spline envelopes from `h`.
///
/// Returns `None` when `h` has fewer than two maxima or two minima; the
/// caller should then finalise the current component.
pub fn sift_once(h: &[f64], cfg: &EmdConfig) -> Option<SiftStep> {
    let (imax, imin) = local_extrema(h);
    if imax.len() < 2 || imin.len() < 2 {
        return None;
    }
    let knots = mirrored_knots(h, &imax, &imin, cfg.mirror_extrema.max(1));
    let upper = NaturalSpline::new(knots.max_t, knots.max_v)?.eval_grid(h.len());
    let lower = NaturalSpline::new(knots.min_t, knots.min_v)?.eval_grid(h.len());
    let mean_envelope: Vec<f64> = upper.iter().zip(&lower).map(|(u, l)| 0.5 * (u + l)).collect();
    let half_range: Vec<f64> = upper.iter().zip(&lower).map(|(u, l)| 0.5 * (u - l).abs()).collect();
    let next: Vec<f64> = h.iter().zip(&mean_envelope).map(|(v, m)| v - m).collect();
    let num: f64 = mean_envelope.iter().map(|m| m * m).sum();
    let den: f64 = h.iter().map(|v| v * v).sum();
    let sd = if den > 0.0 { num / den } else { 0.0 };
    Some(SiftStep {
        next,
        mean_envelope,
        half_range,
        sd,
    })
}

/// Decomposes `ts` into IMFs and a residue.
pub fn decompose(ts: &TimeSeries, cfg: &EmdConfig) -> Result<ImfDecomposition> {
    cfg.validate()?;
    let x = ts.values();
    if x.len() < MIN_LENGTH {
        return Err(Error::TooShort {
            needed: MIN_LENGTH,
            got: x.len(),
        });
    }
    let limit = cfg.imf_limit(x.len());
    let mut residue = x.to_vec();
    let mut out = ImfDecomposition {
        imfs: Vec::new(),
        residue: Vec::new(),
        sift_counts: Vec::new(),
        stop_reasons: Vec::new(),
    };

    while out.imfs.len() < limit {
        let (imax, imin) = local_extrema(&residue);
        if imax.len() + imin.len() < 4 {
            break;
        }
        let mut h = residue.clone();
        let mut iterations = 0;
        let reason = loop {
            match sift_once(&h, cfg) {
                None if iterations == 0 => break None,
                None => break Some(StopReason::InsufficientExtrema),
                Some(step) => {
                    let met = cfg.criterion.is_met(&step);
                    h = step.next;
                    iterations += 1;
                    if met {
                        break Some(StopReason::Converged);
                    }
                    if iterations >= cfg.max_sift_iterations {
                        break Some(StopReason::MaxIterations);
                    }
                }
            }
        };
        let Some(reason) = reason else { break };
        for (r, v) in residue.iter_mut().zip(&h) {
            *r -= v;
        }
        out.imfs.push(h);
        out.sift_counts.push(iterations);
        out.stop_reasons.push(reason);
    }
    out.residue = residue;
    Ok(out)
}
