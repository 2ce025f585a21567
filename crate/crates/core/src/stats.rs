//! Small numeric helpers shared across modules.
//!
//! Undefined samples are represented as `NaN` throughout the crate; every
//! aggregate here skips them.

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Mean over the defined (non-NaN) entries; `NaN` if there are none.
pub fn nan_mean(values: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for &v in values.iter().filter(|v| !v.is_nan()) {
        acc.add(v);
        n += 1;
    }
    if n == 0 {
        f64::NAN
    } else {
        acc.value() / n as f64
    }
}

/// Unbiased sample standard deviation over defined entries.
pub fn nan_std(values: &[f64]) -> f64 {
    let mean = nan_mean(values);
    let defined: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    if defined.len() < 2 {
        return f64::NAN;
    }
    let ss: CompensatedSum = defined.iter().map(|v| (v - mean).powi(2)).collect();
    (ss.value() / (defined.len() - 1) as f64).sqrt()
}

/// Pearson correlation over pairs where both entries are defined.
///
/// Returns `None` when fewer than two joint samples exist or either side has
/// zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| !a.is_nan() && !b.is_nan())
        .map(|(&a, &b)| (a, b))
        .collect();
    if pairs.len() < 2 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).collect::<CompensatedSum>().value() / n;
    let my = pairs.iter().map(|p| p.1).collect::<CompensatedSum>().value() / n;
    let mut sxy = CompensatedSum::new();
    let mut sxx = CompensatedSum::new();
    let mut syy = CompensatedSum::new();
    for &(a, b) in &pairs {
        sxy.add((a - mx) * (b - my));
        sxx.add((a - mx).powi(2));
        syy.add((b - my).powi(2));
    }
    let denom = (sxx.value() * syy.value()).sqrt();
    if denom == 0.0 {
        None
    } else {
        Some((sxy.value() / denom).clamp(-1.0, 1.0))
    }
}

/// Ordinary least-squares line fit `y = slope * x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination, squared Pearson correlation of the fit.
    pub r_squared: f64,
}

/// Fits a line through `(x, y)`. `None` when fewer than two points or the
/// abscissae are all equal. A flat response (zero variance in `y`) gives a
/// zero slope and `r_squared = 0`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LineFit> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx <= 0.0 {
        return None;
    }
    let y_scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    if syy <= nf * (1e-13 * y_scale).powi(2) {
        return Some(LineFit {
            slope: 0.0,
            intercept: my,
            r_squared: 0.0,
        });
    }
    let slope = sxy / sxx;
    let r_squared = (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0);
    Some(LineFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Percentile of `sorted` (ascending, no NaN) by linear interpolation between
/// order statistics, `p` in `[0, 100]`.
pub fn percentile_sorted(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let rank = (p / 100.0).clamp(0.0, 1.0) * (n - 1) as f64;
            let lo = rank.floor() as usize;
            let hi = rank.ceil() as usize;
            let frac = rank - lo as f64;
            sorted[lo] + (sorted[hi] - sorted[lo]) * frac
        }
    }
}

/// Percentile over defined entries of an unsorted slice.
pub fn nan_percentile(values: &[f64], p: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().copied().filter(|x| !x.is_nan()).collect();
    v.sort_by(f64::total_cmp);
    percentile_sorted(&v, p)
}
