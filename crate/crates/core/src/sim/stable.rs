//! Symmetric α-stable variates (Chambers-Mallows-Stuck) and Lévy motion.

use std::f64::consts::FRAC_PI_2;

use rand::Rng;

use super::{check_alpha, check_slm_params, cumulative_sum, path_rng};
use crate::error::Result;
use crate::series::TimeSeries;

/// One standard symmetric α-stable draw. For `α = 2` this is `N(0, 2)`,
/// for `α = 1` standard Cauchy.
pub fn sample_symmetric_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    // V uniform on the open interval (-π/2, π/2), W standard exponential.
    let u = loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            break u;
        }
    };
    let v = (u - 0.5) * 2.0 * FRAC_PI_2;
    let w = -(1.0 - rng.random::<f64>()).ln();
    if (alpha - 1.0).abs() < 1e-12 {
        return v.tan();
    }
    (alpha * v).sin() / v.cos().powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
}

/// α-stable Lévy motion: partial sums of i.i.d. symmetric stable increments,
/// self-similar with `H = 1/α`. `m` and `big_m` must satisfy the generator's
/// power-of-two constraint on `m (M + T)`.
pub fn simulate_slm(alpha: f64, length: usize, seed: u64, m: u64, big_m: u64) -> Result<TimeSeries> {
    check_alpha(alpha)?;
    check_slm_params(length, (m, big_m))?;
    let mut rng = path_rng(seed, 0);
    let inc: Vec<f64> = (0..length).map(|_| sample_symmetric_stable(alpha, &mut rng)).collect();
    TimeSeries::from_values(cumulative_sum(&inc))
}
