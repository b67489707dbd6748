use super::moments::mean;
use super::normal::normal_quantile;
use crate::error::{Error, Result};

/// Normal Q-Q points `(theoretical, sample)`.
///
/// The i-th order statistic (1-based) is paired with Phi^-1((i - 0.5)/n).
/// The sample is centered on its mean and divided by the least-squares slope
/// of the centered order statistics against the theoretical quantiles, so a
/// sample equal to the plotting-position quantiles maps onto y = x exactly
/// and a normal sample of any scale lies close to it.
pub fn qq_points(values: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::InsufficientSample {
            what: "Q-Q plot",
            needed: 3,
            got: n,
        });
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let theoretical = plotting_quantiles(n)?;
    let m = mean(&sorted);
    let num: f64 = sorted.iter().zip(&theoretical).map(|(x, q)| (x - m) * q).sum();
    let den: f64 = theoretical.iter().map(|q| q * q).sum();
    let scale = num / den;
    let spread = sorted[n - 1] - sorted[0];
    if !(scale > 0.0) || spread <= 1e-14 * m.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::domain("Q-Q plot needs a non-constant sample"));
    }
    Ok(theoretical
        .into_iter()
        .zip(sorted)
        .map(|(q, x)| (q, (x - m) / scale))
        .collect())
}

/// Phi^-1((i - 0.5)/n) for i = 1..=n.
pub fn plotting_quantiles(n: usize) -> Result<Vec<f64>> {
    (1..=n).map(|i| normal_quantile((i as f64 - 0.5) / n as f64)).collect()
}

/// Largest |sample - theoretical| over the central `fraction` of the points.
pub fn qq_max_deviation(points: &[(f64, f64)], fraction: f64) -> f64 {
    let n = points.len();
    let cut = ((1.0 - fraction.clamp(0.0, 1.0)) / 2.0 * n as f64).floor() as usize;
    points[cut..n - cut]
        .iter()
        .map(|(q, x)| (x - q).abs())
        .fold(0.0, f64::max)
}
