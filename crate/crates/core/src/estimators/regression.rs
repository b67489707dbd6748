use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use crate::error::{Error, Result};
use crate::types::FitResult;

/// Ordinary least squares of y on x. Params: `slope`, `intercept`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::domain("regression inputs differ in length"));
    }
    if x.len() < 2 {
        return Err(Error::InsufficientSample {
            what: "linear regression",
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::domain("regression needs at least two distinct x values"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fitted: Vec<f64> = x.iter().map(|v| intercept + slope * v).collect();
    let params = BTreeMap::from([("slope".to_string(), slope), ("intercept".to_string(), intercept)]);
    Ok(FitResult::from_fit(params, y, &fitted))
}

/// Least squares on (ln x, ln y) over the index window `range`.
pub fn fit_power_law(x: &[f64], y: &[f64], range: RangeInclusive<usize>) -> Result<FitResult> {
    if x.len() != y.len() {
        return Err(Error::domain("power-law inputs differ in length"));
    }
    let (lo, hi) = (*range.start(), (*range.end()).min(x.len().saturating_sub(1)));
    let count = if x.is_empty() || hi < lo { 0 } else { hi - lo + 1 };
    if count < 3 {
        return Err(Error::InsufficientSample {
            what: "power-law fit window",
            needed: 3,
            got: count,
        });
    }
    let (xs, ys) = (&x[lo..=hi], &y[lo..=hi]);
    if let Some(bad) = xs.iter().chain(ys).find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::domain(format!(
            "power-law fit needs positive values, found {bad}"
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}
