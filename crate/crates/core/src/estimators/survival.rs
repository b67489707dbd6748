//! Trend persistence: the per-step stop probability p = F(ln theta) of the
//! threshold rule, its inverse, and geometric fits to observed durations.
//!
//! F is the CDF of ln(xi). Under lognormal noise ln(xi) ~ Normal(mu, s^2), so
//! p = Phi((ln theta - mu) / s) and theta = exp(mu + s * Phi^-1(p)).

use std::collections::BTreeMap;

use super::normal::{normal_cdf, normal_quantile};
use super::regression::linear_fit;
use crate::error::{Error, Result};
use crate::types::{FitResult, NoiseKind, NoiseSpec};

/// Observed trend durations (in intervals), all at least `truncation`.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationSample {
    durations: Vec<u64>,
    truncation: u64,
}

impl DurationSample {
    pub fn new(durations: Vec<u64>, truncation: u64) -> Result<Self> {
        if let Some(d) = durations.iter().find(|&&d| d < truncation) {
            return Err(Error::domain(format!("duration {d} below truncation {truncation}")));
        }
        Ok(DurationSample { durations, truncation })
    }

    /// Keeps only durations >= `truncation`.
    pub fn truncated(durations: impl IntoIterator<Item = u64>, truncation: u64) -> Self {
        DurationSample {
            durations: durations.into_iter().filter(|&d| d >= truncation).collect(),
            truncation,
        }
    }

    pub fn durations(&self) -> &[u64] {
        &self.durations
    }

    pub fn truncation(&self) -> u64 {
        self.truncation
    }

    pub fn len(&self) -> usize {
        self.durations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.durations.is_empty()
    }

    /// Durations measured from the truncation point.
    pub fn shifted(&self) -> impl Iterator<Item = u64> + '_ {
        self.durations.iter().map(move |d| d - self.truncation)
    }

    /// Counts of shifted durations 0..=max.
    pub fn histogram(&self) -> Vec<u64> {
        let max = self.shifted().max().map_or(0, |m| m as usize + 1);
        let mut h = vec![0u64; max];
        for k in self.shifted() {
            h[k as usize] += 1;
        }
        h
    }
}

/// Pr(xi < theta) for the noise, i.e. F(ln theta).
pub fn stop_probability(theta: f64, noise: &NoiseSpec) -> Result<f64> {
    if !(theta > 0.0) {
        return Err(Error::domain(format!("theta must be positive, got {theta}")));
    }
    let noise = NoiseSpec::new(noise.kind, noise.sigma2)?;
    match noise.kind {
        NoiseKind::Lognormal => {
            let (mu, s) = noise.log_params().expect("lognormal has log params");
            Ok(normal_cdf((theta.ln() - mu) / s))
        }
        NoiseKind::Degenerate => Ok(if theta > 1.0 { 1.0 } else { 0.0 }),
        NoiseKind::Gamma => Err(Error::UnsupportedAnalyticForm("gamma")),
    }
}

/// theta = exp(F^-1(p)): the threshold whose per-step stop probability is `p`.
pub fn survival_threshold(p: f64, noise: &NoiseSpec) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("stop probability must lie in (0, 1), got {p}")));
    }
    let noise = NoiseSpec::new(noise.kind, noise.sigma2)?;
    match noise.kind {
        NoiseKind::Lognormal => {
            let (mu, s) = noise.log_params().expect("lognormal has log params");
            Ok((mu + s * normal_quantile(p)?).exp())
        }
        NoiseKind::Degenerate => Err(Error::domain(
            "degenerate noise has no threshold for a stop probability strictly inside (0, 1)",
        )),
        NoiseKind::Gamma => Err(Error::UnsupportedAnalyticForm("gamma")),
    }
}

/// Fraction of noise draws below `theta`: the empirical F(ln theta).
pub fn empirical_stop_probability(theta: f64, draws: &[f64]) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::InsufficientSample {
            what: "noise draws",
            needed: 1,
            got: 0,
        });
    }
    Ok(draws.iter().filter(|&&x| x < theta).count() as f64 / draws.len() as f64)
}

/// <L> = 1/p - 1.
pub fn expected_duration(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("expected duration needs p in (0, 1), got {p}")));
    }
    Ok(1.0 / p - 1.0)
}

/// Pr(L = k) = (1 - p)^k p.
pub fn geometric_pmf(p: f64, k: u64) -> f64 {
    (1.0 - p).powf(k as f64) * p
}

/// Log-likelihood of shifted durations under the geometric law.
pub fn geometric_log_likelihood(p: f64, shifted: &[u64]) -> f64 {
    let total: u64 = shifted.iter().sum();
    let n = shifted.len() as f64;
    let tail = if total == 0 { 0.0 } else { total as f64 * (1.0 - p).ln() };
    n * p.ln() + tail
}

/// Geometric MLE after shifting by the truncation (memorylessness):
/// p = 1 / (1 + mean shifted duration).
///
/// Params: `p`, `mean` (shifted), and `tail_r_squared` when the log-density
/// line of [`fit_exponential_tail`] is estimable. Residuals and R^2 compare
/// the empirical frequencies of k = 0..=max with the fitted pmf.
pub fn fit_geometric(sample: &DurationSample) -> Result<FitResult> {
    if sample.is_empty() {
        return Err(Error::InsufficientSample {
            what: "durations",
            needed: 1,
            got: 0,
        });
    }
    let n = sample.len() as f64;
    let mean = sample.shifted().sum::<u64>() as f64 / n;
    let p = 1.0 / (1.0 + mean);
    let hist = sample.histogram();
    let observed: Vec<f64> = hist.iter().map(|&c| c as f64 / n).collect();
    let fitted: Vec<f64> = (0..hist.len() as u64).map(|k| geometric_pmf(p, k)).collect();
    let mut params = BTreeMap::from([("p".to_string(), p), ("mean".to_string(), mean)]);
    if let Ok(tail) = fit_exponential_tail(sample, hist.len()) {
        params.insert("tail_r_squared".to_string(), tail.r_squared);
    }
    Ok(FitResult::from_fit(params, &observed, &fitted))
}

/// Least-squares line through (k, ln density) over the non-empty unit bins
/// k = 0..bins of the shifted durations. For a geometric law the slope is
/// ln(1 - p). Params: `slope`, `intercept`, and `p` = 1 - exp(slope).
pub fn fit_exponential_tail(sample: &DurationSample, bins: usize) -> Result<FitResult> {
    if bins == 0 {
        return Err(Error::domain("histogram needs at least one bin"));
    }
    let n = sample.len() as f64;
    let hist = sample.histogram();
    let (ks, ln_density): (Vec<f64>, Vec<f64>) = hist
        .iter()
        .take(bins)
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (k as f64, (c as f64 / n).ln()))
        .unzip();
    if ks.len() < 3 {
        return Err(Error::InsufficientSample {
            what: "non-empty histogram bins",
            needed: 3,
            got: ks.len(),
        });
    }
    let mut fit = linear_fit(&ks, &ln_density)?;
    let slope = fit.params["slope"];
    fit.params.insert("p".to_string(), 1.0 - slope.exp());
    Ok(fit)
}

/// Per-step stop frequency: stops / evaluated steps. Every topic contributes
/// its surviving steps, and a stopped topic one failing step on top.
pub fn stop_frequency(durations: &[(u64, bool)]) -> Result<f64> {
    let stops = durations.iter().filter(|(_, censored)| !censored).count() as u64;
    let steps: u64 = durations.iter().map(|(d, _)| d).sum::<u64>() + stops;
    if steps == 0 {
        return Err(Error::InsufficientSample {
            what: "evaluated steps",
            needed: 1,
            got: 0,
        });
    }
    Ok(stops as f64 / steps as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lognormal(s2: f64) -> NoiseSpec {
        NoiseSpec::lognormal(s2).unwrap()
    }

    #[test]
    fn median_threshold_is_half() {
        let noise = lognormal(0.25);
        let (mu, _) = noise.log_params().unwrap();
        assert!((stop_probability(mu.exp(), &noise).unwrap() - 0.5).abs() < 1e-15);
        assert!((survival_threshold(0.5, &noise).unwrap() - mu.exp()).abs() < 1e-15);
    }

    #[test]
    fn tiny_threshold_never_stops() {
        assert!(stop_probability(1e-12, &lognormal(0.25)).unwrap() < 1e-12);
        assert!(stop_probability(0.0, &lognormal(0.25)).is_err());
    }

    #[test]
    fn threshold_for_twelve_percent() {
        let noise = lognormal(0.25);
        let theta = survival_threshold(0.12, &noise).unwrap();
        // s^2 = ln 1.25, mu = -s^2/2, Phi^-1(0.12) = -1.1749867920660900 (mpmath).
        let s2 = 1.25f64.ln();
        let by_hand = (-0.5 * s2 + s2.sqrt() * -1.174_986_792_066_09).exp();
        assert!((theta - by_hand).abs() < 1e-12);
        assert!((theta - 0.5134).abs() < 1e-3);
        assert!((stop_probability(theta, &noise).unwrap() - 0.12).abs() < 1e-9);
    }

    #[test]
    fn round_trips() {
        for s2 in [0.05, 0.25, 1.0] {
            for p in [0.01, 0.12, 0.5, 0.9] {
                let theta = survival_threshold(p, &lognormal(s2)).unwrap();
                assert!((stop_probability(theta, &lognormal(s2)).unwrap() - p).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn unsupported_and_invalid() {
        let g = NoiseSpec::gamma(0.25).unwrap();
        assert!(matches!(
            stop_probability(0.5, &g),
            Err(Error::UnsupportedAnalyticForm(_))
        ));
        assert!(matches!(
            survival_threshold(0.5, &g),
            Err(Error::UnsupportedAnalyticForm(_))
        ));
        for p in [0.0, 1.0, -0.5, 2.0] {
            assert!(matches!(survival_threshold(p, &lognormal(0.25)), Err(Error::Domain(_))));
        }
        assert_eq!(stop_probability(1.5, &NoiseSpec::degenerate()).unwrap(), 1.0);
        assert_eq!(stop_probability(0.5, &NoiseSpec::degenerate()).unwrap(), 0.0);
    }

    #[test]
    fn expected_duration_values() {
        assert!((expected_duration(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((expected_duration(0.12).unwrap() - 22.0 / 3.0).abs() < 1e-12);
        assert!(expected_duration(1.0 - 1e-12).unwrap() < 1e-11);
        assert!(expected_duration(1.0).is_err());
        assert!(expected_duration(0.0).is_err());
    }

    #[test]
    fn geometric_all_at_truncation() {
        let s = DurationSample::new(vec![10; 12], 10).unwrap();
        assert_eq!(fit_geometric(&s).unwrap().param("p"), Some(1.0));
    }

    #[test]
    fn geometric_mean_twenty_two_thirds() {
        // Shifted durations summing to 22 over 3 topics: mean 22/3.
        let s = DurationSample::new(vec![10 + 7, 10 + 7, 10 + 8], 10).unwrap();
        let fit = fit_geometric(&s).unwrap();
        assert!((fit.param("p").unwrap() - 0.12).abs() < 1e-12);
        assert_eq!(fit.n_points, fit.residuals.len());
    }

    #[test]
    fn geometric_rejects_empty_and_below_truncation() {
        assert!(fit_geometric(&DurationSample::new(vec![], 0).unwrap()).is_err());
        assert!(DurationSample::new(vec![3, 9], 5).is_err());
        assert_eq!(DurationSample::truncated([3, 9, 5], 5).durations(), &[9, 5]);
    }

    fn geometric_counts_p02() -> DurationSample {
        // Counts 5^(4-k) 4^k are exactly proportional to 0.8^k.
        let counts = [625u64, 500, 400, 320, 256];
        let durations = counts
            .iter()
            .enumerate()
            .flat_map(|(k, &c)| std::iter::repeat_n(k as u64, c as usize))
            .collect();
        DurationSample::new(durations, 0).unwrap()
    }

    #[test]
    fn exponential_tail_exact() {
        let fit = fit_exponential_tail(&geometric_counts_p02(), 5).unwrap();
        assert!((fit.param("slope").unwrap() - 0.8f64.ln()).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.param("p").unwrap() - 0.2).abs() < 1e-9);
    }

    #[test]
    fn exponential_tail_flat_and_sparse() {
        let flat = DurationSample::new(vec![0, 1, 2, 3, 0, 1, 2, 3], 0).unwrap();
        let fit = fit_exponential_tail(&flat, 10).unwrap();
        assert!(fit.param("slope").unwrap().abs() < 1e-12);
        let sparse = DurationSample::new(vec![0, 0, 5], 0).unwrap();
        assert!(matches!(
            fit_exponential_tail(&sparse, 10),
            Err(Error::InsufficientSample { got: 2, .. })
        ));
        // Bins beyond the window are ignored.
        assert!(fit_exponential_tail(&geometric_counts_p02(), 2).is_err());
    }

    #[test]
    fn stop_frequency_counts_steps() {
        // Two stopped topics (2 and 0 survivals) and one censored after 3: 2 stops in 2+0+3+2 steps.
        let f = stop_frequency(&[(2, false), (0, false), (3, true)]).unwrap();
        assert!((f - 2.0 / 7.0).abs() < 1e-15);
        assert!(stop_frequency(&[]).is_err());
    }
}
