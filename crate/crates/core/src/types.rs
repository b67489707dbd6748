//! Domain types shared by the simulator, the estimators and the ingest layer.
//!
//! Everything here is immutable once constructed. Constructors validate the
//! invariants, so a value that exists is a value that is well formed.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of one time bin, in seconds (20 minutes).
pub const INTERVAL_SECONDS: u64 = 1200;

/// One tweet event. The text body is not retained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetRecord {
    pub topic: String,
    pub author: String,
    /// Seconds since the dataset epoch.
    pub time: u64,
    pub is_retweet: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retweeted_author: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub followers: Option<u64>,
    /// Tweets per day, when measured externally.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tweet_rate: Option<f64>,
}

impl TweetRecord {
    /// A plain (non-retweet) record.
    pub fn tweet(topic: impl Into<String>, author: impl Into<String>, time: u64) -> Result<Self> {
        let record = TweetRecord {
            topic: topic.into(),
            author: author.into(),
            time,
            is_retweet: false,
            retweeted_author: None,
            followers: None,
            tweet_rate: None,
        };
        record.validate()?;
        Ok(record)
    }

    /// A retweet crediting `source`.
    pub fn retweet(
        topic: impl Into<String>,
        author: impl Into<String>,
        time: u64,
        source: impl Into<String>,
    ) -> Result<Self> {
        let record = TweetRecord {
            topic: topic.into(),
            author: author.into(),
            time,
            is_retweet: true,
            retweeted_author: Some(source.into()),
            followers: None,
            tweet_rate: None,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        if self.topic.is_empty() {
            return Err(Error::domain("empty topic"));
        }
        if self.author.is_empty() {
            return Err(Error::domain("empty author"));
        }
        match (&self.retweeted_author, self.is_retweet) {
            (Some(_), false) => Err(Error::domain("retweeted_author set on a non-retweet")),
            (None, true) => Err(Error::domain("retweet without retweeted_author")),
            (Some(src), true) if src.is_empty() => Err(Error::domain("empty retweeted_author")),
            (Some(src), true) if *src == self.author => Err(Error::domain("retweet credits its own author")),
            _ => match self.tweet_rate {
                Some(r) if !(r.is_finite() && r >= 0.0) => {
                    Err(Error::domain("tweet_rate must be a non-negative number"))
                }
                _ => Ok(()),
            },
        }
    }

    /// The author credited by this record, if it is a retweet.
    pub fn credited(&self) -> Option<&str> {
        self.retweeted_author.as_deref()
    }
}

/// Index of a 20-minute bin relative to the dataset origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct IntervalIndex(pub usize);

impl IntervalIndex {
    /// Bin of `time` for a dataset starting at `origin`; `None` if `time < origin`.
    pub fn from_time(time: u64, origin: u64) -> Option<Self> {
        time.checked_sub(origin)
            .map(|offset| IntervalIndex((offset / INTERVAL_SECONDS) as usize))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl fmt::Display for IntervalIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<usize> for IntervalIndex {
    fn from(v: usize) -> Self {
        IntervalIndex(v)
    }
}

/// Running sum of interval counts.
pub fn cumulate(counts: &[u64]) -> Result<Vec<u64>> {
    if counts.is_empty() {
        return Err(Error::domain("cannot cumulate an empty count list"));
    }
    Ok(counts
        .iter()
        .scan(0u64, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect())
}

pub(crate) fn cumulate_real(counts: &[f64]) -> Vec<f64> {
    counts
        .iter()
        .scan(0.0, |acc, &c| {
            *acc += c;
            Some(*acc)
        })
        .collect()
}

/// Per-interval counts n(t) of one topic together with the cumulative N(t).
///
/// Counts are stored as reals: ingested series hold integral values, simulated
/// ones come straight out of a real-valued recursion.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicSeries {
    topic: String,
    counts: Vec<f64>,
    cumulative: Vec<f64>,
}

impl TopicSeries {
    pub fn from_counts(topic: impl Into<String>, counts: Vec<f64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::domain("series must cover at least one interval"));
        }
        if counts.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::domain("interval counts must be finite and non-negative"));
        }
        let cumulative = cumulate_real(&counts);
        Ok(TopicSeries {
            topic: topic.into(),
            counts,
            cumulative,
        })
    }

    /// Builds a series from N(t); n(0) = N(0), n(t) = N(t) - N(t-1).
    pub fn from_cumulative(topic: impl Into<String>, cumulative: Vec<f64>) -> Result<Self> {
        if cumulative.is_empty() {
            return Err(Error::domain("series must cover at least one interval"));
        }
        if cumulative.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::domain("cumulative counts must be finite and non-negative"));
        }
        if cumulative.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("cumulative counts must be non-decreasing"));
        }
        let counts = std::iter::once(cumulative[0])
            .chain(cumulative.windows(2).map(|w| w[1] - w[0]))
            .collect();
        Ok(TopicSeries {
            topic: topic.into(),
            counts,
            cumulative,
        })
    }

    /// Accepts both columns as stored in a series file, checking that they agree.
    pub fn from_parts(topic: impl Into<String>, counts: Vec<f64>, cumulative: Vec<f64>) -> Result<Self> {
        if counts.len() != cumulative.len() {
            return Err(Error::domain("counts and cumulative differ in length"));
        }
        let series = TopicSeries::from_cumulative(topic, cumulative)?;
        let consistent = series
            .counts
            .iter()
            .zip(&counts)
            .all(|(a, b)| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0));
        if !consistent {
            return Err(Error::domain(format!(
                "cumulative column of {:?} is not the running sum of its counts",
                series.topic
            )));
        }
        Ok(TopicSeries { counts, ..series })
    }

    pub fn topic(&self) -> &str {
        &self.topic
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("series is never empty")
    }

    /// C(t_i, t_j) = N(t_i) / N(t_j).
    pub fn ratio(&self, t_i: IntervalIndex, t_j: IntervalIndex) -> Result<f64> {
        if t_i <= t_j {
            return Err(Error::domain(format!("ratio needs t_i > t_j, got {t_i} <= {t_j}")));
        }
        if t_i.0 >= self.len() {
            return Err(Error::domain(format!(
                "interval {t_i} beyond series of length {}",
                self.len()
            )));
        }
        let denom = self.cumulative[t_j.0];
        if denom <= 0.0 {
            return Err(Error::UndefinedRatio { interval: t_j.0 });
        }
        Ok(self.cumulative[t_i.0] / denom)
    }

    /// The sub-series covering `[start, start + len)`; counts are re-cumulated
    /// from the window start.
    pub fn window(&self, start: usize, len: usize) -> Result<TopicSeries> {
        let end = start.checked_add(len).filter(|&e| e <= self.len() && len > 0);
        match end {
            Some(end) => TopicSeries::from_counts(self.topic.clone(), self.counts[start..end].to_vec()),
            None => Err(Error::domain(format!(
                "window [{start}, {start}+{len}) outside series of length {}",
                self.len()
            ))),
        }
    }
}

/// One contiguous trending run of a topic.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendSequence {
    pub topic: String,
    pub start: IntervalIndex,
    /// Number of trending intervals, at least 1.
    pub length: usize,
    /// Activity during the run, when counts are known.
    pub series: Option<TopicSeries>,
}

impl TrendSequence {
    pub fn new(topic: impl Into<String>, start: IntervalIndex, length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::domain("trend sequence length must be at least 1"));
        }
        Ok(TrendSequence {
            topic: topic.into(),
            start,
            length,
            series: None,
        })
    }

    pub fn with_series(mut self, series: TopicSeries) -> Self {
        self.series = Some(series);
        self
    }

    /// One past the last trending interval.
    pub fn end(&self) -> IntervalIndex {
        IntervalIndex(self.start.0 + self.length)
    }

    pub fn intervals(&self) -> impl Iterator<Item = IntervalIndex> {
        (self.start.0..self.end().0).map(IntervalIndex)
    }
}

/// Distribution family of the multiplicative noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Lognormal,
    Gamma,
    Degenerate,
}

impl NoiseKind {
    pub fn name(self) -> &'static str {
        match self {
            NoiseKind::Lognormal => "lognormal",
            NoiseKind::Gamma => "gamma",
            NoiseKind::Degenerate => "degenerate",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lognormal" => Ok(NoiseKind::Lognormal),
            "gamma" => Ok(NoiseKind::Gamma),
            "degenerate" => Ok(NoiseKind::Degenerate),
            other => Err(Error::domain(format!("unknown noise kind {other:?}"))),
        }
    }
}

/// Positive noise with mean 1 and variance `sigma2`.
///
/// * lognormal: exp(Z), Z ~ Normal(mu, s^2), s^2 = ln(1 + sigma2), mu = -s^2/2
/// * gamma: shape 1/sigma2, scale sigma2
/// * degenerate: identically 1
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub sigma2: f64,
}

impl NoiseSpec {
    pub fn new(kind: NoiseKind, sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return Err(Error::domain(format!("noise variance must be >= 0, got {sigma2}")));
        }
        match kind {
            NoiseKind::Degenerate if sigma2 != 0.0 => Err(Error::domain("degenerate noise requires sigma2 = 0")),
            NoiseKind::Lognormal | NoiseKind::Gamma if sigma2 == 0.0 => Err(Error::domain(format!(
                "{kind} noise requires sigma2 > 0; use degenerate for sigma2 = 0"
            ))),
            _ => Ok(NoiseSpec { kind, sigma2 }),
        }
    }

    pub fn degenerate() -> Self {
        NoiseSpec {
            kind: NoiseKind::Degenerate,
            sigma2: 0.0,
        }
    }

    pub fn lognormal(sigma2: f64) -> Result<Self> {
        NoiseSpec::new(NoiseKind::Lognormal, sigma2)
    }

    pub fn gamma(sigma2: f64) -> Result<Self> {
        NoiseSpec::new(NoiseKind::Gamma, sigma2)
    }

    /// (mu, s) of ln(xi) for lognormal noise. The degenerate case is the
    /// zero-width limit (0, 0).
    pub fn log_params(&self) -> Option<(f64, f64)> {
        match self.kind {
            NoiseKind::Lognormal => {
                let s2 = self.sigma2.ln_1p();
                Some((-0.5 * s2, s2.sqrt()))
            }
            NoiseKind::Degenerate => Some((0.0, 0.0)),
            NoiseKind::Gamma => None,
        }
    }
}

/// Simulator configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n_topics: usize,
    /// Number of growth steps; series have `n_intervals + 1` entries (t = 0..=n_intervals).
    pub n_intervals: usize,
    /// N(0).
    pub n0: f64,
    /// c in gamma(t) = c / t.
    pub gamma_c: f64,
    pub noise: NoiseSpec,
    /// Stop threshold on the growth statistic.
    pub theta: f64,
    /// Intervals exempt from the stop rule.
    pub burn_in: usize,
    /// Freeze gamma at c / t0 for all t >= t0 (constant-gamma survival mode).
    pub constant_gamma_after: Option<usize>,
    pub seed: u64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            n_topics: 1000,
            n_intervals: 96,
            n0: 5.0,
            gamma_c: 1.0,
            noise: NoiseSpec {
                kind: NoiseKind::Lognormal,
                sigma2: 0.25,
            },
            theta: 1.05,
            burn_in: 10,
            constant_gamma_after: None,
            seed: 1,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n_topics == 0 {
            return Err(Error::domain("n_topics must be positive"));
        }
        if self.n_intervals == 0 {
            return Err(Error::domain("n_intervals must be positive"));
        }
        if !(self.n0.is_finite() && self.n0 > 0.0) {
            return Err(Error::domain(format!("n0 must be positive, got {}", self.n0)));
        }
        if !(self.gamma_c.is_finite() && self.gamma_c >= 0.0) {
            return Err(Error::domain(format!("gamma scale must be >= 0, got {}", self.gamma_c)));
        }
        NoiseSpec::new(self.noise.kind, self.noise.sigma2)?;
        if !(self.theta.is_finite() && self.theta > 0.0) {
            return Err(Error::domain(format!("theta must be positive, got {}", self.theta)));
        }
        if self.theta >= 1.0 + self.gamma_c {
            return Err(Error::domain(format!(
                "theta = {} must be below 1 + c = {}",
                self.theta,
                1.0 + self.gamma_c
            )));
        }
        if self.burn_in >= self.n_intervals {
            return Err(Error::domain(format!(
                "burn-in {} must be shorter than the horizon {}",
                self.burn_in, self.n_intervals
            )));
        }
        if let Some(t0) = self.constant_gamma_after {
            if t0 == 0 {
                return Err(Error::domain("constant-gamma onset must be >= 1"));
            }
            if self.gamma_c == 0.0 {
                return Err(Error::domain("constant-gamma mode needs a positive gamma scale"));
            }
        }
        Ok(())
    }

    /// gamma(t) for t >= 1.
    pub fn gamma_at(&self, t: usize) -> f64 {
        debug_assert!(t >= 1);
        let t = match self.constant_gamma_after {
            Some(t0) => t.min(t0),
            None => t,
        };
        self.gamma_c / t as f64
    }

    /// The frozen gamma of the constant-gamma mode.
    pub fn gamma_inf(&self) -> Option<f64> {
        self.constant_gamma_after.map(|t0| self.gamma_c / t0 as f64)
    }
}

/// Output of a regression or likelihood fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: BTreeMap<String, f64>,
    pub r_squared: f64,
    pub residuals: Vec<f64>,
    pub n_points: usize,
}

impl FitResult {
    /// Builds a result from observed and fitted values; R^2 = 1 - SS_res/SS_tot,
    /// taken as 1 when the observations are constant.
    pub fn from_fit(params: BTreeMap<String, f64>, observed: &[f64], fitted: &[f64]) -> Self {
        debug_assert_eq!(observed.len(), fitted.len());
        let residuals: Vec<f64> = observed.iter().zip(fitted).map(|(o, f)| o - f).collect();
        FitResult {
            params,
            r_squared: r_squared(observed, &residuals),
            n_points: residuals.len(),
            residuals,
        }
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.get(name).copied()
    }
}

pub(crate) fn r_squared(observed: &[f64], residuals: &[f64]) -> f64 {
    let n = observed.len() as f64;
    let mean = observed.iter().sum::<f64>() / n;
    let ss_tot: f64 = observed.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    // Relative cutoff: constant inputs leave only rounding noise in ss_tot.
    let scale = observed.iter().map(|y| y * y).sum::<f64>().max(f64::MIN_POSITIVE);
    if ss_tot <= 1e-24 * scale {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    }
}

/// Cumulative ratios C(t_i, t_j) across topics.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSample {
    pub t_i: IntervalIndex,
    pub t_j: IntervalIndex,
    pub values: Vec<f64>,
    /// Topics left out because N(t_j) = 0 or the series was too short.
    pub excluded: usize,
}
