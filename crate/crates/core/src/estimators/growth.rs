//! Cross-topic estimators on cumulative series: the decay factor gamma(t),
//! log cumulative ratios and the normalized curvature of N(t).

use crate::error::{Error, Result};
use crate::types::{IntervalIndex, RatioSample, TopicSeries};

/// Measured decay factor; intervals no topic covers are absent.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GammaSeries {
    pub t: Vec<IntervalIndex>,
    pub gamma: Vec<f64>,
}

impl GammaSeries {
    pub fn get(&self, t: usize) -> Option<f64> {
        self.t.binary_search(&IntervalIndex(t)).ok().map(|i| self.gamma[i])
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Positions of the entries with t in `[lo, hi]`, for windowed fits.
    pub fn index_window(&self, lo: usize, hi: usize) -> Option<std::ops::RangeInclusive<usize>> {
        let start = self.t.partition_point(|t| t.0 < lo);
        let end = self.t.partition_point(|t| t.0 <= hi);
        (end > start).then(|| start..=end - 1)
    }
}

/// gamma(t) = < N_q(t) / N_q(t-1) >_q - 1, averaged over topics that cover t
/// and have N_q(t-1) > 0.
pub fn measure_gamma(cohort: &[TopicSeries]) -> Result<GammaSeries> {
    if cohort.len() < 2 {
        return Err(Error::InsufficientSample {
            what: "gamma measurement topics",
            needed: 2,
            got: cohort.len(),
        });
    }
    if let Some(short) = cohort.iter().find(|s| s.len() < 2) {
        return Err(Error::domain(format!(
            "series {:?} is shorter than two intervals",
            short.topic()
        )));
    }
    let horizon = cohort.iter().map(TopicSeries::len).max().unwrap_or(0);
    let mut sums = vec![0.0; horizon];
    let mut counts = vec![0usize; horizon];
    for s in cohort {
        let n = s.cumulative();
        for t in 1..n.len() {
            if n[t - 1] > 0.0 {
                sums[t] += n[t] / n[t - 1];
                counts[t] += 1;
            }
        }
    }
    let mut out = GammaSeries::default();
    for t in 1..horizon {
        if counts[t] > 0 {
            out.t.push(IntervalIndex(t));
            out.gamma.push(sums[t] / counts[t] as f64 - 1.0);
        }
    }
    Ok(out)
}

/// Minimum number of qualifying topics for a log-ratio sample.
pub const MIN_RATIO_TOPICS: usize = 10;

/// ln C_q(t_i, t_j) over the topics where it is defined.
pub fn log_ratio_sample(cohort: &[TopicSeries], t_i: IntervalIndex, t_j: IntervalIndex) -> Result<RatioSample> {
    if t_i <= t_j {
        return Err(Error::domain(format!("log ratio needs t_i > t_j, got {t_i} <= {t_j}")));
    }
    let mut values = Vec::with_capacity(cohort.len());
    let mut excluded = 0;
    for s in cohort {
        match s.ratio(t_i, t_j) {
            Ok(c) => values.push(c.ln()),
            Err(_) => excluded += 1,
        }
    }
    if values.len() < MIN_RATIO_TOPICS {
        return Err(Error::InsufficientSample {
            what: "log-ratio topics",
            needed: MIN_RATIO_TOPICS,
            got: values.len(),
        });
    }
    Ok(RatioSample {
        t_i,
        t_j,
        values,
        excluded,
    })
}

/// Cross-topic mean of the normalized second difference at one interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvaturePoint {
    pub t: IntervalIndex,
    pub mean: f64,
    pub topics: usize,
}

/// Per topic, d2(t) = N(t+1) - 2N(t) + N(t-1) divided by the topic's mean
/// cumulative count; returns the mean over topics for every interior t.
/// Series shorter than `max(3, min_duration)` are skipped.
pub fn normalized_second_derivative(cohort: &[TopicSeries], min_duration: usize) -> Result<Vec<CurvaturePoint>> {
    let min_len = min_duration.max(3);
    let included: Vec<&TopicSeries> = cohort
        .iter()
        .filter(|s| s.len() >= min_len && s.total() > 0.0)
        .collect();
    if included.is_empty() {
        return Err(Error::InsufficientSample {
            what: "topics for curvature",
            needed: 1,
            got: 0,
        });
    }
    let horizon = included.iter().map(|s| s.len()).max().unwrap_or(0);
    let mut sums = vec![0.0; horizon];
    let mut counts = vec![0usize; horizon];
    for s in included {
        let n = s.cumulative();
        let scale = n.iter().sum::<f64>() / n.len() as f64;
        for t in 1..n.len() - 1 {
            sums[t] += (n[t + 1] - 2.0 * n[t] + n[t - 1]) / scale;
            counts[t] += 1;
        }
    }
    Ok((1..horizon.saturating_sub(1))
        .filter(|&t| counts[t] > 0)
        .map(|t| CurvaturePoint {
            t: IntervalIndex(t),
            mean: sums[t] / counts[t] as f64,
            topics: counts[t],
        })
        .collect())
}
