//! Multiplicative-noise growth with novelty decay.
//!
//! Each topic follows N(t) = [1 + gamma(t) xi(t)] N(t-1) with gamma(t) = c/t
//! and i.i.d. positive noise xi of mean 1. A topic stops trending the first
//! time its growth statistic drops below a threshold after a burn-in.
//!
//! Random draws are keyed by (seed, topic, t): every topic owns a ChaCha
//! stream and every step starts at a fixed offset inside it, so cohorts can
//! be generated in any order or in parallel with identical results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, LogNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{
    IntervalIndex, ModelParams, NoiseKind, NoiseSpec, TopicSeries, TrendSequence, TweetRecord, INTERVAL_SECONDS,
};

/// Upper bound on `n_topics * (n_intervals + 1)` for one cohort.
pub const MAX_COHORT_CELLS: usize = 1 << 30;

/// Upper bound on the records [`emit_cohort_records`] will materialize.
pub const MAX_EMITTED_RECORDS: usize = 50_000_000;

// Words reserved per step inside a topic stream; a draw never needs this many.
const WORDS_PER_STEP: u128 = 256;

const DOMAIN_NOISE: u64 = 0x6e6f_6973_6500_0001;
const DOMAIN_EMIT: u64 = 0x656d_6974_0000_0002;

/// Deterministic random stream for one (seed, domain, topic) triple.
#[derive(Debug, Clone)]
pub struct TopicStream {
    rng: ChaCha8Rng,
}

impl TopicStream {
    fn new(seed: u64, domain: u64, topic_id: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&domain.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(topic_id);
        TopicStream { rng }
    }

    /// Noise stream of a topic.
    pub fn noise(seed: u64, topic_id: u64) -> Self {
        TopicStream::new(seed, DOMAIN_NOISE, topic_id)
    }

    fn emission(seed: u64, topic_id: u64) -> Self {
        TopicStream::new(seed, DOMAIN_EMIT, topic_id)
    }

    /// Generator positioned at step `t`.
    pub fn at(&mut self, t: usize) -> &mut ChaCha8Rng {
        self.rng.set_word_pos(t as u128 * WORDS_PER_STEP);
        &mut self.rng
    }
}

/// A prepared noise distribution.
#[derive(Debug, Clone, Copy)]
pub enum NoiseSampler {
    Lognormal(LogNormal<f64>),
    Gamma(Gamma<f64>),
    Degenerate,
}

impl NoiseSampler {
    pub fn new(spec: &NoiseSpec) -> Result<Self> {
        let spec = NoiseSpec::new(spec.kind, spec.sigma2)?;
        match spec.kind {
            NoiseKind::Lognormal => {
                let (mu, s) = spec.log_params().expect("lognormal has log params");
                LogNormal::new(mu, s)
                    .map(NoiseSampler::Lognormal)
                    .map_err(|e| Error::domain(format!("lognormal noise: {e}")))
            }
            NoiseKind::Gamma => {
                let shape = 1.0 / spec.sigma2;
                Gamma::new(shape, 1.0 / shape)
                    .map(NoiseSampler::Gamma)
                    .map_err(|e| Error::domain(format!("gamma noise: {e}")))
            }
            NoiseKind::Degenerate => Ok(NoiseSampler::Degenerate),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            NoiseSampler::Lognormal(d) => d.sample(rng),
            NoiseSampler::Gamma(d) => d.sample(rng),
            NoiseSampler::Degenerate => 1.0,
        }
    }
}

/// One draw of xi.
pub fn sample_noise<R: Rng + ?Sized>(spec: &NoiseSpec, rng: &mut R) -> Result<f64> {
    Ok(NoiseSampler::new(spec)?.sample(rng))
}

pub fn topic_name(topic_id: usize) -> String {
    format!("topic{topic_id:05}")
}

/// Trajectory N(0..=n_intervals) of one topic.
pub fn simulate_topic(params: &ModelParams, topic_id: usize) -> Result<TopicSeries> {
    params.validate()?;
    if topic_id >= params.n_topics {
        return Err(Error::domain(format!(
            "topic id {topic_id} out of range for {} topics",
            params.n_topics
        )));
    }
    let sampler = NoiseSampler::new(&params.noise)?;
    Ok(simulate_validated(params, &sampler, topic_id))
}

fn simulate_validated(params: &ModelParams, sampler: &NoiseSampler, topic_id: usize) -> TopicSeries {
    let mut stream = TopicStream::noise(params.seed, topic_id as u64);
    let mut cumulative = Vec::with_capacity(params.n_intervals + 1);
    let mut n = params.n0;
    cumulative.push(n);
    for t in 1..=params.n_intervals {
        let xi = sampler.sample(stream.at(t));
        n *= 1.0 + params.gamma_at(t) * xi;
        cumulative.push(n);
    }
    TopicSeries::from_cumulative(topic_name(topic_id), cumulative)
        .expect("growth factors are positive, so N(t) is non-decreasing")
}

/// Which quantity the stop rule compares against the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthStatistic {
    /// phi_t = N(t) / N(t-1).
    Ratio,
    /// (phi_t - 1) / gamma, which equals xi_t exactly while gamma is constant.
    Excess { gamma: f64 },
}

impl GrowthStatistic {
    fn eval(self, prev: f64, cur: f64) -> f64 {
        // No activity at all counts as zero growth.
        let phi = if prev > 0.0 {
            cur / prev
        } else if cur > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        match self {
            GrowthStatistic::Ratio => phi,
            GrowthStatistic::Excess { gamma } => (phi - 1.0) / gamma,
        }
    }
}

/// Result of the stop rule on one series.
#[derive(Debug, Clone, PartialEq)]
pub struct StopOutcome {
    /// Trending run from interval 0 through the last surviving interval.
    pub sequence: TrendSequence,
    pub burn_in: usize,
    /// Surviving steps after the burn-in (L).
    pub duration: usize,
    /// True if the series ended before the statistic ever failed.
    pub censored: bool,
}

/// Threshold rule on phi_t = N(t)/N(t-1).
pub fn apply_stop_rule(series: &TopicSeries, theta: f64, burn_in: usize) -> Result<StopOutcome> {
    apply_stop_rule_with(series, theta, burn_in, GrowthStatistic::Ratio)
}

/// Scans t = burn_in+1, burn_in+2, ... and stops at the first step whose
/// statistic is below `theta`. Steps that passed before it make up the duration.
pub fn apply_stop_rule_with(
    series: &TopicSeries,
    theta: f64,
    burn_in: usize,
    statistic: GrowthStatistic,
) -> Result<StopOutcome> {
    if !(theta >= 0.0) {
        return Err(Error::domain(format!("theta must be non-negative, got {theta}")));
    }
    if burn_in >= series.len() {
        return Err(Error::domain(format!(
            "burn-in {burn_in} not shorter than series of length {}",
            series.len()
        )));
    }
    if let GrowthStatistic::Excess { gamma } = statistic {
        if !(gamma > 0.0) {
            return Err(Error::domain("excess-growth statistic needs gamma > 0"));
        }
    }
    let n = series.cumulative();
    let failed_at = (burn_in + 1..n.len()).find(|&t| statistic.eval(n[t - 1], n[t]) < theta);
    let (duration, censored) = match failed_at {
        Some(t) => (t - burn_in - 1, false),
        None => (n.len() - 1 - burn_in, true),
    };
    let length = burn_in + 1 + duration;
    let run = series.window(0, length)?;
    let sequence = TrendSequence::new(series.topic(), IntervalIndex(0), length)?.with_series(run);
    Ok(StopOutcome {
        sequence,
        burn_in,
        duration,
        censored,
    })
}

/// Series and stop outcomes of a cohort, ordered by topic id.
#[derive(Debug, Clone, PartialEq)]
pub struct Cohort {
    pub series: Vec<TopicSeries>,
    pub outcomes: Vec<StopOutcome>,
}

impl Cohort {
    /// Surviving durations of the topics that actually stopped.
    pub fn uncensored_durations(&self) -> Vec<u64> {
        self.outcomes
            .iter()
            .filter(|o| !o.censored)
            .map(|o| o.duration as u64)
            .collect()
    }
}

/// Stop statistic used by [`simulate_cohort`]: the raw growth ratio, or in
/// constant-gamma mode the recovered noise term.
pub fn cohort_statistic(params: &ModelParams) -> GrowthStatistic {
    match params.gamma_inf() {
        Some(gamma) => GrowthStatistic::Excess { gamma },
        None => GrowthStatistic::Ratio,
    }
}

pub fn simulate_cohort(params: &ModelParams) -> Result<Cohort> {
    params.validate()?;
    let cells = params
        .n_topics
        .checked_mul(params.n_intervals + 1)
        .filter(|&c| c <= MAX_COHORT_CELLS)
        .ok_or_else(|| {
            Error::ResourceLimit(format!(
                "{} topics x {} intervals exceeds {MAX_COHORT_CELLS} cells",
                params.n_topics,
                params.n_intervals + 1
            ))
        })?;
    debug_assert!(cells > 0);
    let sampler = NoiseSampler::new(&params.noise)?;
    let statistic = cohort_statistic(params);
    let results: Vec<(TopicSeries, StopOutcome)> = (0..params.n_topics)
        .into_par_iter()
        .map(|q| {
            let series = simulate_validated(params, &sampler, q);
            let outcome = apply_stop_rule_with(&series, params.theta, params.burn_in, statistic)?;
            Ok((series, outcome))
        })
        .collect::<Result<_>>()?;
    let (series, outcomes) = results.into_iter().unzip();
    Ok(Cohort { series, outcomes })
}

/// How simulated counts are turned into individual tweet records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionConfig {
    /// Distinct authors available to every topic.
    pub author_pool: usize,
    /// Probability that a tweet is a retweet of an earlier author of the topic.
    pub retweet_prob: f64,
    /// Epoch of interval 0.
    pub origin: u64,
}

impl Default for EmissionConfig {
    fn default() -> Self {
        EmissionConfig {
            author_pool: 500,
            retweet_prob: 0.3,
            origin: 0,
        }
    }
}

/// floor(x) + Bernoulli(frac(x)).
pub fn stochastic_round<R: Rng + ?Sized>(x: f64, rng: &mut R) -> u64 {
    let floor = x.floor();
    let frac = x - floor;
    floor as u64 + u64::from(rng.random::<f64>() < frac)
}

/// Integer tweet multiplicities of one series, one entry per interval.
pub fn integer_counts(series: &TopicSeries, seed: u64, topic_id: usize) -> Vec<u64> {
    let mut stream = TopicStream::emission(seed, topic_id as u64);
    series
        .counts()
        .iter()
        .enumerate()
        .map(|(t, &c)| stochastic_round(c, stream.at(2 * t)))
        .collect()
}

/// Tweet records realising a simulated series.
///
/// Interval t receives `stochastic_round(n(t))` tweets spread evenly over the
/// bin, the first one exactly at the bin start. Authors come from a shared
/// pool; a retweet credits an earlier, different author of the same topic.
pub fn emit_topic_records(
    series: &TopicSeries,
    seed: u64,
    topic_id: usize,
    config: &EmissionConfig,
) -> Result<Vec<TweetRecord>> {
    if config.author_pool < 2 {
        return Err(Error::domain("author pool needs at least two authors"));
    }
    if !(0.0..=1.0).contains(&config.retweet_prob) {
        return Err(Error::domain("retweet probability must lie in [0, 1]"));
    }
    let multiplicities = integer_counts(series, seed, topic_id);
    let mut stream = TopicStream::emission(seed, topic_id as u64);
    let mut seen: Vec<usize> = Vec::new();
    let mut is_seen = vec![false; config.author_pool];
    let mut records = Vec::new();
    for (t, &m) in multiplicities.iter().enumerate() {
        let rng = stream.at(2 * t + 1);
        let base = config.origin + t as u64 * INTERVAL_SECONDS;
        for j in 0..m {
            let time = base + j * INTERVAL_SECONDS / m;
            let author = rng.random_range(0..config.author_pool);
            let source = if !seen.is_empty() && rng.random::<f64>() < config.retweet_prob {
                let pick = seen[rng.random_range(0..seen.len())];
                (pick != author).then_some(pick)
            } else {
                None
            };
            if !is_seen[author] {
                is_seen[author] = true;
                seen.push(author);
            }
            let record = match source {
                Some(src) => TweetRecord::retweet(series.topic(), author_name(author), time, author_name(src))?,
                None => TweetRecord::tweet(series.topic(), author_name(author), time)?,
            };
            records.push(record);
        }
    }
    Ok(records)
}

fn author_name(id: usize) -> String {
    format!("user{id:06}")
}

/// Records of a whole cohort, topics in id order. Fails with
/// [`Error::ResourceLimit`] above [`MAX_EMITTED_RECORDS`] expected records.
pub fn emit_cohort_records(cohort: &Cohort, seed: u64, config: &EmissionConfig) -> Result<Vec<TweetRecord>> {
    let expected: f64 = cohort.series.iter().map(|s| s.total() + s.len() as f64).sum();
    if !(expected <= MAX_EMITTED_RECORDS as f64) {
        return Err(Error::ResourceLimit(format!(
            "emitting about {expected:.3e} records exceeds {MAX_EMITTED_RECORDS}"
        )));
    }
    let per_topic: Vec<Vec<TweetRecord>> = cohort
        .series
        .par_iter()
        .enumerate()
        .map(|(q, s)| emit_topic_records(s, seed, q, config))
        .collect::<Result<_>>()?;
    Ok(per_topic.into_iter().flatten().collect())
}
