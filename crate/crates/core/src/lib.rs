//! Stochastic dynamics of trending topics.
//!
//! `trendlab` simulates topic popularity under a multiplicative growth model
//! with novelty decay, N(t) = [1 + gamma(t) xi(t)] N(t-1), and provides the
//! estimators needed to recover its signatures from simulated or ingested
//! event streams: the 1/t decay of gamma, log-normal cumulative ratios,
//! linear cumulative growth, geometric trend durations, and author and
//! retweet metrics.
//!
//! Modules:
//! * [`types`]: domain types shared by everything else
//! * [`sim`]: cohort simulation and the threshold stop rule
//! * [`estimators`]: fits, diagnostics and survival algebra
//! * [`metrics`]: sequence splitting and author/retweet metrics
//! * [`ingest`]: file formats, parsing and time binning

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod estimators;
pub mod ingest;
pub mod metrics;
pub mod sim;
pub mod types;

pub use error::{Error, Result};

/// Library version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use types::{
    cumulate, FitResult, IntervalIndex, ModelParams, NoiseKind, NoiseSpec, RatioSample, TopicSeries, TrendSequence,
    TweetRecord, INTERVAL_SECONDS,
};
