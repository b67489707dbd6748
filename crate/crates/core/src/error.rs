use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by trendlab operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A cumulative ratio with a zero denominator.
    #[error("undefined ratio: cumulative count at interval {interval} is zero")]
    UndefinedRatio { interval: usize },

    #[error("insufficient sample: need at least {needed}, got {got} ({what})")]
    InsufficientSample {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    /// Pearson correlation of a constant column.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("undefined domination ratio: topic {topic:?} has no retweets")]
    UndefinedDomination { topic: String },

    /// The noise family has no closed-form CDF available.
    #[error("no analytic stop probability for {0} noise; use an empirical CDF")]
    UnsupportedAnalyticForm(&'static str),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corrupt input {path}: {rejected} of {read} lines malformed (first at line {first_line})")]
    CorruptInput {
        path: PathBuf,
        read: usize,
        rejected: usize,
        first_line: usize,
    },

    #[error("malformed {what} at line {line}: {reason}")]
    Parse {
        what: &'static str,
        line: usize,
        reason: String,
    },

    #[error("resource limit: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
