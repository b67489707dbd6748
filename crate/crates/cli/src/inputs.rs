//! Locating analysis inputs in a directory or a single file.

use std::fs::File;
use std::io::{BufRead, BufReader, ErrorKind};
use std::path::{Path, PathBuf};

use trendlab::ingest::{bin_intervals, load_durations, load_series, load_trend_appearances, parse_stream, DurationRow};
use trendlab::metrics::Appearances;
use trendlab::{Error, Result, TopicSeries, TweetRecord};

pub const STREAM_FILE: &str = "stream.jsonl";
pub const SERIES_FILE: &str = "series.csv";
pub const DURATIONS_FILE: &str = "trend_durations.csv";
pub const APPEARANCES_FILE: &str = "appearances.csv";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Inputs {
    pub root: PathBuf,
    pub series: Option<PathBuf>,
    pub stream: Option<PathBuf>,
    pub durations: Option<PathBuf>,
    pub appearances: Option<PathBuf>,
}

fn io_error(path: &Path, kind: ErrorKind, msg: &str) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::new(kind, msg.to_string()),
    }
}

impl Inputs {
    /// A directory is searched for the standard file names; a single file is
    /// classified by its first line.
    pub fn resolve(path: &Path) -> Result<Inputs> {
        let mut inputs = Inputs {
            root: path.to_path_buf(),
            ..Inputs::default()
        };
        if path.is_dir() {
            let found = |name: &str| Some(path.join(name)).filter(|p| p.is_file());
            inputs.series = found(SERIES_FILE);
            inputs.stream = found(STREAM_FILE);
            inputs.durations = found(DURATIONS_FILE);
            inputs.appearances = found(APPEARANCES_FILE);
            return Ok(inputs);
        }
        let file = File::open(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        let first = BufReader::new(file)
            .lines()
            .map_while(std::io::Result::ok)
            .map(|l| l.trim().to_string())
            .find(|l| !l.is_empty() && !l.starts_with('#'))
            .unwrap_or_default();
        let slot = if first.starts_with('{') {
            &mut inputs.stream
        } else if first.starts_with("topic,interval,count") {
            &mut inputs.series
        } else if first.starts_with("topic,burn_in") {
            &mut inputs.durations
        } else if first.starts_with("topic,interval") {
            &mut inputs.appearances
        } else {
            return Err(io_error(path, ErrorKind::InvalidData, "unrecognized input file"));
        };
        *slot = Some(path.to_path_buf());
        Ok(inputs)
    }

    fn missing(&self, name: &str) -> Error {
        let path = if self.root.is_dir() {
            self.root.join(name)
        } else {
            self.root.clone()
        };
        io_error(&path, ErrorKind::NotFound, &format!("required input {name} not found"))
    }

    /// Cumulative series: the series file if present, else the binned stream.
    pub fn cohort(&self) -> Result<Vec<TopicSeries>> {
        if let Some(p) = &self.series {
            return load_series(p);
        }
        let records = self.stream()?;
        Ok(bin_intervals(&records, None).series.into_values().collect())
    }

    pub fn stream(&self) -> Result<Vec<TweetRecord>> {
        let p = self.stream.as_ref().ok_or_else(|| self.missing(STREAM_FILE))?;
        Ok(parse_stream(p)?.0)
    }

    pub fn appearances(&self) -> Result<Appearances> {
        let p = self
            .appearances
            .as_ref()
            .ok_or_else(|| self.missing(APPEARANCES_FILE))?;
        Ok(load_trend_appearances(p)?.0)
    }

    /// Stop-rule durations, or trend sequence lengths when only appearances exist.
    pub fn durations(&self) -> Result<Vec<DurationRow>> {
        if let Some(p) = &self.durations {
            return load_durations(p);
        }
        if self.appearances.is_none() {
            return Err(self.missing(DURATIONS_FILE));
        }
        Ok(trendlab::metrics::split_sequences(&self.appearances()?)
            .into_iter()
            .map(|s| DurationRow {
                topic: s.topic,
                burn_in: 0,
                duration: s.length as u64,
                censored: false,
            })
            .collect())
    }
}
