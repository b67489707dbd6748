//! File formats and ingestion.
//!
//! * tweet stream: one JSON object per line with `topic`, `author`, `time`,
//!   `is_retweet` and optional `retweeted_author`, `followers`, `tweet_rate`;
//!   unknown fields are ignored.
//! * trend appearances: CSV with header `topic,interval`.
//! * series: CSV with header `topic,interval,count,cumulative`.
//! * durations: CSV with header `topic,burn_in,duration,censored`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::metrics::Appearances;
use crate::types::{IntervalIndex, TopicSeries, TweetRecord};

/// Share of malformed lines above which a stream file is rejected.
pub const MAX_REJECTED_FRACTION: f64 = 0.10;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StreamFileSummary {
    /// Non-blank lines seen.
    pub records_read: usize,
    pub records_rejected: usize,
    /// Line number (1-based) and reason of every rejected line.
    pub rejections: Vec<(usize, String)>,
    pub topics: usize,
    /// Seconds between the earliest and latest accepted record.
    pub time_span: u64,
    pub first_timestamp: Option<u64>,
}

#[derive(Deserialize)]
struct RawRecord {
    topic: String,
    author: String,
    time: u64,
    is_retweet: bool,
    #[serde(default)]
    retweeted_author: Option<String>,
    #[serde(default)]
    followers: Option<u64>,
    #[serde(default)]
    tweet_rate: Option<f64>,
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

pub fn parse_stream(path: impl AsRef<Path>) -> Result<(Vec<TweetRecord>, StreamFileSummary)> {
    let path = path.as_ref();
    parse_stream_reader(BufReader::new(open(path)?), path)
}

/// Parses a stream from any reader; `path` is only used in error messages.
pub fn parse_stream_reader<R: BufRead>(reader: R, path: &Path) -> Result<(Vec<TweetRecord>, StreamFileSummary)> {
    let mut records = Vec::new();
    let mut summary = StreamFileSummary::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        summary.records_read += 1;
        let parsed = serde_json::from_str::<RawRecord>(&line)
            .map_err(|e| e.to_string())
            .and_then(|raw| {
                let record = TweetRecord {
                    topic: raw.topic,
                    author: raw.author,
                    time: raw.time,
                    is_retweet: raw.is_retweet,
                    retweeted_author: raw.retweeted_author,
                    followers: raw.followers,
                    tweet_rate: raw.tweet_rate,
                };
                record.validate().map(|_| record).map_err(|e| e.to_string())
            });
        match parsed {
            Ok(r) => records.push(r),
            Err(reason) => summary.rejections.push((idx + 1, reason)),
        }
    }
    summary.records_rejected = summary.rejections.len();
    if summary.records_rejected as f64 > MAX_REJECTED_FRACTION * summary.records_read as f64 {
        return Err(Error::CorruptInput {
            path: path.to_path_buf(),
            read: summary.records_read,
            rejected: summary.records_rejected,
            first_line: summary.rejections[0].0,
        });
    }
    summary.topics = records.iter().map(|r| r.topic.as_str()).collect::<BTreeSet<_>>().len();
    let first = records.iter().map(|r| r.time).min();
    let last = records.iter().map(|r| r.time).max();
    summary.first_timestamp = first;
    summary.time_span = match (first, last) {
        (Some(a), Some(b)) => b - a,
        _ => 0,
    };
    Ok((records, summary))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BinnedStream {
    pub series: BTreeMap<String, TopicSeries>,
    pub origin: u64,
    /// Records before the origin.
    pub rejected: usize,
}

/// Bins records into 20-minute intervals from `origin` (default: earliest
/// record) and builds one zero-filled series per topic, of length
/// max interval + 1.
pub fn bin_intervals(records: &[TweetRecord], origin: Option<u64>) -> BinnedStream {
    let origin = origin.or_else(|| records.iter().map(|r| r.time).min()).unwrap_or(0);
    let mut counts: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut rejected = 0;
    for r in records {
        let Some(IntervalIndex(i)) = IntervalIndex::from_time(r.time, origin) else {
            rejected += 1;
            continue;
        };
        let c = counts.entry(&r.topic).or_default();
        if c.len() <= i {
            c.resize(i + 1, 0.0);
        }
        c[i] += 1.0;
    }
    let series = counts
        .into_iter()
        .map(|(topic, c)| {
            let s = TopicSeries::from_counts(topic, c).expect("binned counts are non-negative");
            (topic.to_string(), s)
        })
        .collect();
    BinnedStream {
        series,
        origin,
        rejected,
    }
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader)
}

fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str], what: &'static str) -> Result<()> {
    let header = rdr.headers().map_err(|e| Error::Parse {
        what,
        line: 1,
        reason: e.to_string(),
    })?;
    if header.is_empty() {
        return Ok(());
    }
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(Error::Parse {
            what,
            line: 1,
            reason: format!("expected header {:?}, got {:?}", expected.join(","), got.join(",")),
        });
    }
    Ok(())
}

fn record_line(rec: &csv::StringRecord) -> usize {
    rec.position().map_or(0, |p| p.line() as usize)
}

/// Appearances per topic plus the number of rejected rows.
pub fn load_trend_appearances(path: impl AsRef<Path>) -> Result<(Appearances, usize)> {
    let path = path.as_ref();
    read_trend_appearances(open(path)?)
}

pub fn read_trend_appearances<R: Read>(reader: R) -> Result<(Appearances, usize)> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &["topic", "interval"], "trend appearances")?;
    let mut map: BTreeMap<String, BTreeSet<IntervalIndex>> = BTreeMap::new();
    let mut rejected = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            what: "trend appearances",
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let topic = rec.get(0).unwrap_or("");
        match rec.get(1).map(str::parse::<i64>) {
            Some(Ok(i)) if i >= 0 && !topic.is_empty() => {
                map.entry(topic.to_string())
                    .or_default()
                    .insert(IntervalIndex(i as usize));
            }
            _ => rejected += 1,
        }
    }
    Ok((
        map.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect(),
        rejected,
    ))
}

pub fn write_trend_appearances<W: Write>(writer: W, appearances: &Appearances) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "topic,interval")?;
    for (topic, intervals) in appearances {
        for i in intervals {
            writeln!(w, "{topic},{i}")?;
        }
    }
    w.flush()
}

pub fn write_stream<W: Write>(writer: W, records: &[TweetRecord]) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

/// Values are written in shortest round-trip form, so reading them back is exact.
pub fn write_series<W: Write>(writer: W, series: &[TopicSeries]) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "topic,interval,count,cumulative")?;
    for s in series {
        for (i, (c, n)) in s.counts().iter().zip(s.cumulative()).enumerate() {
            writeln!(w, "{},{i},{c},{n}", s.topic())?;
        }
    }
    w.flush()
}

pub fn load_series(path: impl AsRef<Path>) -> Result<Vec<TopicSeries>> {
    read_series(open(path.as_ref())?)
}

/// Rows of a topic must be contiguous and list intervals 0, 1, 2, ...
pub fn read_series<R: Read>(reader: R) -> Result<Vec<TopicSeries>> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &["topic", "interval", "count", "cumulative"], "series")?;
    let mut out = Vec::new();
    let mut current: Option<(String, Vec<f64>, Vec<f64>)> = None;
    let flush = |cur: Option<(String, Vec<f64>, Vec<f64>)>, out: &mut Vec<TopicSeries>| -> Result<()> {
        if let Some((topic, counts, cum)) = cur {
            out.push(TopicSeries::from_parts(topic, counts, cum)?);
        }
        Ok(())
    };
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            what: "series",
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = record_line(&rec);
        let bad = |reason: String| Error::Parse {
            what: "series",
            line,
            reason,
        };
        if rec.len() != 4 {
            return Err(bad(format!("expected 4 fields, got {}", rec.len())));
        }
        let interval: usize = rec[1].parse().map_err(|e| bad(format!("interval: {e}")))?;
        let count: f64 = rec[2].parse().map_err(|e| bad(format!("count: {e}")))?;
        let cum: f64 = rec[3].parse().map_err(|e| bad(format!("cumulative: {e}")))?;
        if current.as_ref().is_none_or(|(t, _, _)| t != &rec[0]) {
            flush(current.take(), &mut out)?;
            current = Some((rec[0].to_string(), Vec::new(), Vec::new()));
        }
        let (_, counts, cums) = current.as_mut().expect("set above");
        if interval != counts.len() {
            return Err(bad(format!("expected interval {}, got {interval}", counts.len())));
        }
        counts.push(count);
        cums.push(cum);
    }
    flush(current, &mut out)?;
    Ok(out)
}

/// One simulated topic's stop-rule result.
#[derive(Debug, Clone, PartialEq)]
pub struct DurationRow {
    pub topic: String,
    pub burn_in: usize,
    pub duration: u64,
    pub censored: bool,
}

pub fn write_durations<W: Write>(writer: W, rows: &[DurationRow]) -> std::io::Result<()> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "topic,burn_in,duration,censored")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", r.topic, r.burn_in, r.duration, r.censored)?;
    }
    w.flush()
}

pub fn load_durations(path: impl AsRef<Path>) -> Result<Vec<DurationRow>> {
    read_durations(open(path.as_ref())?)
}

pub fn read_durations<R: Read>(reader: R) -> Result<Vec<DurationRow>> {
    let mut rdr = csv_reader(reader);
    check_header(&mut rdr, &["topic", "burn_in", "duration", "censored"], "durations")?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            what: "durations",
            line: e.position().map_or(0, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        let line = record_line(&rec);
        let bad = |reason: String| Error::Parse {
            what: "durations",
            line,
            reason,
        };
        if rec.len() != 4 {
            return Err(bad(format!("expected 4 fields, got {}", rec.len())));
        }
        out.push(DurationRow {
            topic: rec[0].to_string(),
            burn_in: rec[1].parse().map_err(|e| bad(format!("burn_in: {e}")))?,
            duration: rec[2].parse().map_err(|e| bad(format!("duration: {e}")))?,
            censored: rec[3].parse().map_err(|e| bad(format!("censored: {e}")))?,
        });
    }
    Ok(out)
}

/// Creates `path` for writing, mapping failures to [`Error::Io`].
pub fn create_file(path: impl AsRef<Path>) -> Result<File> {
    let path = path.as_ref();
    File::create(path).map_err(|e| Error::io(path, e))
}

/// Runs a writer against a freshly created file.
pub fn write_file<F>(path: impl Into<PathBuf>, f: F) -> Result<()>
where
    F: FnOnce(File) -> std::io::Result<()>,
{
    let path = path.into();
    let file = create_file(&path)?;
    f(file).map_err(|e| Error::io(path, e))
}
