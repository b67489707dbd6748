//! `trendlab analyze <analysis>`

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use trendlab::estimators::{
    expected_duration, fit_exponential_tail, fit_geometric, fit_power_law, gaussian_kde_with_bandwidth, geometric_pmf,
    kde_grid, log_ratio_sample, measure_gamma, moment_normality, normalized_second_derivative, qq_max_deviation,
    qq_points, silverman_bandwidth, stop_frequency, CurvaturePoint, DurationSample,
};
use trendlab::metrics::{
    author_stats, correlation_report, first_k_initiators, sequence_distributions, split_sequences, top_retweeted,
    topic_metrics, CorrelationEntry, CORRELATION_PAIRS,
};
use trendlab::{Error, IntervalIndex, TopicSeries};

use crate::inputs::Inputs;
use crate::table::{num, Table};
use crate::{Analysis, AnalyzeArgs, CliError, CliResult};

pub const RETWEETERS_FILE: &str = "retweeters.csv";

/// Runs one analysis (or all six) and returns the tables written.
pub fn run(args: &AnalyzeArgs) -> CliResult<Vec<PathBuf>> {
    if args.ratio_times.len() != 2 {
        return Err(CliError::Usage("--ratio-times takes two intervals".into()));
    }
    if args.fit_from > args.fit_to {
        return Err(CliError::Usage("--fit-from must not exceed --fit-to".into()));
    }
    let inputs = Inputs::resolve(&args.input)?;
    std::fs::create_dir_all(&args.out).map_err(|e| Error::Io {
        path: args.out.clone(),
        source: e,
    })?;
    let selected: Vec<Analysis> = match args.analysis {
        Analysis::All => Analysis::SECTIONS.to_vec(),
        one => vec![one],
    };
    let mut written = Vec::new();
    let needs_series = selected
        .iter()
        .any(|a| matches!(a, Analysis::Gamma | Analysis::Ratios | Analysis::Curvature));
    let cohort = if needs_series { inputs.cohort()? } else { Vec::new() };
    for analysis in selected {
        let table = match analysis {
            Analysis::Gamma => gamma(&cohort, args)?,
            Analysis::Ratios => ratios(&cohort, args)?,
            Analysis::Curvature => curvature(&cohort, &inputs, args)?,
            Analysis::Durations => durations(&inputs, args)?,
            Analysis::Sequences => sequences(&inputs)?,
            Analysis::Metrics => {
                let (table, retweeters) = metrics(&inputs, args)?;
                let path = args.out.join(RETWEETERS_FILE);
                retweeters.write_to(&path)?;
                written.push(path);
                table
            }
            Analysis::All => unreachable!(),
        };
        let path = args.out.join(analysis.file_name());
        table.write_to(&path)?;
        println!("{} -> {}", analysis.name(), path.display());
        written.push(path);
    }
    Ok(written)
}

pub fn gamma(cohort: &[TopicSeries], args: &AnalyzeArgs) -> trendlab::Result<Table> {
    let g = measure_gamma(cohort)?;
    let t: Vec<f64> = g.t.iter().map(|t| t.0 as f64).collect();
    let window = g
        .index_window(args.fit_from, args.fit_to)
        .ok_or(Error::InsufficientSample {
            what: "gamma points in the fit range",
            needed: 3,
            got: 0,
        })?;
    let fit = fit_power_law(&t, &g.gamma, window.clone())?;
    let (slope, intercept) = (fit.params["slope"], fit.params["intercept"]);
    let mut table = Table::new(&["t", "gamma", "fitted"]);
    table
        .meta("topics", cohort.len())
        .meta("slope", num(slope))
        .meta("intercept", num(intercept))
        .meta("r_squared", num(fit.r_squared))
        .meta("fit_from", g.t[*window.start()])
        .meta("fit_to", g.t[*window.end()])
        .meta("fit_points", fit.n_points);
    for (ti, gi) in t.iter().zip(&g.gamma) {
        table.row(vec![num(*ti), num(*gi), num(intercept.exp() * ti.powf(slope))]);
    }
    Ok(table)
}

pub fn ratios(cohort: &[TopicSeries], args: &AnalyzeArgs) -> trendlab::Result<Table> {
    let (late, early) = (args.ratio_times[0], args.ratio_times[1]);
    let sample = log_ratio_sample(cohort, IntervalIndex(late), IntervalIndex(early))?;
    let values = &sample.values;
    let moments = moment_normality(values)?;
    let qq = qq_points(values)?;
    let bandwidth = silverman_bandwidth(values)?;
    let grid = kde_grid(values, args.kde_points, 3.0)?;
    let density = gaussian_kde_with_bandwidth(values, &grid, bandwidth)?;

    let mut table = Table::new(&["kind", "x", "y"]);
    table
        .meta("t_late", late)
        .meta("t_early", early)
        .meta("n", values.len())
        .meta("excluded", sample.excluded)
        .meta("skewness", num(moments.skewness))
        .meta("excess_kurtosis", num(moments.excess_kurtosis))
        .meta("qq_max_dev_central95", num(qq_max_deviation(&qq, 0.95)))
        .meta("bandwidth", num(bandwidth));
    for v in values {
        table.row(vec!["value".into(), num(*v), String::new()]);
    }
    for (x, y) in grid.iter().zip(&density) {
        table.row(vec!["kde".into(), num(*x), num(*y)]);
    }
    for (q, x) in &qq {
        table.row(vec!["qq".into(), num(*q), num(*x)]);
    }
    Ok(table)
}

/// Mean normalized second difference over all topics and over topics that
/// trended for at least `min_duration` intervals (series length when no
/// trend data is available).
pub fn curvature(cohort: &[TopicSeries], inputs: &Inputs, args: &AnalyzeArgs) -> trendlab::Result<Table> {
    let all = normalized_second_derivative(cohort, 0)?;
    let mut trended: Option<HashMap<String, u64>> = None;
    if inputs.appearances.is_some() {
        let mut total = HashMap::new();
        for s in split_sequences(&inputs.appearances()?) {
            *total.entry(s.topic).or_default() += s.length as u64;
        }
        trended = Some(total);
    } else if inputs.durations.is_some() {
        // burn-in, the step that started the count, then the surviving steps
        let rows = inputs.durations()?;
        trended = Some(
            rows.into_iter()
                .map(|r| (r.topic, r.burn_in as u64 + 1 + r.duration))
                .collect(),
        );
    }
    let filtered = match &trended {
        Some(total) => {
            let keep: Vec<TopicSeries> = cohort
                .iter()
                .filter(|s| total.get(s.topic()).is_some_and(|&d| d >= args.min_duration as u64))
                .cloned()
                .collect();
            normalized_second_derivative(&keep, 0).unwrap_or_default()
        }
        None => normalized_second_derivative(cohort, args.min_duration).unwrap_or_default(),
    };
    let by_t: BTreeMap<usize, &CurvaturePoint> = filtered.iter().map(|p| (p.t.0, p)).collect();
    let mut table = Table::new(&["t", "mean_all", "topics_all", "mean_filtered", "topics_filtered"]);
    let max_abs = all
        .iter()
        .filter(|p| p.t.0 >= 5)
        .map(|p| p.mean.abs())
        .fold(0.0, f64::max);
    table
        .meta("min_duration", args.min_duration)
        .meta(
            "filter",
            if trended.is_some() {
                "trend_length"
            } else {
                "series_length"
            },
        )
        .meta("max_abs_mean_from_t5", num(max_abs));
    for p in &all {
        let (mf, tf) = by_t.get(&p.t.0).map_or((String::new(), "0".to_string()), |f| {
            (num(f.mean), f.topics.to_string())
        });
        table.row(vec![p.t.0.to_string(), num(p.mean), p.topics.to_string(), mf, tf]);
    }
    Ok(table)
}

pub fn durations(inputs: &Inputs, args: &AnalyzeArgs) -> trendlab::Result<Table> {
    let rows = inputs.durations()?;
    let censored = rows.iter().filter(|r| r.censored).count();
    let step_freq = stop_frequency(&rows.iter().map(|r| (r.duration, r.censored)).collect::<Vec<_>>())?;
    let sample = DurationSample::truncated(rows.iter().filter(|r| !r.censored).map(|r| r.duration), args.truncation);
    let fit = fit_geometric(&sample)?;
    let p = fit.params["p"];
    let hist = sample.histogram();
    let bins = args.tail_bins.unwrap_or(hist.len());
    let tail = fit_exponential_tail(&sample, bins);

    let mut table = Table::new(&["k", "count", "density", "geometric_pmf"]);
    table
        .meta("n", sample.len())
        .meta("censored", censored)
        .meta("truncation", args.truncation)
        .meta("p_hat", num(p))
        .meta("mean", num(fit.params["mean"]))
        .meta("expected_duration", num(expected_duration(p)?))
        .meta("pmf_r_squared", num(fit.r_squared))
        .meta("per_step_stop_frequency", num(step_freq));
    match &tail {
        Ok(t) => {
            table
                .meta("tail_slope", num(t.params["slope"]))
                .meta("tail_intercept", num(t.params["intercept"]))
                .meta("tail_p", num(t.params["p"]))
                .meta("tail_r_squared", num(t.r_squared));
        }
        Err(e) => {
            table.meta("tail_fit", format!("undefined: {e}"));
        }
    }
    let n = sample.len() as f64;
    for (k, &c) in hist.iter().enumerate() {
        table.row(vec![
            k.to_string(),
            c.to_string(),
            num(c as f64 / n),
            num(geometric_pmf(p, k as u64)),
        ]);
    }
    Ok(table)
}

pub fn sequences(inputs: &Inputs) -> trendlab::Result<Table> {
    let seqs = split_sequences(&inputs.appearances()?);
    let dist = sequence_distributions(&seqs)?;
    let mut table = Table::new(&["kind", "value", "frequency"]);
    table
        .meta("topics", dist.topics)
        .meta("sequences", dist.sequences)
        .meta("multi_sequence_fraction", num(dist.multi_sequence_fraction));
    let (x, y): (Vec<f64>, Vec<f64>) = dist.lengths.iter().map(|(&l, &c)| (l as f64, c as f64)).unzip();
    match fit_power_law(&x, &y, 0..=x.len().saturating_sub(1)) {
        Ok(fit) => {
            table
                .meta("length_slope", num(fit.params["slope"]))
                .meta("length_r_squared", num(fit.r_squared));
        }
        Err(e) => {
            table.meta("length_fit", format!("undefined: {e}"));
        }
    }
    for (k, c) in &dist.counts_per_topic {
        table.row(vec!["sequences_per_topic".into(), k.to_string(), c.to_string()]);
    }
    for (l, c) in &dist.lengths {
        table.row(vec!["length".into(), l.to_string(), c.to_string()]);
    }
    Ok(table)
}

/// Topic metrics with the correlation report in the header, plus the
/// retweeted-author ranking.
pub fn metrics(inputs: &Inputs, args: &AnalyzeArgs) -> trendlab::Result<(Table, Table)> {
    let mut stream = inputs.stream()?;
    stream.sort_by_key(|r| r.time);
    let seqs = split_sequences(&inputs.appearances()?);
    let origin = stream.first().map_or(0, |r| r.time);

    let mut by_topic: BTreeMap<&str, Vec<&trendlab::TweetRecord>> = BTreeMap::new();
    for r in &stream {
        by_topic.entry(&r.topic).or_default().push(r);
    }
    let mut first_start: BTreeMap<&str, IntervalIndex> = BTreeMap::new();
    for s in &seqs {
        let e = first_start.entry(&s.topic).or_insert(s.start);
        *e = (*e).min(s.start);
    }
    let initiators: BTreeMap<String, Vec<String>> = first_start
        .iter()
        .filter_map(|(topic, &start)| {
            let tweets: Vec<_> = by_topic.get(topic)?.iter().map(|r| (*r).clone()).collect();
            Some((
                topic.to_string(),
                first_k_initiators(&tweets, start, origin, args.k_initiators),
            ))
        })
        .collect();

    let rows = topic_metrics(&stream, &seqs);
    let authors = author_stats(&stream, &initiators);
    let report = correlation_report(&rows, &authors);

    let mut table = Table::new(&[
        "topic",
        "total_tweets",
        "unique_authors",
        "active_ratio",
        "retweet_count",
        "domination_ratio",
        "trend_duration",
        "sequence_count",
    ]);
    table.meta("topics", rows.len()).meta("authors", authors.len());
    for pair in CORRELATION_PAIRS {
        match report.get(pair) {
            Some(CorrelationEntry::Coefficient { value, n }) => {
                table.meta(format!("corr:{pair}"), num(*value));
                table.meta(format!("n:{pair}"), n);
            }
            Some(CorrelationEntry::Undefined { reason, n }) => {
                table.meta(format!("corr:{pair}"), format!("undefined ({reason})"));
                table.meta(format!("n:{pair}"), n);
            }
            None => {}
        }
    }
    for m in &rows {
        table.row(vec![
            m.topic.clone(),
            m.total_tweets.to_string(),
            m.unique_authors.to_string(),
            num(m.active_ratio),
            m.retweet_count.to_string(),
            m.domination_ratio.map(num).unwrap_or_default(),
            m.trend_duration.to_string(),
            m.sequence_count.to_string(),
        ]);
    }

    let mut retweeters = Table::new(&["author", "retweets_received", "topics_retweeted_in", "retweet_ratio"]);
    retweeters.meta("min_topics", args.min_topics);
    for a in top_retweeted(&stream, args.min_topics) {
        let ratio = a.retweet_ratio().map(num).unwrap_or_default();
        retweeters.row(vec![
            a.author,
            a.retweets_received.to_string(),
            a.topics_retweeted_in.to_string(),
            ratio,
        ]);
    }
    Ok((table, retweeters))
}
