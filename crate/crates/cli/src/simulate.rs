//! `trendlab simulate`

use std::path::PathBuf;

use serde_json::json;
use trendlab::estimators::survival_threshold;
use trendlab::ingest::{write_durations, write_file, write_series, write_stream, write_trend_appearances, DurationRow};
use trendlab::metrics::Appearances;
use trendlab::sim::{emit_cohort_records, simulate_cohort, EmissionConfig};
use trendlab::{Error, ModelParams, NoiseKind, NoiseSpec};

use crate::inputs::{APPEARANCES_FILE, DURATIONS_FILE, MANIFEST_FILE, SERIES_FILE, STREAM_FILE};
use crate::{CliError, CliResult, SimulateArgs};

pub const DEFAULT_SIGMA2: f64 = 0.25;
pub const DEFAULT_THETA: f64 = 1.05;
pub const DEFAULT_BURN_IN: usize = 10;

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Model and emission settings implied by the flags.
pub fn params_from_args(args: &SimulateArgs) -> CliResult<(ModelParams, EmissionConfig)> {
    let sigma2 = args.sigma2.unwrap_or(match args.noise {
        NoiseKind::Degenerate => 0.0,
        _ => DEFAULT_SIGMA2,
    });
    let noise = NoiseSpec::new(args.noise, sigma2).map_err(usage)?;
    let theta = match (args.theta, args.stop_p) {
        (Some(theta), _) => theta,
        (None, Some(p)) => survival_threshold(p, &noise).map_err(usage)?,
        (None, None) => DEFAULT_THETA,
    };
    let params = ModelParams {
        n_topics: args.topics,
        n_intervals: args.intervals,
        n0: args.n0,
        gamma_c: args.gamma_c,
        noise,
        theta,
        burn_in: args
            .burn_in
            .unwrap_or_else(|| DEFAULT_BURN_IN.min(args.intervals.saturating_sub(1))),
        constant_gamma_after: args.constant_gamma_after,
        seed: args.seed,
    };
    params.validate().map_err(usage)?;
    if args.author_pool < 2 {
        return Err(CliError::Usage("author pool needs at least two authors".into()));
    }
    if !(0.0..=1.0).contains(&args.retweet_prob) {
        return Err(CliError::Usage(format!(
            "retweet probability must lie in [0, 1], got {}",
            args.retweet_prob
        )));
    }
    let emission = EmissionConfig {
        author_pool: args.author_pool,
        retweet_prob: args.retweet_prob,
        origin: 0,
    };
    Ok((params, emission))
}

/// Runs the simulation and returns the paths written.
pub fn run(args: &SimulateArgs) -> CliResult<Vec<PathBuf>> {
    let (params, emission) = params_from_args(args)?;
    let cohort = simulate_cohort(&params)?;
    let records = if args.no_stream {
        Vec::new()
    } else {
        emit_cohort_records(&cohort, params.seed, &emission)?
    };

    let out = &args.out;
    std::fs::create_dir_all(out).map_err(|e| Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let durations: Vec<DurationRow> = cohort
        .outcomes
        .iter()
        .map(|o| DurationRow {
            topic: o.sequence.topic.clone(),
            burn_in: o.burn_in,
            duration: o.duration as u64,
            censored: o.censored,
        })
        .collect();
    let appearances: Appearances = cohort
        .outcomes
        .iter()
        .map(|o| (o.sequence.topic.clone(), o.sequence.intervals().collect()))
        .collect();

    write_file(out.join(SERIES_FILE), |f| write_series(f, &cohort.series))?;
    if args.no_stream {
        // a stream left by an earlier run would no longer match the series
        let _ = std::fs::remove_file(out.join(STREAM_FILE));
    } else {
        write_file(out.join(STREAM_FILE), |f| write_stream(f, &records))?;
    }
    write_file(out.join(DURATIONS_FILE), |f| write_durations(f, &durations))?;
    write_file(out.join(APPEARANCES_FILE), |f| write_trend_appearances(f, &appearances))?;

    let files: Vec<&str> = [SERIES_FILE, STREAM_FILE, DURATIONS_FILE, APPEARANCES_FILE]
        .into_iter()
        .filter(|&f| f != STREAM_FILE || !args.no_stream)
        .collect();
    let manifest = json!({
        "tool": "trendlab",
        "cli_version": env!("CARGO_PKG_VERSION"),
        "core_version": trendlab::VERSION,
        "seed": params.seed,
        "params": params,
        "emission": {
            "author_pool": emission.author_pool,
            "retweet_prob": emission.retweet_prob,
            "origin": emission.origin,
        },
        "records": records.len(),
        "files": files,
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    let manifest_path = out.join(MANIFEST_FILE);
    write_file(&manifest_path, |mut f| {
        std::io::Write::write_all(&mut f, text.as_bytes())
    })?;

    println!(
        "simulated {} topics x {} intervals, {} records -> {}",
        params.n_topics,
        params.n_intervals,
        records.len(),
        out.display()
    );
    let mut written: Vec<PathBuf> = files.iter().map(|f| out.join(f)).collect();
    written.push(manifest_path);
    Ok(written)
}
