//! `trendlab report`

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use trendlab::metrics::CORRELATION_PAIRS;

use crate::table::read_header;
use crate::{Analysis, CliError, CliResult, ReportArgs};

pub const SUMMARY_FILE: &str = "summary.txt";

/// Published correlations, in [`CORRELATION_PAIRS`] order.
pub const REFERENCE_CORRELATIONS: [f64; 6] = [0.80, 0.83, 0.96, -0.19, 0.22, 0.01];

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub value: Option<f64>,
    pub passed: bool,
}

fn check(label: &str, value: Option<f64>, ok: impl Fn(f64) -> bool) -> Check {
    Check {
        label: label.to_string(),
        value,
        passed: value.is_some_and(ok),
    }
}

type Header = BTreeMap<String, String>;

fn get(h: &Header, key: &str) -> Option<f64> {
    h.get(key).and_then(|v| v.parse().ok())
}

fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}

fn section(out: &mut String, title: &str, h: &Header, keys: &[&str], checks: &[Check], reference: &str) {
    let _ = writeln!(out, "== {title} ==");
    for k in keys {
        if let Some(v) = h.get(*k) {
            let _ = writeln!(out, "  {k}: {v}");
        }
    }
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "  [{tag}] {}: {}", c.label, fmt_value(c.value));
    }
    let _ = writeln!(out, "  reference: {reference}");
    let _ = writeln!(out);
}

/// Builds the summary text from the six analysis headers.
pub fn summarize(headers: &BTreeMap<Analysis, Header>) -> (String, Vec<Check>) {
    let mut out = String::from("trendlab analysis summary\n\n");
    let mut all = Vec::new();
    let empty = Header::new();
    let h = |a: Analysis| headers.get(&a).unwrap_or(&empty);

    let g = h(Analysis::Gamma);
    let checks = vec![
        check("gamma slope in [-1.1, -0.9]", get(g, "slope"), |s| {
            (-1.1..=-0.9).contains(&s)
        }),
        check("gamma fit R^2 >= 0.95", get(g, "r_squared"), |r| r >= 0.95),
    ];
    section(
        &mut out,
        "gamma decay",
        g,
        &["topics", "slope", "intercept", "r_squared", "fit_from", "fit_to"],
        &checks,
        "exponent -1 / R^2 0.98",
    );
    all.extend(checks);

    let r = h(Analysis::Ratios);
    let checks = vec![
        check("|skewness| < 0.15", get(r, "skewness"), |v| v.abs() < 0.15),
        check("|excess kurtosis| < 0.3", get(r, "excess_kurtosis"), |v| v.abs() < 0.3),
        check(
            "Q-Q max deviation (central 95%) < 0.15",
            get(r, "qq_max_dev_central95"),
            |v| v < 0.15,
        ),
    ];
    section(
        &mut out,
        "log cumulative ratios",
        r,
        &["t_late", "t_early", "n", "excluded", "bandwidth"],
        &checks,
        "log-normal to a high degree",
    );
    all.extend(checks);

    let c = h(Analysis::Curvature);
    let checks = vec![check(
        "max |mean second derivative| for t >= 5 within 0.02",
        get(c, "max_abs_mean_from_t5"),
        |v| v <= 0.02,
    )];
    section(
        &mut out,
        "curvature",
        c,
        &["min_duration", "filter"],
        &checks,
        "average second derivative close to zero (linear growth)",
    );
    all.extend(checks);

    let d = h(Analysis::Durations);
    let checks = vec![
        check("p_hat in [0.10, 0.14]", get(d, "p_hat"), |p| (0.10..=0.14).contains(&p)),
        check(
            "per-step stop frequency in [0.11, 0.13]",
            get(d, "per_step_stop_frequency"),
            |p| (0.11..=0.13).contains(&p),
        ),
        check("mean duration in [6.93, 7.73]", get(d, "mean"), |m| {
            (6.93..=7.73).contains(&m)
        }),
        check("log-density tail R^2 >= 0.9", get(d, "tail_r_squared"), |r| r >= 0.9),
    ];
    section(
        &mut out,
        "trend durations",
        d,
        &[
            "n",
            "censored",
            "truncation",
            "expected_duration",
            "tail_slope",
            "tail_fit",
        ],
        &checks,
        "p = 0.12; R^2 0.9112",
    );
    all.extend(checks);

    let s = h(Analysis::Sequences);
    section(
        &mut out,
        "trend sequences",
        s,
        &[
            "topics",
            "sequences",
            "multi_sequence_fraction",
            "length_slope",
            "length_r_squared",
            "length_fit",
        ],
        &[],
        "34% of topics trend in more than one sequence (dataset specific)",
    );

    let m = h(Analysis::Metrics);
    let _ = writeln!(out, "== metrics ==");
    for k in ["topics", "authors"] {
        if let Some(v) = m.get(k) {
            let _ = writeln!(out, "  {k}: {v}");
        }
    }
    for (pair, reference) in CORRELATION_PAIRS.iter().zip(REFERENCE_CORRELATIONS) {
        let value = m.get(&format!("corr:{pair}")).map_or("n/a", String::as_str);
        let n = m.get(&format!("n:{pair}")).map_or("0", String::as_str);
        let _ = writeln!(out, "  {pair}: {value} (n = {n}; reference {reference:.2})");
    }
    let _ = writeln!(
        out,
        "  reference correlations are dataset specific and not expected to match simulations"
    );
    let _ = writeln!(out);

    let passed = all.iter().filter(|c| c.passed).count();
    let _ = writeln!(out, "checks passed: {passed}/{}", all.len());
    (out, all)
}

/// Writes the summary and returns its path. Fails if any analysis table is missing.
pub fn run(args: &ReportArgs) -> CliResult<PathBuf> {
    let dir = &args.input;
    let missing: Vec<String> = Analysis::SECTIONS
        .iter()
        .map(|a| a.file_name())
        .filter(|f| !dir.join(f).is_file())
        .collect();
    if !missing.is_empty() {
        return Err(CliError::MissingSections {
            dir: dir.clone(),
            missing,
        });
    }
    let mut headers = BTreeMap::new();
    for a in Analysis::SECTIONS {
        headers.insert(a, read_header(&dir.join(a.file_name()))?);
    }
    let (text, checks) = summarize(&headers);
    let path = args.out.clone().unwrap_or_else(|| dir.join(SUMMARY_FILE));
    trendlab::ingest::write_file(&path, |mut f| std::io::Write::write_all(&mut f, text.as_bytes()))?;
    let passed = checks.iter().filter(|c| c.passed).count();
    println!("{passed}/{} checks passed -> {}", checks.len(), path.display());
    Ok(path)
}
