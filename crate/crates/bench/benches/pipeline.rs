use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use trendlab::estimators::{fit_geometric, gaussian_kde, kde_grid, measure_gamma, DurationSample};
use trendlab::sim::simulate_cohort;
use trendlab::{ModelParams, NoiseSpec};

fn params(n_topics: usize) -> ModelParams {
    ModelParams {
        n_topics,
        n_intervals: 96,
        noise: NoiseSpec::lognormal(0.25).unwrap(),
        ..ModelParams::default()
    }
}

fn simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_cohort");
    group.sample_size(10);
    for n in [500, 5000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let p = params(n);
            b.iter(|| simulate_cohort(black_box(&p)).unwrap())
        });
    }
    group.finish();
}

fn estimators(c: &mut Criterion) {
    let cohort = simulate_cohort(&params(5000)).unwrap();
    c.bench_function("measure_gamma/5000x97", |b| {
        b.iter(|| measure_gamma(black_box(&cohort.series)).unwrap())
    });

    let values: Vec<f64> = cohort
        .series
        .iter()
        .map(|s| (s.cumulative()[14] / s.cumulative()[2]).ln())
        .collect();
    let grid = kde_grid(&values, 200, 3.0).unwrap();
    c.bench_function("gaussian_kde/5000x200", |b| {
        b.iter(|| gaussian_kde(black_box(&values), black_box(&grid)).unwrap())
    });

    let durations = DurationSample::new(cohort.outcomes.iter().map(|o| o.duration as u64).collect(), 0).unwrap();
    c.bench_function("fit_geometric/5000", |b| {
        b.iter(|| fit_geometric(black_box(&durations)).unwrap())
    });
}

criterion_group!(benches, simulate, estimators);
criterion_main!(benches);
