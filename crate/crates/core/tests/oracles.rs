//! Statistical and brute-force oracles checked against the library.
//!
//! Each oracle here is written independently of the code path it checks:
//! its own RNG, its own loop, its own formula.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};

use trendlab::estimators::{
    fit_geometric, fit_power_law, geometric_log_likelihood, measure_gamma, moment_normality, pearson, stop_probability,
    survival_threshold, DurationSample,
};
use trendlab::sim::{sample_noise, simulate_cohort, topic_name};
use trendlab::{ModelParams, NoiseSpec, TopicSeries};

fn lognormal_cohort(n_topics: usize, n_intervals: usize, sigma2: f64, seed: u64) -> ModelParams {
    ModelParams {
        n_topics,
        n_intervals,
        n0: 1.0,
        gamma_c: 1.0,
        noise: NoiseSpec::lognormal(sigma2).unwrap(),
        theta: 1.0,
        burn_in: 1,
        constant_gamma_after: None,
        seed,
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, v)
}

#[test]
fn noise_mean_and_variance_by_law_of_large_numbers() {
    for spec in [NoiseSpec::lognormal(0.25).unwrap(), NoiseSpec::gamma(0.25).unwrap()] {
        let mut rng = StdRng::seed_from_u64(2024);
        let draws: Vec<f64> = (0..1_000_000).map(|_| sample_noise(&spec, &mut rng).unwrap()).collect();
        assert!(draws.iter().all(|&x| x > 0.0));
        let (m, v) = mean_var(&draws);
        assert!((0.99..=1.01).contains(&m), "{:?} mean {m}", spec.kind);
        assert!((0.245..=0.255).contains(&v), "{:?} variance {v}", spec.kind);
    }
}

/// Independent Monte-Carlo of the recursion: Box-Muller normals from a
/// separate generator, lognormal noise built by hand.
fn reference_growth(n_topics: usize, steps: usize, sigma2: f64, seed: u64) -> Vec<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let s2 = (1.0 + sigma2).ln();
    let (mu, s) = (-s2 / 2.0, s2.sqrt());
    (0..n_topics)
        .map(|_| {
            let mut ratio = 1.0;
            for t in 1..=steps {
                let (u1, u2): (f64, f64) = (1.0 - rng.random::<f64>(), rng.random());
                let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos();
                ratio *= 1.0 + (mu + s * z).exp() / t as f64;
            }
            ratio
        })
        .collect()
}

#[test]
fn mean_growth_after_48_steps() {
    let cohort = simulate_cohort(&lognormal_cohort(5000, 48, 0.25, 99)).unwrap();
    let sim: Vec<f64> = cohort
        .series
        .iter()
        .map(|s| s.cumulative()[48] / s.cumulative()[0])
        .collect();
    let (sim_mean, _) = mean_var(&sim);
    let (oracle_mean, oracle_var) = mean_var(&reference_growth(5000, 48, 0.25, 7));
    assert!((44.0..=54.0).contains(&sim_mean), "simulated mean {sim_mean}");
    assert!((44.0..=54.0).contains(&oracle_mean), "oracle mean {oracle_mean}");
    // Both estimate E N(48)/N(0) = 49; allow five standard errors of the difference.
    let se = (2.0 * oracle_var / 5000.0).sqrt();
    assert!(
        (sim_mean - oracle_mean).abs() < 5.0 * se,
        "{sim_mean} vs {oracle_mean} (se {se})"
    );
}

#[test]
fn gamma_recovery_lognormal() {
    let cohort = simulate_cohort(&lognormal_cohort(5000, 96, 0.25, 3)).unwrap();
    let g = measure_gamma(&cohort.series).unwrap();
    let g10 = g.get(10).unwrap();
    assert!((0.09..=0.11).contains(&g10), "gamma(10) = {g10}");
    let t: Vec<f64> = g.t.iter().map(|t| t.0 as f64).collect();
    let fit = fit_power_law(&t, &g.gamma, g.index_window(5, 80).unwrap()).unwrap();
    let slope = fit.param("slope").unwrap();
    assert!((-1.1..=-0.9).contains(&slope), "slope {slope}");
    assert!(fit.r_squared >= 0.95, "R^2 {}", fit.r_squared);
}

#[test]
fn gamma_recovery_degenerate_is_exact() {
    let p = ModelParams {
        noise: NoiseSpec::degenerate(),
        ..lognormal_cohort(4, 200, 0.25, 1)
    };
    let cohort = simulate_cohort(&p).unwrap();
    let g = measure_gamma(&cohort.series).unwrap();
    for (t, v) in g.t.iter().zip(&g.gamma) {
        assert!((v - 1.0 / t.0 as f64).abs() < 1e-12);
    }
    let t: Vec<f64> = g.t.iter().map(|t| t.0 as f64).collect();
    let fit = fit_power_law(&t, &g.gamma, 0..=g.len() - 1).unwrap();
    assert!((fit.param("slope").unwrap() + 1.0).abs() < 1e-9);
    assert!((fit.r_squared - 1.0).abs() < 1e-9);
}

#[test]
fn scaled_gamma_recovers_c_over_t() {
    let p = ModelParams {
        gamma_c: 0.4,
        noise: NoiseSpec::degenerate(),
        ..lognormal_cohort(3, 50, 0.25, 1)
    };
    let g = measure_gamma(&simulate_cohort(&p).unwrap().series).unwrap();
    for (t, v) in g.t.iter().zip(&g.gamma) {
        assert!((v - 0.4 / t.0 as f64).abs() < 1e-12);
    }
}

#[test]
fn log_growth_is_near_normal_for_small_noise() {
    // The central-limit argument needs the per-step log factors to be close
    // to symmetric, which holds for small noise variance.
    let cohort = simulate_cohort(&lognormal_cohort(5000, 96, 0.01, 17)).unwrap();
    let logs: Vec<f64> = cohort
        .series
        .iter()
        .map(|s| (s.cumulative()[96] / s.cumulative()[0]).ln())
        .collect();
    let d = moment_normality(&logs).unwrap();
    assert!(d.skewness.abs() < 0.15, "skewness {}", d.skewness);
    assert!(d.excess_kurtosis.abs() < 0.3, "excess kurtosis {}", d.excess_kurtosis);
}

#[test]
fn normal_draws_have_normal_moments() {
    let mut rng = StdRng::seed_from_u64(4242);
    let draws: Vec<f64> = (0..1_000_000).map(|_| StandardNormal.sample(&mut rng)).collect();
    let d = moment_normality(&draws).unwrap();
    assert!(d.skewness.abs() < 0.01, "skewness {}", d.skewness);
    assert!(d.excess_kurtosis.abs() < 0.02, "excess kurtosis {}", d.excess_kurtosis);
}

fn grid_argmax(shifted: &[u64]) -> f64 {
    (1..=999)
        .map(|i| i as f64 / 1000.0)
        .map(|p| (p, geometric_log_likelihood(p, shifted)))
        .fold(
            (0.0, f64::NEG_INFINITY),
            |best, cur| if cur.1 > best.1 { cur } else { best },
        )
        .0
}

/// Exact likelihood written out term by term, for cross-checking the closed form.
fn direct_log_likelihood(p: f64, shifted: &[u64]) -> f64 {
    shifted.iter().map(|&k| ((1.0 - p).powi(k as i32) * p).ln()).sum()
}

fn multisets(size: usize, max: u64) -> Vec<Vec<u64>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in multisets(size - 1, max) {
        let lo = rest.last().copied().unwrap_or(0);
        for v in lo..=max {
            let mut s = rest.clone();
            s.push(v);
            out.push(s);
        }
    }
    out
}

#[test]
fn geometric_mle_matches_grid_on_all_small_samples() {
    let mut checked = 0;
    for size in 1..=6 {
        for sample in multisets(size, 4) {
            let fit = fit_geometric(&DurationSample::new(sample.clone(), 0).unwrap()).unwrap();
            let p = fit.param("p").unwrap();
            let grid = grid_argmax(&sample);
            assert!((p - grid).abs() <= 1e-3 + 1e-12, "{sample:?}: mle {p} grid {grid}");
            checked += 1;
        }
    }
    assert_eq!(checked, 461);
}

#[test]
fn geometric_mle_matches_grid_on_random_truncated_samples() {
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..20 {
        let n = rng.random_range(10..30);
        let trunc = rng.random_range(0..12);
        let durations: Vec<u64> = (0..n).map(|_| trunc + rng.random_range(0..15)).collect();
        let sample = DurationSample::new(durations.clone(), trunc).unwrap();
        let shifted: Vec<u64> = durations.iter().map(|d| d - trunc).collect();
        let p = fit_geometric(&sample).unwrap().param("p").unwrap();
        let grid = grid_argmax(&shifted);
        assert!((p - grid).abs() <= 1e-3, "mle {p} grid {grid}");
        let closed = geometric_log_likelihood(grid, &shifted);
        assert!((closed - direct_log_likelihood(grid, &shifted)).abs() < 1e-9);
    }
}

fn definitional_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (sx, sy): (f64, f64) = (x.iter().sum(), y.iter().sum());
    let (mx, my) = (sx / n, sy / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (n - 1.0);
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / (n - 1.0);
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / (n - 1.0);
    cov / (vx.sqrt() * vy.sqrt())
}

#[test]
fn pearson_matches_definition() {
    let mut rng = StdRng::seed_from_u64(31);
    for _ in 0..100 {
        let n = rng.random_range(3..200);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.3 * v + rng.random_range(-40.0..40.0)).collect();
        assert!((pearson(&x, &y).unwrap() - definitional_pearson(&x, &y)).abs() < 1e-12);
    }
}

#[test]
fn independent_columns_are_uncorrelated() {
    let mut rng = StdRng::seed_from_u64(55);
    let x: Vec<f64> = (0..10_000).map(|_| rng.random::<f64>()).collect();
    let mut y = x.clone();
    // Fisher-Yates shuffle
    for i in (1..y.len()).rev() {
        y.swap(i, rng.random_range(0..=i));
    }
    assert!(pearson(&x, &y).unwrap().abs() < 0.05);
}

#[test]
fn geometric_duration_loop_closes() {
    let noise = NoiseSpec::lognormal(0.25).unwrap();
    let p_star = 0.12;
    let theta = survival_threshold(p_star, &noise).unwrap();
    assert!((stop_probability(theta, &noise).unwrap() - p_star).abs() < 1e-9);
    let params = ModelParams {
        n_topics: 10_000,
        n_intervals: 310,
        n0: 1.0,
        gamma_c: 1.0,
        noise,
        theta,
        burn_in: 10,
        constant_gamma_after: Some(10),
        seed: 12,
    };
    let cohort = simulate_cohort(&params).unwrap();
    let rows: Vec<(u64, bool)> = cohort
        .outcomes
        .iter()
        .map(|o| (o.duration as u64, o.censored))
        .collect();
    let freq = trendlab::estimators::stop_frequency(&rows).unwrap();
    assert!((freq - p_star).abs() <= 0.01, "stop frequency {freq}");
    let sample = DurationSample::new(cohort.uncensored_durations(), 0).unwrap();
    let p_hat = fit_geometric(&sample).unwrap().param("p").unwrap();
    assert!((p_hat - p_star).abs() <= 0.02, "p_hat {p_hat}");
}

#[test]
fn topic_names_sort_by_id() {
    let names: Vec<String> = (0..20).map(topic_name).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    let _ = TopicSeries::from_counts(names[0].clone(), vec![1.0]).unwrap();
}
