//! Estimators that recover the model's statistical signatures from series.

pub mod growth;
pub mod kde;
pub mod moments;
pub mod normal;
pub mod qq;
pub mod regression;
pub mod survival;

pub use growth::{
    log_ratio_sample, measure_gamma, normalized_second_derivative, CurvaturePoint, GammaSeries, MIN_RATIO_TOPICS,
};
pub use kde::{gaussian_kde, gaussian_kde_with_bandwidth, kde_grid, silverman_bandwidth};
pub use moments::{moment_normality, pearson, MomentDiagnostics};
pub use normal::{normal_cdf, normal_pdf, normal_quantile};
pub use qq::{plotting_quantiles, qq_max_deviation, qq_points};
pub use regression::{fit_power_law, linear_fit};
pub use survival::{
    empirical_stop_probability, expected_duration, fit_exponential_tail, fit_geometric, geometric_log_likelihood,
    geometric_pmf, stop_frequency, stop_probability, survival_threshold, DurationSample,
};
