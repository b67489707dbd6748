use crate::error::{Error, Result};

pub(crate) fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample standard deviation with the n - 1 denominator.
pub(crate) fn sample_std(values: &[f64]) -> f64 {
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m).powi(2)).sum();
    (ss / (values.len() as f64 - 1.0)).sqrt()
}

/// Sample skewness g1 = m3 / m2^1.5 and excess kurtosis g2 = m4 / m2^2 - 3,
/// from central moments with the 1/n normalisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentDiagnostics {
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn moment_normality(values: &[f64]) -> Result<MomentDiagnostics> {
    if values.len() < 3 {
        return Err(Error::InsufficientSample {
            what: "moment diagnostics",
            needed: 3,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let m = mean(values);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    // Constant samples leave at most rounding noise in m2.
    if m2 <= 1e-28 * (m * m).max(f64::MIN_POSITIVE) {
        return Err(Error::domain("moment diagnostics need a non-constant sample"));
    }
    Ok(MomentDiagnostics {
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
    })
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::domain(format!(
            "pearson needs equal lengths, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientSample {
            what: "pearson correlation",
            needed: 3,
            got: x.len(),
        });
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let n = x.len() as f64;
    if is_flat(sxx, mx, n) {
        return Err(Error::UndefinedCorrelation("first column is constant".into()));
    }
    if is_flat(syy, my, n) {
        return Err(Error::UndefinedCorrelation("second column is constant".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

fn is_flat(sum_sq: f64, mean: f64, n: f64) -> bool {
    sum_sq <= 1e-28 * (n * mean * mean).max(f64::MIN_POSITIVE)
}
