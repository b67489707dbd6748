use super::moments::sample_std;
use crate::error::{Error, Result};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Silverman's rule of thumb: 0.9 * min(sd, IQR / 1.34) * n^(-1/5).
///
/// Falls back to the standard deviation alone when the IQR is zero.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64> {
    if values.len() < 2 {
        return Err(Error::InsufficientSample {
            what: "kernel density estimate",
            needed: 2,
            got: values.len(),
        });
    }
    let sd = sample_std(values);
    if !(sd > 0.0) {
        return Err(Error::domain("kernel density estimate needs a non-constant sample"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    Ok(0.9 * spread * (values.len() as f64).powf(-0.2))
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Gaussian KDE with Silverman bandwidth, evaluated at `eval_points`.
pub fn gaussian_kde(values: &[f64], eval_points: &[f64]) -> Result<Vec<f64>> {
    let h = silverman_bandwidth(values)?;
    gaussian_kde_with_bandwidth(values, eval_points, h)
}

pub fn gaussian_kde_with_bandwidth(values: &[f64], eval_points: &[f64], bandwidth: f64) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::InsufficientSample {
            what: "kernel density estimate",
            needed: 2,
            got: values.len(),
        });
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::domain(format!("bandwidth must be positive, got {bandwidth}")));
    }
    let norm = INV_SQRT_2PI / (values.len() as f64 * bandwidth);
    Ok(eval_points
        .iter()
        .map(|&x| {
            let s: f64 = values
                .iter()
                .map(|&v| {
                    let u = (x - v) / bandwidth;
                    (-0.5 * u * u).exp()
                })
                .sum();
            s * norm
        })
        .collect())
}

/// `n` evenly spaced points covering the sample padded by `pad` bandwidths.
pub fn kde_grid(values: &[f64], n: usize, pad: f64) -> Result<Vec<f64>> {
    let h = silverman_bandwidth(values)?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min) - pad * h;
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max) + pad * h;
    let n = n.max(2);
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::normal::normal_pdf;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn trapezoid(xs: &[f64], ys: &[f64]) -> f64 {
        xs.windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
            .sum()
    }

    #[test]
    fn far_tail_vanishes() {
        let data = [-0.2, -0.1, 0.0, 0.1, 0.2];
        let sd = sample_std(&data);
        let d = gaussian_kde(&data, &[100.0 * sd]).unwrap();
        assert!(d[0] < 1e-12);
    }

    #[test]
    fn symmetric_data_symmetric_density() {
        let data = [-3.0, -1.0, -0.5, 0.5, 1.0, 3.0];
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        let a = gaussian_kde(&data, &xs).unwrap();
        let b = gaussian_kde(&data, &neg).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn integrates_to_one() {
        let data = [0.3, 1.2, 1.9, 2.2, 5.0, 5.5, 8.0];
        let grid = kde_grid(&data, 4001, 10.0).unwrap();
        let dens = gaussian_kde(&data, &grid).unwrap();
        assert!((trapezoid(&grid, &dens) - 1.0).abs() < 0.01);
    }

    #[test]
    fn recovers_normal_density() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let data: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let grid: Vec<f64> = (0..=120).map(|i| -3.0 + i as f64 * 0.05).collect();
        let dens = gaussian_kde(&data, &grid).unwrap();
        let worst = grid
            .iter()
            .zip(&dens)
            .map(|(x, d)| (d - normal_pdf(*x)).abs())
            .fold(0.0, f64::max);
        assert!(worst < 0.01, "max deviation {worst}");
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(gaussian_kde(&[1.0, 1.0, 1.0], &[0.0]), Err(Error::Domain(_))));
        assert!(gaussian_kde(&[1.0], &[0.0]).is_err());
        assert!(gaussian_kde_with_bandwidth(&[1.0, 2.0], &[0.0], 0.0).is_err());
    }
}
