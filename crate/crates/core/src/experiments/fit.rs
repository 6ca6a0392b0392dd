//! Least-squares power-law fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `log(value) = intercept + slope * log(N)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Fits a straight line to `(log N, log value)`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::invalid(
            "fit points",
            format!("need at least 3 points, got {}", points.len()),
        ));
    }
    for &(n, v) in points {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::invalid("fit points", format!("N = {n} is not positive")));
        }
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::invalid("fit points", format!("value {v} at N = {n} is not positive")));
        }
    }
    let m = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("fit points", "all N are equal"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (rss / (m - 2.0) / sxx).sqrt();
    Ok(SlopeFit {
        slope,
        stderr,
        intercept,
        points: points.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn power(k: f64) -> Vec<(f64, f64)> {
        [8.0, 16.0, 32.0, 64.0, 128.0, 256.0]
            .iter()
            .map(|&n| (n, 3.0 * f64::powf(n, k)))
            .collect()
    }

    #[test]
    fn exact_power_laws() {
        for k in [-1.0, -2.0, 0.0] {
            let f = fit_loglog_slope(&power(k)).unwrap();
            assert!((f.slope - k).abs() < 1e-12, "{k}: {f:?}");
            assert!(f.stderr < 1e-12);
            assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        }
    }

    #[test]
    fn noisy_points_have_stderr() {
        let pts = vec![(1.0, 1.0), (2.0, 0.6), (4.0, 0.2), (8.0, 0.14)];
        let f = fit_loglog_slope(&pts).unwrap();
        assert!(f.stderr > 0.0);
        assert!(f.slope < 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, 0.0), (4.0, 0.2)]).is_err());
        assert!(fit_loglog_slope(&[(1.0, 1.0), (2.0, -0.1), (4.0, 0.2)]).is_err());
        assert!(fit_loglog_slope(&[(2.0, 1.0), (2.0, 0.5), (2.0, 0.2)]).is_err());
    }
}
