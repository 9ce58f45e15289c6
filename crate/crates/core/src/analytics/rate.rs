use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line through `log2(statistic) - (3/4) log2(m)` against `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub points: Vec<(u32, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub residuals: Vec<f64>,
}

pub fn rate_fit(points: &[(u32, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "rate fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(m, s)| m == 0 || !(s > 0.0) || !s.is_finite()) {
        return Err(Error::DegenerateInput(
            "rate fit needs m >= 1 and positive finite statistics".into(),
        ));
    }
    let xs: Vec<f64> = points.iter().map(|&(m, _)| f64::from(m)).collect();
    let ys: Vec<f64> = points
        .iter()
        .map(|&(m, s)| s.log2() - 0.75 * f64::from(m).log2())
        .collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all points share one level".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (intercept + slope * x))
        .collect();
    Ok(RateFit {
        points: points.to_vec(),
        slope,
        intercept,
        residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_rate_has_half_slope() {
        let pts: Vec<_> = (4..=10)
            .map(|m| (m, f64::from(m).powf(0.75) * 2f64.powf(-f64::from(m) / 2.0)))
            .collect();
        let fit = rate_fit(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn constant_statistic_is_nearly_flat() {
        let pts: Vec<_> = (4..=10).map(|m| (m, 3.0)).collect();
        let fit = rate_fit(&pts).unwrap();
        assert!(fit.slope < 0.0 && fit.slope.abs() < 0.2);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(rate_fit(&[(4, 1.0), (5, 1.0)]).is_err());
        assert!(rate_fit(&[(4, 1.0), (5, 0.0), (6, 1.0)]).is_err());
        assert!(rate_fit(&[(4, 1.0), (4, 2.0), (4, 3.0)]).is_err());
    }
}
