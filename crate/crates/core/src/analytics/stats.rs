//! Small-sample statistics used by the verifiers.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

/// Exact one-sided upper confidence limit for a binomial proportion with
/// `x` successes in `n` trials.
pub fn clopper_pearson_upper(x: u64, n: u64, confidence: f64) -> f64 {
    assert!(n > 0 && x <= n, "need 0 <= x <= n, n > 0");
    if x == n {
        return 1.0;
    }
    let alpha = 1.0 - confidence;
    if x == 0 {
        return 1.0 - alpha.powf(1.0 / n as f64);
    }
    // P(Bin(n, p) <= x) = 1 - I_p(x + 1, n - x) decreases in p
    bisect(|p| 1.0 - beta_reg((x + 1) as f64, (n - x) as f64, p) - alpha)
}

/// Exact one-sided lower confidence limit.
pub fn clopper_pearson_lower(x: u64, n: u64, confidence: f64) -> f64 {
    assert!(n > 0 && x <= n, "need 0 <= x <= n, n > 0");
    if x == 0 {
        return 0.0;
    }
    let alpha = 1.0 - confidence;
    if x == n {
        return alpha.powf(1.0 / n as f64);
    }
    // P(Bin(n, p) >= x) = I_p(x, n - x + 1) increases in p
    bisect(|p| alpha - beta_reg(x as f64, (n - x + 1) as f64, p))
}

/// Root of a function decreasing on `[0, 1]`.
fn bisect(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_variance(xs: &[f64]) -> f64 {
    let mu = mean(xs);
    xs.iter().map(|x| (x - mu).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Sample mean against `expected ± sigmas * sqrt(variance / n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanBand {
    pub mean: f64,
    pub expected: f64,
    pub half_width: f64,
    pub within: bool,
}

pub fn mean_band(xs: &[f64], expected: f64, variance: f64, sigmas: f64) -> MeanBand {
    let m = mean(xs);
    let half_width = sigmas * (variance / xs.len() as f64).sqrt();
    MeanBand {
        mean: m,
        expected,
        half_width,
        within: (m - expected).abs() <= half_width,
    }
}

/// Total-variation distance between the empirical law of `samples` and
/// `pmf`, with every value above `max_value` pooled into one tail cell.
pub fn total_variation(samples: &[u32], pmf: impl Fn(u32) -> f64, max_value: u32) -> f64 {
    let cells = max_value as usize + 1;
    let mut counts = vec![0u64; cells + 1];
    for &s in samples {
        counts[(s as usize).min(cells)] += 1;
    }
    let n = samples.len() as f64;
    let mut model_mass = 0.0;
    let mut dist = 0.0;
    for v in 0..=max_value {
        let p = pmf(v);
        model_mass += p;
        dist += (counts[v as usize] as f64 / n - p).abs();
    }
    dist += (counts[cells] as f64 / n - (1.0 - model_mass).max(0.0)).abs();
    0.5 * dist
}

/// `p (1 - p)^{v - 1}` on `{1, 2, ...}`.
pub fn geometric_from_one(p: f64) -> impl Fn(u32) -> f64 {
    move |v| if v == 0 { 0.0 } else { p * (1.0 - p).powi(v as i32 - 1) }
}

/// `p (1 - p)^v` on `{0, 1, ...}`.
pub fn geometric_from_zero(p: f64) -> impl Fn(u32) -> f64 {
    move |v| p * (1.0 - p).powi(v as i32)
}

pub fn bernoulli(p: f64) -> impl Fn(u32) -> f64 {
    move |v| match v {
        0 => 1.0 - p,
        1 => p,
        _ => 0.0,
    }
}
