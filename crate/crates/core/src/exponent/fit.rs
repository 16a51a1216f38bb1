use serde::{Deserialize, Serialize};

use super::scan::ScanSeries;
use crate::{Error, Result};

pub const MIN_FIT_POINTS: usize = 4;
const R2_MIN: f64 = 0.995;

/// OLS of ln T₀ against 1/g²; F₀ = −slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub epsilon: f64,
    pub slope: f64,
    pub intercept: f64,
    pub slope_err: f64,
    pub intercept_err: f64,
    pub r2: f64,
    pub f0: f64,
    pub f0_err: f64,
    pub inv_g2_min: f64,
    pub inv_g2_max: f64,
    pub points: usize,
    /// Largest |F₀ − F₀(leave-one-out)|.
    pub jackknife_shift: f64,
    /// Two-sided runs-test p-value on residual signs.
    pub runs_p: f64,
    /// R² below the exponential-form threshold.
    pub non_exponential: bool,
}

fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64, f64, Vec<f64>) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let res: Vec<f64> = x.iter().zip(y).map(|(a, b)| b - intercept - slope * a).collect();
    let sse: f64 = res.iter().map(|r| r * r).sum();
    let s2 = if x.len() > 2 { sse / (n - 2.0) } else { 0.0 };
    let slope_err = (s2 / sxx).sqrt();
    let intercept_err = (s2 * (1.0 / n + mx * mx / sxx)).sqrt();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    (slope, intercept, slope_err, intercept_err, r2, res)
}

fn choose(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Exact Wald–Wolfowitz runs test on the signs of `res` (zeros dropped).
/// Returns 1 when fewer than two signs of each kind are present.
pub fn runs_test(res: &[f64]) -> f64 {
    let signs: Vec<bool> = res.iter().filter(|r| **r != 0.0).map(|r| *r > 0.0).collect();
    let n1 = signs.iter().filter(|s| **s).count();
    let n2 = signs.len() - n1;
    if n1 < 2 || n2 < 2 {
        return 1.0;
    }
    let runs = 1 + signs.windows(2).filter(|w| w[0] != w[1]).count();
    let total = choose(n1 + n2, n1);
    let prob = |r: usize| -> f64 {
        let k = r / 2;
        if r % 2 == 0 {
            if k == 0 {
                return 0.0;
            }
            2.0 * choose(n1 - 1, k - 1) * choose(n2 - 1, k - 1) / total
        } else {
            if k == 0 {
                return 0.0;
            }
            (choose(n1 - 1, k - 1) * choose(n2 - 1, k) + choose(n1 - 1, k) * choose(n2 - 1, k - 1)) / total
        }
    };
    let max_runs = n1 + n2;
    let lo: f64 = (2..=runs).map(prob).sum();
    let hi: f64 = (runs..=max_runs).map(prob).sum();
    (2.0 * lo.min(hi)).min(1.0)
}

pub fn fit_exponent(series: &ScanSeries) -> Result<FitResult> {
    let pts: Vec<_> = series.usable().collect();
    if pts.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints { got: pts.len(), need: MIN_FIT_POINTS });
    }
    let mut pairs: Vec<(f64, f64)> = pts.iter().map(|p| (p.inv_g2, p.ln_t0)).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    if x.windows(2).any(|w| w[1] == w[0]) {
        return Err(Error::InvalidParam("repeated 1/g² in scan series".into()));
    }
    let (slope, intercept, slope_err, intercept_err, r2, res) = ols(&x, &y);
    let jackknife_shift = (0..x.len())
        .map(|i| {
            let xs: Vec<f64> = x.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            let ys: Vec<f64> = y.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, v)| *v).collect();
            (ols(&xs, &ys).0 - slope).abs()
        })
        .fold(0.0, f64::max);
    Ok(FitResult {
        epsilon: series.epsilon,
        slope,
        intercept,
        slope_err,
        intercept_err,
        r2,
        f0: -slope,
        f0_err: slope_err,
        inv_g2_min: x[0],
        inv_g2_max: x[x.len() - 1],
        points: x.len(),
        jackknife_shift,
        runs_p: runs_test(&res),
        non_exponential: r2 < R2_MIN,
    })
}
