use serde::{Deserialize, Serialize};

use super::fit::FitResult;

/// F₀ from the semiclassical side with its ν → 0 extrapolation error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiclassicalF0 {
    pub epsilon: f64,
    pub f0: f64,
    pub err: f64,
}

/// Agreement rule: relative difference below `rel`, or absolute below `abs`
/// where the quantum F₀ is below `small`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub small: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 0.05, abs: 0.02, small: 0.4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub epsilon: f64,
    pub f0_semi: f64,
    pub f0_semi_err: f64,
    pub f0_quantum: f64,
    pub f0_quantum_err: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub within: bool,
}

/// Piecewise-linear interpolation of (x, y, err) samples at `x`; None
/// outside the sampled range.
pub fn interpolate(samples: &[(f64, f64, f64)], x: f64) -> Option<(f64, f64)> {
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let tol = 1e-12 * x.abs().max(1.0);
    if let Some(p) = s.iter().find(|p| (p.0 - x).abs() <= tol) {
        return Some((p.1, p.2));
    }
    s.windows(2).find(|w| w[0].0 < x && x < w[1].0).map(|w| {
        let t = (x - w[0].0) / (w[1].0 - w[0].0);
        (w[0].1 + t * (w[1].1 - w[0].1), w[0].2.max(w[1].2))
    })
}

/// Quantum F₀ interpolated onto the semiclassical ε points; points outside
/// the quantum range are dropped.
pub fn compare(semi: &[SemiclassicalF0], quantum: &[FitResult], tol: &Tolerance) -> Vec<ComparisonRow> {
    let q: Vec<(f64, f64, f64)> = quantum.iter().map(|f| (f.epsilon, f.f0, f.f0_err)).collect();
    semi.iter()
        .filter_map(|s| {
            let (fq, eq) = interpolate(&q, s.epsilon)?;
            let abs_diff = (s.f0 - fq).abs();
            let rel_diff = abs_diff / fq.abs();
            let within = if fq < tol.small { abs_diff < tol.abs } else { rel_diff < tol.rel };
            Some(ComparisonRow {
                epsilon: s.epsilon,
                f0_semi: s.f0,
                f0_semi_err: s.err,
                f0_quantum: fq,
                f0_quantum_err: eq,
                abs_diff,
                rel_diff,
                within,
            })
        })
        .collect()
}
