use ndarray::{Array1, Array2};
use ndarray_linalg::LeastSquaresSvd;
use serde::{Deserialize, Serialize};

use super::bvp::{ExponentRecord, Provenance};
use crate::{Error, Result};

const MIN_POINTS: usize = 4;

/// ν → 0 intercept of F(ε, ν) from linear and quadratic least-squares fits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extrapolation {
    pub epsilon: f64,
    /// Quadratic-fit intercept, the reported F₀.
    pub f0: f64,
    pub linear: f64,
    pub quadratic: f64,
    /// |linear − quadratic|.
    pub error: f64,
    pub points: usize,
    pub nu_min: f64,
}

impl Extrapolation {
    pub fn relative_spread(&self) -> f64 {
        self.error / self.f0.abs().max(f64::MIN_POSITIVE)
    }

    pub fn record(&self) -> ExponentRecord {
        ExponentRecord {
            epsilon: self.epsilon,
            nu: 0.0,
            t: f64::NAN,
            theta: f64::INFINITY,
            f: self.f0,
            two_im_s0: f64::NAN,
            residual_norm: self.error,
            nodes_b: 0,
            nodes_c: 0,
            nodes_de: 0,
            provenance: Provenance::Semiclassical,
        }
    }
}

fn poly_intercept(nu: &[f64], f: &[f64], degree: usize) -> Result<f64> {
    let scale = nu.iter().cloned().fold(0.0, f64::max);
    let mut a = Array2::<f64>::zeros((nu.len(), degree + 1));
    for (i, &x) in nu.iter().enumerate() {
        for k in 0..=degree {
            a[[i, k]] = (x / scale).powi(k as i32);
        }
    }
    let b = Array1::from(f.to_vec());
    Ok(a.least_squares(&b)?.solution[0])
}

/// `nu` must decrease strictly and F must be monotone along it; `noise_tol`
/// is the size of reversal tolerated before the sequence counts as noisy.
pub fn extrapolate_f0(epsilon: f64, nu: &[f64], f: &[f64], noise_tol: f64) -> Result<Extrapolation> {
    if nu.len() != f.len() {
        return Err(Error::InvalidParam("ν and F sequences differ in length".into()));
    }
    if nu.len() < MIN_POINTS {
        return Err(Error::InsufficientPoints { got: nu.len(), need: MIN_POINTS });
    }
    if nu.windows(2).any(|w| !(w[1] < w[0])) || nu.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::Extrapolation("ν sequence is not strictly decreasing toward 0".into()));
    }
    let sign = (f[f.len() - 1] - f[0]).signum();
    if f.windows(2).any(|w| sign * (w[1] - w[0]) < -noise_tol) {
        return Err(Error::Extrapolation("F(ν) is not monotone".into()));
    }
    let linear = poly_intercept(nu, f, 1)?;
    let quadratic = poly_intercept(nu, f, 2)?;
    Ok(Extrapolation {
        epsilon,
        f0: quadratic,
        linear,
        quadratic,
        error: (linear - quadratic).abs(),
        points: nu.len(),
        nu_min: nu[nu.len() - 1],
    })
}
