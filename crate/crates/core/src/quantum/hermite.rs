use ndarray::Array2;
use ndarray_linalg::{EigValsh, UPLO};

use crate::Result;

/// Normalized Hermite functions h_0..=h_n at s, h_k(s) = H_k(s)e^{−s²/2}/√(2^k k! √π).
pub fn hermite_functions(n: usize, s: f64) -> Vec<f64> {
    let mut h = Vec::with_capacity(n + 1);
    h.push(std::f64::consts::PI.powf(-0.25) * (-0.5 * s * s).exp());
    if n >= 1 {
        h.push(std::f64::consts::SQRT_2 * s * h[0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * s * h[k] - (kf / (kf + 1.0)).sqrt() * h[k - 1];
        h.push(next);
    }
    h
}

/// Gauss–Hermite nodes with weights already multiplied by e^{s²}, so that
/// ∫ f(s) ds ≈ Σ W_i f(s_i) for f decaying like a Hermite function product.
///
/// Nodes come from the Jacobi matrix; weights from the Christoffel sum
/// W_i = 1 / Σ_k h_k(s_i)², which never forms e^{±s²} explicitly.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut jac = Array2::<f64>::zeros((n, n));
    for k in 1..n {
        let b = (k as f64 / 2.0).sqrt();
        jac[[k, k - 1]] = b;
        jac[[k - 1, k]] = b;
    }
    let nodes = jac.eigvalsh(UPLO::Lower)?.to_vec();
    let weights = nodes
        .iter()
        .map(|&s| 1.0 / hermite_functions(n - 1, s).iter().map(|h| h * h).sum::<f64>())
        .collect();
    Ok((nodes, weights))
}
