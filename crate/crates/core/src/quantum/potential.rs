use ndarray::Array2;

use super::hermite::{gauss_hermite, hermite_functions};
use crate::model::{BarrierSpec, ModelParams};
use crate::{Error, Result};

/// V_{nn′}(X) = g⁻²⟨n| exp(−g²(X + y)²/2) |n′⟩ for n, n′ ≤ n0, oscillator
/// of unit mass and frequency ω.
///
/// Writing y = (a + a†)/√(2ω), the operator G = exp(−g²(X + y)²/2)
/// satisfies (1 + c) a G = G a† − b G − c a† G with c = g²/(2ω) and
/// b = g²X/√(2ω).  Taking matrix elements gives a three-term recursion in
/// the row index, seeded by the closed-form ⟨0|G|0⟩ and the symmetry of G.
pub fn potential_matrix(params: &ModelParams, x: f64, n0: usize) -> Array2<f64> {
    let n = n0 + 1;
    let mut gm = Array2::<f64>::zeros((n, n));
    if matches!(params.barrier, BarrierSpec::Free) {
        return gm;
    }
    let w = params.omega;
    let g2 = params.coupling_g * params.coupling_g;
    let c = g2 / (2.0 * w);
    let big_a = w + 0.5 * g2;
    let b = g2 * x / (2.0 * w).sqrt();
    let inv = 1.0 / (1.0 + c);
    let sq: Vec<f64> = (0..=n).map(|k| (k as f64).sqrt()).collect();
    gm[[0, 0]] = (w / big_a).sqrt() * (-g2 * x * x * w / (2.0 * big_a)).exp();
    for col in 0..n {
        if col > 0 {
            gm[[0, col]] = gm[[col, 0]];
        }
        for m in 0..n - 1 {
            let mut v = -b * gm[[m, col]];
            if col > 0 {
                v += sq[col] * gm[[m, col - 1]];
            }
            if m > 0 {
                v -= c * sq[m] * gm[[m - 1, col]];
            }
            gm[[m + 1, col]] = v * inv / sq[m + 1];
        }
    }
    // the recursion reproduces symmetry to rounding; enforce it exactly
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (gm[[i, j]] + gm[[j, i]]);
            gm[[i, j]] = s;
            gm[[j, i]] = s;
        }
    }
    gm / g2
}

/// Independent Gauss–Hermite evaluation of the same matrix (self-test oracle).
pub fn potential_matrix_quadrature(params: &ModelParams, x: f64, n0: usize, nodes: usize) -> Result<Array2<f64>> {
    if nodes <= n0 {
        return Err(Error::InvalidParam(format!("{nodes} quadrature nodes cannot resolve level {n0}")));
    }
    let n = n0 + 1;
    let mut out = Array2::<f64>::zeros((n, n));
    if matches!(params.barrier, BarrierSpec::Free) {
        return Ok(out);
    }
    let (s, wts) = gauss_hermite(nodes)?;
    let g = params.coupling_g;
    let sqw = params.omega.sqrt();
    for (si, wi) in s.iter().zip(&wts) {
        let y = si / sqw;
        let u = params.barrier.eval_re(g * (x + y)) / (g * g);
        let h = hermite_functions(n0, *si);
        let f = wi * u;
        for i in 0..n {
            let hi = f * h[i];
            for j in 0..=i {
                out[[i, j]] += hi * h[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            out[[j, i]] = out[[i, j]];
        }
    }
    Ok(out)
}
