use ndarray::Array2;
use ndarray_linalg::{FactorizeInto, Solve};

use super::lattice::{ChannelBasis, LatticeSpec};
use super::potential::potential_matrix;
use crate::model::ModelParams;
use crate::{Error, Result};

/// T_k = (a²/12)·2W(X_k), W = diag((n + ½)ω) + V(X_k) − E.
pub fn site_t_matrix(params: &ModelParams, e: f64, x: f64, basis: &ChannelBasis, a: f64) -> Array2<f64> {
    let mut t = potential_matrix(params, x, basis.n0);
    for n in 0..basis.len() {
        t[[n, n]] += basis.threshold(n) - e;
    }
    t *= a * a / 6.0;
    t
}

/// ψ_k = L_k ψ_{k−1} + R_k ψ_{k+1}.
#[derive(Debug, Clone)]
pub struct NumerovSite {
    pub k: i64,
    pub l: Array2<f64>,
    pub r: Array2<f64>,
}

/// Per-site coupling matrices of the Numerov–Cowling relation
/// (I − T_{k−1})ψ_{k−1} − (2I + 10T_k)ψ_k + (I − T_{k+1})ψ_{k+1} = 0,
/// solved for ψ_k, for the interior sites k ∈ [−N_X + 1, N_X − 1].
pub fn assemble_numerov(params: &ModelParams, e: f64, lattice: &LatticeSpec, basis: &ChannelBasis) -> Result<Vec<NumerovSite>> {
    let nx = lattice.n_x as i64;
    let n = basis.len();
    let eye = Array2::<f64>::eye(n);
    let t = |k: i64| site_t_matrix(params, e, lattice.x(k), basis, lattice.a);
    let (mut tm, mut t0) = (t(-nx), t(-nx + 1));
    let mut out = Vec::with_capacity(2 * lattice.n_x - 1);
    for k in -nx + 1..nx {
        let tp = t(k + 1);
        let centre = &eye * 2.0 + &t0 * 10.0;
        let lhs = &eye - &tm;
        let rhs = &eye - &tp;
        let mut l = Array2::<f64>::zeros((n, n));
        let mut r = Array2::<f64>::zeros((n, n));
        let lu = centre.factorize_into().map_err(|_| Error::Singular { site: k })?;
        for j in 0..n {
            let lc = lu.solve(&lhs.column(j).to_owned()).map_err(|_| Error::Singular { site: k })?;
            let rc = lu.solve(&rhs.column(j).to_owned()).map_err(|_| Error::Singular { site: k })?;
            l.column_mut(j).assign(&lc);
            r.column_mut(j).assign(&rc);
        }
        out.push(NumerovSite { k, l, r });
        tm = t0;
        t0 = tp;
    }
    Ok(out)
}
