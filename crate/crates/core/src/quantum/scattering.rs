use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;
use serde::{Deserialize, Serialize};

use super::elimination::{eliminate, Closure};
use super::lattice::{ChannelBasis, Dispersion, LatticeSpec};
use super::numerov::site_t_matrix;
use crate::model::ModelParams;
use crate::{Error, Result, C64};

/// Side from which the incoming wave arrives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Incidence {
    #[default]
    Left,
    Right,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScatteringResult {
    pub energy: f64,
    pub g: f64,
    pub n_in: usize,
    /// T_n, R_n for the open channels n = 0..open.
    pub transmission: Vec<f64>,
    pub reflection: Vec<f64>,
    pub t_total: f64,
    pub r_total: f64,
    pub unitarity_defect: f64,
    pub cond_max: f64,
    pub lattice: LatticeSpec,
    pub basis: ChannelBasis,
}

impl ScatteringResult {
    pub fn open(&self) -> usize {
        self.transmission.len()
    }

    pub fn epsilon(&self) -> f64 {
        self.energy * self.g * self.g
    }
}

struct Setup {
    disp: Dispersion,
    left: Closure,
    right: Closure,
}

fn setup(params: &ModelParams, e: f64, n_in: usize, lattice: &LatticeSpec, basis: &ChannelBasis) -> Result<Setup> {
    if n_in > basis.n0 {
        return Err(Error::InvalidParam(format!("incoming channel {n_in} outside basis n ≤ {}", basis.n0)));
    }
    if (basis.omega - params.omega).abs() > 1e-15 * params.omega {
        return Err(Error::InvalidParam("basis frequency differs from model ω".into()));
    }
    let disp = Dispersion::new(e, basis, lattice.a)?;
    if !disp.is_open(n_in) {
        return Err(Error::ClosedChannel(n_in));
    }
    if let Some(ch) = (0..basis.len()).find(|&n| disp.is_open(n) && disp.p[n] * lattice.a >= 0.5) {
        return Err(Error::Coarse { pa: disp.p[ch] * lattice.a, channel: ch });
    }
    let nx = lattice.n_x as i64;
    let incoming = |k: i64| -> Vec<C64> {
        (0..basis.len()).map(|n| if n == n_in { disp.plane_wave(n, k) } else { C64::new(0.0, 0.0) }).collect()
    };
    let (edge, inner) = (incoming(-nx), incoming(-nx + 1));
    let source = (0..basis.len()).map(|n| edge[n] - disp.lambda[n] * inner[n]).collect();
    Ok(Setup {
        left: Closure { lambda: disp.lambda.clone(), source: Some(source) },
        right: Closure { lambda: disp.lambda.clone(), source: None },
        disp,
    })
}

/// Amplitudes at the inner edge sites → flux-normalized probabilities.
fn finish(
    params: &ModelParams,
    e: f64,
    n_in: usize,
    lattice: &LatticeSpec,
    basis: &ChannelBasis,
    disp: &Dispersion,
    psi_first: &Array1<C64>,
    psi_last: &Array1<C64>,
    cond_max: f64,
) -> ScatteringResult {
    let nx = lattice.n_x as i64;
    let (first, last) = (-nx + 1, nx - 1);
    let f_in = disp.flux(n_in);
    let (mut tr, mut rf) = (Vec::new(), Vec::new());
    for n in 0..basis.len() {
        if !disp.is_open(n) {
            continue;
        }
        let inc = if n == n_in { disp.plane_wave(n, first) } else { C64::new(0.0, 0.0) };
        // reflected wave e^{−iqka}, transmitted e^{iqka}
        let r = (psi_first[n] - inc) * disp.plane_wave(n, first);
        let t = psi_last[n] / disp.plane_wave(n, last);
        let ratio = disp.flux(n) / f_in;
        tr.push(t.norm_sqr() * ratio);
        rf.push(r.norm_sqr() * ratio);
    }
    let t_total: f64 = tr.iter().sum();
    let r_total: f64 = rf.iter().sum();
    ScatteringResult {
        energy: e,
        g: params.coupling_g,
        n_in,
        transmission: tr,
        reflection: rf,
        t_total,
        r_total,
        unitarity_defect: (1.0 - t_total - r_total).abs(),
        cond_max,
        lattice: *lattice,
        basis: *basis,
    }
}

/// Multichannel transmission at total energy `e` (unscaled) for an incoming
/// wave in oscillator level `n_in`.
pub fn solve_scattering(
    params: &ModelParams,
    e: f64,
    n_in: usize,
    lattice: &LatticeSpec,
    basis: &ChannelBasis,
    incidence: Incidence,
) -> Result<ScatteringResult> {
    let s = setup(params, e, n_in, lattice, basis)?;
    let sign = match incidence {
        Incidence::Left => 1.0,
        Incidence::Right => -1.0,
    };
    let t_of = |k: i64| site_t_matrix(params, e, sign * lattice.x(k), basis, lattice.a);
    let el = eliminate(t_of, lattice.n_x, &s.left, &s.right)?;
    Ok(finish(params, e, n_in, lattice, basis, &s.disp, &el.psi_first, &el.psi_last, el.cond_max))
}

/// Same problem assembled as one dense linear system in ψ (oracle for small sizes).
pub fn solve_dense(params: &ModelParams, e: f64, n_in: usize, lattice: &LatticeSpec, basis: &ChannelBasis) -> Result<(ScatteringResult, Array1<C64>)> {
    let s = setup(params, e, n_in, lattice, basis)?;
    let nx = lattice.n_x as i64;
    let n = basis.len();
    let sites = 2 * lattice.n_x - 1;
    let dim = sites * n;
    if dim > 20_000 {
        return Err(Error::InvalidParam(format!("dense oracle too large ({dim} unknowns)")));
    }
    let ts: Vec<Array2<f64>> = (-nx..=nx).map(|k| site_t_matrix(params, e, lattice.x(k), basis, lattice.a)).collect();
    let t = |k: i64| &ts[(k + nx) as usize];
    let mut m = Array2::<C64>::zeros((dim, dim));
    let mut rhs = Array1::<C64>::zeros(dim);
    let src = s.left.source.as_ref().expect("left source");
    for (row_site, k) in (-nx + 1..nx).enumerate() {
        let r0 = row_site * n;
        for i in 0..n {
            for j in 0..n {
                let eye = if i == j { 1.0 } else { 0.0 };
                let a = eye - t(k - 1)[[i, j]];
                let b = -(2.0 * eye + 10.0 * t(k)[[i, j]]);
                let c = eye - t(k + 1)[[i, j]];
                m[[r0 + i, r0 + j]] += C64::new(b, 0.0);
                if k == -nx + 1 {
                    // ψ_{−N} = Λψ_first + s
                    m[[r0 + i, r0 + j]] += a * s.left.lambda[j];
                    rhs[r0 + i] -= a * src[j];
                } else {
                    m[[r0 + i, r0 - n + j]] += C64::new(a, 0.0);
                }
                if k == nx - 1 {
                    m[[r0 + i, r0 + j]] += c * s.right.lambda[j];
                } else {
                    m[[r0 + i, r0 + n + j]] += C64::new(c, 0.0);
                }
            }
        }
    }
    let psi = m.solve_into(rhs)?;
    let psi_first = psi.slice(ndarray::s![0..n]).to_owned();
    let psi_last = psi.slice(ndarray::s![dim - n..dim]).to_owned();
    Ok((finish(params, e, n_in, lattice, basis, &s.disp, &psi_first, &psi_last, f64::NAN), psi))
}
