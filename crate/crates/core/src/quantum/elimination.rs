//! Block elimination of the Numerov chain.
//!
//! With φ_k = (I − T_k)ψ_k the three-point relation becomes
//! φ_{k−1} − M_k φ_k + φ_{k+1} = 0, M_k = 12(I − T_k)⁻¹ − 10I, so every
//! off-diagonal block is the identity.  Each end is closed by
//! ψ_edge = Λψ_inner + s (outgoing or decaying waves plus an optional
//! incoming source), which keeps every pivot complex and away from the
//! real box resonances of a hard-wall closure.  Sites are then eliminated
//! from both ends toward the centre: φ_k = h_k + H_k φ_{k±1}, and the
//! product of the H's is carried along so the edge values come out of the
//! final centre solve without storing the chain.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Inverse, Solve};

use crate::{Error, Result, C64};

/// ψ_edge = diag(lambda)·ψ_inner + source.
#[derive(Debug, Clone)]
pub struct Closure {
    pub lambda: Vec<C64>,
    pub source: Option<Vec<C64>>,
}

#[derive(Debug, Clone)]
pub struct Eliminated {
    /// ψ at −N_X, −N_X + 1, N_X − 1, N_X.
    pub psi_left_edge: Array1<C64>,
    pub psi_first: Array1<C64>,
    pub psi_last: Array1<C64>,
    pub psi_right_edge: Array1<C64>,
    /// Largest 1-norm condition estimate over all pivots.
    pub cond_max: f64,
}

fn complex(m: &Array2<f64>) -> Array2<C64> {
    m.mapv(|v| C64::new(v, 0.0))
}

fn one_norm(m: &Array2<C64>) -> f64 {
    m.columns().into_iter().map(|c| c.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// K = (I − T)⁻¹ and M = 12K − 10I for one site.
fn site_blocks(t: &Array2<f64>, site: i64) -> Result<(Array2<f64>, Array2<f64>)> {
    let n = t.nrows();
    let eye = Array2::<f64>::eye(n);
    let k = (&eye - t).inv().map_err(|_| Error::Singular { site })?;
    let m = &k * 12.0 - &eye * 10.0;
    Ok((k, m))
}

struct Sweep {
    h: Array2<C64>,
    hv: Array1<C64>,
    p: Array2<C64>,
    pv: Array1<C64>,
    k_edge: Array2<f64>,
    cond_max: f64,
}

impl Sweep {
    fn pivot(d: &Array2<C64>, site: i64, cond: &mut f64) -> Result<Array2<C64>> {
        let inv = d.inv().map_err(|_| Error::Singular { site })?;
        let c = one_norm(d) * one_norm(&inv);
        if !c.is_finite() {
            return Err(Error::Singular { site });
        }
        *cond = cond.max(c);
        Ok(-inv)
    }

    /// First eliminated site, adjacent to the closed edge.
    fn start(t_outer: &Array2<f64>, t_edge: &Array2<f64>, closure: &Closure, site: i64) -> Result<Self> {
        let n = t_edge.nrows();
        let (k_edge, m) = site_blocks(t_edge, site)?;
        let outer = Array2::<f64>::eye(n) - t_outer;
        // Z = (I − T_outer)·Λ·K_edge
        let mut lk = complex(&k_edge);
        for (i, mut row) in lk.rows_mut().into_iter().enumerate() {
            row *= closure.lambda[i];
        }
        let outer_c = complex(&outer);
        let z = outer_c.dot(&lk);
        let d = z - complex(&m);
        let mut cond = 0.0;
        let h = Self::pivot(&d, site, &mut cond)?;
        let hv = match &closure.source {
            Some(s) => h.dot(&outer_c.dot(&Array1::from(s.clone()))),
            None => Array1::zeros(n),
        };
        Ok(Self { p: h.clone(), pv: hv.clone(), h, hv, k_edge, cond_max: cond })
    }

    fn advance(&mut self, t: &Array2<f64>, site: i64) -> Result<()> {
        let (_, m) = site_blocks(t, site)?;
        let d = &self.h - &complex(&m);
        let h = Self::pivot(&d, site, &mut self.cond_max)?;
        let hv = h.dot(&self.hv);
        self.pv = &self.pv + &self.p.dot(&hv);
        self.p = self.p.dot(&h);
        self.h = h;
        self.hv = hv;
        Ok(())
    }
}

/// Solve the closed chain on sites −n_x..=n_x given T_k = `t_of(k)`.
pub fn eliminate<F>(t_of: F, n_x: usize, left: &Closure, right: &Closure) -> Result<Eliminated>
where
    F: Fn(i64) -> Array2<f64>,
{
    if n_x < 2 {
        return Err(Error::InvalidParam("elimination needs N_X ≥ 2".into()));
    }
    let nx = n_x as i64;
    let (first, last, centre) = (-nx + 1, nx - 1, 0_i64);

    let mut ls = Sweep::start(&t_of(-nx), &t_of(first), left, first)?;
    for k in first + 1..centre {
        ls.advance(&t_of(k), k)?;
    }
    let mut rs = Sweep::start(&t_of(nx), &t_of(last), right, last)?;
    for k in (centre + 1..last).rev() {
        rs.advance(&t_of(k), k)?;
    }

    let (_, mc) = site_blocks(&t_of(centre), centre)?;
    let dc = &ls.h + &rs.h - &complex(&mc);
    let rhs = -(&ls.hv + &rs.hv);
    let phi_c = dc.solve(&rhs).map_err(|_| Error::Singular { site: centre })?;
    let cond_c = one_norm(&dc) * one_norm(&dc.inv().map_err(|_| Error::Singular { site: centre })?);

    let phi_first = &ls.pv + &ls.p.dot(&phi_c);
    let phi_last = &rs.pv + &rs.p.dot(&phi_c);
    let psi_first = complex(&ls.k_edge).dot(&phi_first);
    let psi_last = complex(&rs.k_edge).dot(&phi_last);

    let edge = |c: &Closure, inner: &Array1<C64>| -> Array1<C64> {
        let mut out: Array1<C64> = inner.iter().zip(&c.lambda).map(|(v, l)| v * l).collect();
        if let Some(s) = &c.source {
            out += &Array1::from(s.clone());
        }
        out
    };
    Ok(Eliminated {
        psi_left_edge: edge(left, &psi_first),
        psi_right_edge: edge(right, &psi_last),
        psi_first,
        psi_last,
        cond_max: ls.cond_max.max(rs.cond_max).max(cond_c),
    })
}
