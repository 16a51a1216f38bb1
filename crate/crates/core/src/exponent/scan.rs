use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::ModelParams;
use crate::quantum::{solve_scattering, ChannelBasis, Incidence, LatticeSpec};
use crate::{Error, Result};

/// How lattice and basis follow g along a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPolicy {
    /// Evanescent channels kept above the open ones: at least
    /// max(`margin_min`, `margin_frac`·open), and N0 ≥ `open_factor`·open.
    pub margin_min: usize,
    pub margin_frac: f64,
    pub open_factor: f64,
    /// Hard cap on N0; larger requests are flagged infeasible.
    pub n0_max: usize,
    /// Budget on the elimination cost (2N_X + 1)(N0 + 1)³; dearer points are
    /// flagged infeasible rather than run.
    pub work_max: f64,
    /// Largest p·a for the fastest open channel.
    pub pa_max: f64,
    /// Half-width of the lattice in rescaled units (|gX| ≤ this).
    pub half_width: f64,
    /// Re-solve with N0 grown by this factor and require |ΔT₀/T₀| < `basis_tol`.
    pub basis_check: bool,
    pub basis_growth: f64,
    pub basis_tol: f64,
    pub unitarity_tol: f64,
    /// ln T₀ below this is dominated by rounding noise in the elimination.
    pub ln_floor: f64,
    /// Fixed settings overriding the automatic choices.
    pub a: Option<f64>,
    pub n_x: Option<usize>,
    pub n0: Option<usize>,
}

impl Default for ScanPolicy {
    fn default() -> Self {
        Self {
            margin_min: 20,
            margin_frac: 0.25,
            open_factor: 2.0,
            n0_max: 400,
            work_max: 1e10,
            pa_max: 0.4,
            half_width: 9.0,
            basis_check: true,
            basis_growth: 1.25,
            basis_tol: 1e-3,
            unitarity_tol: 1e-8,
            ln_floor: -65.0,
            a: None,
            n_x: None,
            n0: None,
        }
    }
}

impl ScanPolicy {
    pub fn n0_for(&self, omega: f64, e: f64) -> usize {
        if let Some(n0) = self.n0 {
            return n0;
        }
        let open = ChannelBasis::open_count(omega, e);
        let margin = self.margin_min.max((self.margin_frac * open as f64).ceil() as usize);
        (open + margin).max((self.open_factor * open as f64).ceil() as usize)
    }

    pub fn work(n_x: usize, n0: usize) -> f64 {
        (2 * n_x + 1) as f64 * ((n0 + 1) as f64).powi(3)
    }

    pub fn lattice_for(&self, omega: f64, e: f64, g: f64) -> Result<LatticeSpec> {
        let p_max = (2.0 * e - omega).max(0.0).sqrt();
        let auto = if p_max > 0.0 { self.pa_max / p_max } else { self.pa_max };
        let a = self.a.unwrap_or(auto);
        let n_x = self.n_x.unwrap_or_else(|| (self.half_width / (g * a)).ceil() as usize);
        LatticeSpec::new(a, n_x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub g: f64,
    pub inv_g2: f64,
    pub energy: f64,
    pub t0: f64,
    pub ln_t0: f64,
    /// Per open final channel.
    pub transmission: Vec<f64>,
    pub r_total: f64,
    pub unitarity_defect: f64,
    pub n0: usize,
    pub a: f64,
    pub n_x: usize,
    /// |ΔT₀/T₀| under basis growth, when checked.
    pub basis_change: Option<f64>,
    /// Reason the point is kept out of fits.
    pub excluded: Option<String>,
}

impl ScanPoint {
    pub fn usable(&self) -> bool {
        self.excluded.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSeries {
    pub epsilon: f64,
    pub points: Vec<ScanPoint>,
}

impl ScanSeries {
    pub fn usable(&self) -> impl Iterator<Item = &ScanPoint> {
        self.points.iter().filter(|p| p.usable())
    }

    pub fn usable_count(&self) -> usize {
        self.usable().count()
    }
}

fn infeasible(g: f64, e: f64, n0: usize, reason: String) -> ScanPoint {
    ScanPoint {
        g,
        inv_g2: 1.0 / (g * g),
        energy: e,
        t0: f64::NAN,
        ln_t0: f64::NAN,
        transmission: Vec::new(),
        r_total: f64::NAN,
        unitarity_defect: f64::NAN,
        n0,
        a: f64::NAN,
        n_x: 0,
        basis_change: None,
        excluded: Some(reason),
    }
}

/// Ground-state transmission at ε = g²E for one g under `policy`.
pub fn scan_point(params: &ModelParams, epsilon: f64, g: f64, policy: &ScanPolicy) -> Result<ScanPoint> {
    if !(g > 0.0) || !g.is_finite() {
        return Err(Error::InvalidParam(format!("coupling must be positive, got {g}")));
    }
    let p = ModelParams { coupling_g: g, ..*params };
    let e = epsilon / (g * g);
    let n0 = policy.n0_for(p.omega, e);
    if n0 > policy.n0_max {
        return Ok(infeasible(g, e, n0, format!("N0 = {n0} exceeds cap {}", policy.n0_max)));
    }
    let lattice = policy.lattice_for(p.omega, e, g)?;
    let work = ScanPolicy::work(lattice.n_x, n0);
    if work > policy.work_max {
        return Ok(infeasible(g, e, n0, format!("cost {work:.1e} exceeds budget {:.1e}", policy.work_max)));
    }
    let r = solve_scattering(&p, e, 0, &lattice, &ChannelBasis::new(n0, p.omega), Incidence::Left)?;
    let mut pt = ScanPoint {
        g,
        inv_g2: 1.0 / (g * g),
        energy: e,
        t0: r.t_total,
        ln_t0: r.t_total.ln(),
        transmission: r.transmission.clone(),
        r_total: r.r_total,
        unitarity_defect: r.unitarity_defect,
        n0,
        a: lattice.a,
        n_x: lattice.n_x,
        basis_change: None,
        excluded: None,
    };
    if !(pt.ln_t0 >= policy.ln_floor) {
        pt.excluded = Some(format!("ln T0 = {:.2} below noise floor {}", pt.ln_t0, policy.ln_floor));
        return Ok(pt);
    }
    if policy.basis_check {
        let n1 = (n0 as f64 * policy.basis_growth).ceil() as usize;
        let r1 = solve_scattering(&p, e, 0, &lattice, &ChannelBasis::new(n1, p.omega), Incidence::Left)?;
        let d = ((r1.t_total - r.t_total) / r.t_total).abs();
        pt.basis_change = Some(d);
        if !(d < policy.basis_tol) {
            pt.excluded = Some(format!("basis unconverged: |dT0/T0| = {d:.2e} for N0 {n0} -> {n1}"));
            return Ok(pt);
        }
    }
    if !(pt.unitarity_defect < policy.unitarity_tol) {
        pt.excluded = Some(format!("unitarity defect {:.2e}", pt.unitarity_defect));
    }
    Ok(pt)
}

/// Parallel over g; results keep the order of `gs`.
pub fn scan_g(params: &ModelParams, epsilon: f64, gs: &[f64], policy: &ScanPolicy) -> Result<ScanSeries> {
    params.validate()?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParam(format!("ε must be positive, got {epsilon}")));
    }
    let points = gs.par_iter().map(|&g| scan_point(params, epsilon, g, policy)).collect::<Result<Vec<_>>>()?;
    Ok(ScanSeries { epsilon, points })
}
