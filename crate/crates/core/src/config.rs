//! Run configuration: sectioned TOML, unknown keys rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classical::{CritOptions, Nu0Options};
use crate::exponent::{ScanPolicy, Tolerance};
use crate::model::{BarrierSpec, ModelParams};
use crate::semiclassical::{ContinuationOptions, ContourSpec, F0Options, SolverOptions};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub omega: f64,
    pub g: f64,
    /// Output directory; the command line takes precedence.
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Reserved for stochastic jitter; no code path draws random numbers.
    pub seed: u64,
    pub barrier: BarrierSection,
    pub classical: ClassicalSection,
    pub contour: ContourSection,
    pub solver: SolverSection,
    pub continuation: ContinuationSection,
    pub semiclassical: SemiclassicalSection,
    pub lattice: LatticeSection,
    pub basis: BasisSection,
    pub scan: ScanSection,
    pub fit: FitSection,
    pub compare: CompareSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BarrierFamily {
    Gaussian,
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BarrierSection {
    pub family: BarrierFamily,
    pub cutoff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassicalSection {
    pub deltas: Vec<f64>,
    pub dt: f64,
    pub t_max: f64,
    pub nu0_tol: f64,
    pub crit_lo: f64,
    pub crit_hi: f64,
    pub x_far: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContourSection {
    #[serde(rename = "T_init")]
    pub t_init: f64,
    pub t_left: f64,
    pub t_right: f64,
    pub t_c: f64,
    pub spacing: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub tol: f64,
    pub max_newton: usize,
    pub fd_step: f64,
    pub order: usize,
    pub unitarity_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ContinuationSection {
    pub step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub track_tc: bool,
    pub tail_from: f64,
    pub theta_max: f64,
    pub tail_step: f64,
    pub route_epsilon: f64,
    pub route_theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SemiclassicalSection {
    pub epsilons: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeSection {
    pub a: Option<f64>,
    #[serde(rename = "N_X")]
    pub n_x: Option<usize>,
    pub pa_max: f64,
    pub half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisSection {
    #[serde(rename = "N0")]
    pub n0: Option<usize>,
    pub margin_min: usize,
    pub margin_frac: f64,
    pub open_factor: f64,
    pub n0_max: usize,
    pub work_max: f64,
    pub check: bool,
    pub growth: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    pub epsilon: f64,
    pub inv_g2: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub series: Vec<SeriesSpec>,
    pub ln_floor: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FitSection {
    /// Per-solve CSV from `quantum`; defaults to the one in the output directory.
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareSection {
    pub semiclassical: Option<PathBuf>,
    pub quantum: Option<PathBuf>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub small: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let m = ModelParams::default();
        Self {
            omega: m.omega,
            g: m.coupling_g,
            out: None,
            workers: None,
            seed: 0,
            barrier: BarrierSection::default(),
            classical: ClassicalSection::default(),
            contour: ContourSection::default(),
            solver: SolverSection::default(),
            continuation: ContinuationSection::default(),
            semiclassical: SemiclassicalSection::default(),
            lattice: LatticeSection::default(),
            basis: BasisSection::default(),
            scan: ScanSection::default(),
            fit: FitSection::default(),
            compare: CompareSection::default(),
        }
    }
}

impl Default for BarrierSection {
    fn default() -> Self {
        Self { family: BarrierFamily::Gaussian, cutoff: BarrierSpec::default().cutoff() }
    }
}

impl Default for ClassicalSection {
    fn default() -> Self {
        let n = Nu0Options::default();
        let c = CritOptions::default();
        Self { deltas: n.deltas, dt: n.dt, t_max: n.t_max, nu0_tol: n.tol, crit_lo: c.lo, crit_hi: c.hi, x_far: c.x_far, width: c.width }
    }
}

impl Default for ContourSection {
    fn default() -> Self {
        let c = ContourSpec::default();
        Self { t_init: c.t_total, t_left: c.t_left, t_right: c.t_right, t_c: c.t_c, spacing: c.spacing }
    }
}

impl Default for SolverSection {
    fn default() -> Self {
        let s = SolverOptions::default();
        Self { tol: s.tol, max_newton: s.max_newton, fd_step: s.fd_step, order: s.order, unitarity_tol: ScanPolicy::default().unitarity_tol }
    }
}

impl Default for ContinuationSection {
    fn default() -> Self {
        let f = F0Options::default();
        let c = f.continuation;
        Self {
            step: c.step,
            min_step: c.min_step,
            max_step: c.max_step,
            track_tc: c.track_tc,
            tail_from: f.tail_from,
            theta_max: f.theta_max,
            tail_step: f.tail_step,
            route_epsilon: f.route_epsilon,
            route_theta: f.route_theta,
        }
    }
}

impl Default for SemiclassicalSection {
    fn default() -> Self {
        Self { epsilons: vec![0.4, 0.55, 0.7, 0.85, 1.0] }
    }
}

impl Default for LatticeSection {
    fn default() -> Self {
        let p = ScanPolicy::default();
        Self { a: None, n_x: None, pa_max: p.pa_max, half_width: p.half_width }
    }
}

impl Default for BasisSection {
    fn default() -> Self {
        let p = ScanPolicy::default();
        Self {
            n0: None,
            margin_min: p.margin_min,
            margin_frac: p.margin_frac,
            open_factor: p.open_factor,
            n0_max: p.n0_max,
            work_max: p.work_max,
            check: p.basis_check,
            growth: p.basis_growth,
            tol: p.basis_tol,
        }
    }
}

impl Default for ScanSection {
    /// Per-ε ranges keep ln T₀ above the noise floor.
    fn default() -> Self {
        let s = |epsilon: f64, inv_g2: &[f64]| SeriesSpec { epsilon, inv_g2: inv_g2.to_vec() };
        Self {
            series: vec![
                s(0.4, &[6.0, 9.0, 12.0, 15.0]),
                s(0.55, &[8.0, 11.0, 14.0, 17.0, 20.0]),
                s(0.7, &[10.0, 14.0, 18.0, 22.0, 26.0]),
                s(0.85, &[12.0, 16.0, 20.0, 24.0, 28.0]),
                s(1.0, &[12.0, 16.0, 20.0, 25.0, 30.0]),
            ],
            ln_floor: ScanPolicy::default().ln_floor,
        }
    }
}

impl Default for CompareSection {
    fn default() -> Self {
        let t = Tolerance::default();
        Self { semiclassical: None, quantum: None, rel_tol: t.rel, abs_tol: t.abs, small: t.small }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive and finite, got {v}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        positive("omega", self.omega)?;
        positive("g", self.g)?;
        positive("barrier.cutoff", self.barrier.cutoff)?;
        positive("classical.dt", self.classical.dt)?;
        positive("solver.tol", self.solver.tol)?;
        positive("solver.unitarity_tol", self.solver.unitarity_tol)?;
        positive("continuation.step", self.continuation.step)?;
        positive("lattice.pa_max", self.lattice.pa_max)?;
        if let Some(a) = self.lattice.a {
            positive("lattice.a", a)?;
        }
        if self.lattice.n_x == Some(0) {
            return Err(Error::Config("lattice.N_X must be positive".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be positive".into()));
        }
        for e in &self.semiclassical.epsilons {
            positive("semiclassical.epsilons", *e)?;
        }
        for s in &self.scan.series {
            positive("scan.series.epsilon", s.epsilon)?;
            for v in &s.inv_g2 {
                positive("scan.series.inv_g2", *v)?;
            }
        }
        self.model()?;
        self.contour_spec().validate(self.omega).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn barrier(&self) -> BarrierSpec {
        match self.barrier.family {
            BarrierFamily::Gaussian => BarrierSpec::Gaussian { cutoff: self.barrier.cutoff },
            BarrierFamily::Free => BarrierSpec::Free,
        }
    }

    pub fn model(&self) -> Result<ModelParams> {
        ModelParams::new(self.omega, self.g, self.barrier()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn nu0_options(&self) -> Nu0Options {
        let c = &self.classical;
        Nu0Options { deltas: c.deltas.clone(), dt: c.dt, t_max: c.t_max, tol: c.nu0_tol }
    }

    pub fn crit_options(&self) -> CritOptions {
        let c = &self.classical;
        CritOptions { lo: c.crit_lo, hi: c.crit_hi, x_far: c.x_far, dt: c.dt, t_max: c.t_max, width: c.width }
    }

    pub fn contour_spec(&self) -> ContourSpec {
        let c = &self.contour;
        ContourSpec { t_total: c.t_init, t_left: c.t_left, t_right: c.t_right, t_c: c.t_c, spacing: c.spacing }
    }

    pub fn solver_options(&self) -> SolverOptions {
        let s = &self.solver;
        SolverOptions { tol: s.tol, max_newton: s.max_newton, fd_step: s.fd_step, order: s.order }
    }

    pub fn f0_options(&self) -> F0Options {
        let c = &self.continuation;
        let continuation = ContinuationOptions {
            step: c.step,
            min_step: c.min_step,
            max_step: c.max_step,
            track_tc: c.track_tc,
            solver: self.solver_options(),
            ..ContinuationOptions::default()
        };
        F0Options {
            tail_from: c.tail_from,
            theta_max: c.theta_max,
            tail_step: c.tail_step,
            route_epsilon: c.route_epsilon,
            route_theta: c.route_theta,
            continuation,
            ..F0Options::default()
        }
    }

    pub fn scan_policy(&self) -> ScanPolicy {
        let b = &self.basis;
        ScanPolicy {
            margin_min: b.margin_min,
            margin_frac: b.margin_frac,
            open_factor: b.open_factor,
            n0_max: b.n0_max,
            work_max: b.work_max,
            pa_max: self.lattice.pa_max,
            half_width: self.lattice.half_width,
            basis_check: b.check,
            basis_growth: b.growth,
            basis_tol: b.tol,
            unitarity_tol: self.solver.unitarity_tol,
            ln_floor: self.scan.ln_floor,
            a: self.lattice.a,
            n_x: self.lattice.n_x,
            n0: b.n0,
        }
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance { rel: self.compare.rel_tol, abs: self.compare.abs_tol, small: self.compare.small }
    }
}
