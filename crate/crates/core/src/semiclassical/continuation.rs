use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bvp::{solve_at_energy, solve_bvp, BvpSolution, ExponentRecord, Shooter, SolverOptions, Unknowns};
use super::contour::ContourSpec;
use super::extrapolate::{extrapolate_f0, Extrapolation};
use crate::model::{ModelParams, Sphaleron};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    /// Fixed θ, T solved for.
    Epsilon,
    /// Fixed ε, T solved for.
    Theta,
    /// Fixed θ, ε measured.
    T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub growth: f64,
    /// Move t_c to the turning point of the X motion after each step.
    pub track_tc: bool,
    pub tc_window: (f64, f64),
    pub tc_scan_step: f64,
    /// Largest t_c move per continuation step.
    pub tc_max_move: f64,
    pub solver: SolverOptions,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            step: 0.05,
            min_step: 1e-4,
            max_step: 0.5,
            growth: 1.5,
            track_tc: true,
            tc_window: (-10.0, 15.0),
            tc_scan_step: 0.01,
            tc_max_move: 1.0,
            solver: SolverOptions::default(),
        }
    }
}

#[derive(Debug)]
pub struct Branch {
    pub param: SweepParam,
    pub points: Vec<BvpSolution>,
    /// Contour to use for a further step from the last point.
    pub next_contour: ContourSpec,
    /// Why the sweep stopped short of its target, if it did.
    pub end: Option<Error>,
}

impl Branch {
    pub fn records(&self) -> Vec<ExponentRecord> {
        self.points.iter().map(|s| s.record()).collect()
    }

    pub fn last(&self) -> Option<&BvpSolution> {
        self.points.last()
    }

    pub fn reached(&self) -> bool {
        self.end.is_none()
    }

    pub fn into_result(self) -> Result<Self> {
        match self.end {
            Some(e) => Err(e),
            None => Ok(self),
        }
    }
}

fn value(sol: &BvpSolution, param: SweepParam) -> f64 {
    match param {
        SweepParam::Epsilon => sol.charges.epsilon,
        SweepParam::Theta => sol.theta,
        SweepParam::T => sol.contour.t_total,
    }
}

fn pack(sol: &BvpSolution) -> [f64; 4] {
    [sol.unknowns.p, sol.unknowns.v.re, sol.unknowns.v.im, sol.contour.t_total]
}

pub(crate) fn track_tc(params: &ModelParams, sol: &BvpSolution, opts: &ContinuationOptions) -> Result<ContourSpec> {
    let mut c = sol.contour;
    if opts.track_tc {
        let sh = Shooter::new(params, &opts.solver);
        // follow the minimum continuously rather than jumping between minima
        let window = (opts.tc_window.0.max(c.t_c - opts.tc_max_move), opts.tc_window.1.min(c.t_c + opts.tc_max_move));
        let t = sh.turning_point(&sol.coeffs, c.t_left, window, opts.tc_scan_step)?;
        c.t_c = t.clamp(c.t_left + 1.0, c.t_right - 1.0);
    }
    Ok(c)
}

/// Predictor-corrector continuation from `start` until the swept quantity
/// reaches `target`.  The previous step is extrapolated linearly to seed the
/// next solve; failures halve the step, quick convergence grows it.
pub fn continuation_sweep(params: &ModelParams, start: &BvpSolution, param: SweepParam, target: f64, opts: &ContinuationOptions) -> Branch {
    let mut points = vec![start.clone()];
    let mut contour = match track_tc(params, start, opts) {
        Ok(c) => c,
        Err(e) => return Branch { param, points, next_contour: start.contour, end: Some(e) },
    };
    let eps_fixed = start.charges.epsilon;
    let theta_fixed = start.theta;
    let mut h = opts.step.abs();
    let mut prev: Option<([f64; 4], f64)> = None;
    let mut end = None;
    loop {
        let cur = points.last().expect("branch holds its start");
        let s0 = value(cur, param);
        let gap = target - s0;
        if gap.abs() <= 1e-12 * target.abs().max(1.0) {
            break;
        }
        let step = gap.signum() * h.min(gap.abs());
        let s1 = s0 + step;
        let q0 = pack(cur);
        let mut g = q0;
        if let Some((qp, ds)) = prev {
            let r = step / ds;
            for k in 0..4 {
                g[k] = q0[k] + (q0[k] - qp[k]) * r;
            }
        }
        let guess = Unknowns { p: g[0], v: C64::new(g[1], g[2]) };
        let trial = match param {
            SweepParam::Epsilon => solve_at_energy(params, &ContourSpec { t_total: g[3], ..contour }, theta_fixed, s1, &guess, &opts.solver),
            SweepParam::Theta => solve_at_energy(params, &ContourSpec { t_total: g[3], ..contour }, s1, eps_fixed, &guess, &opts.solver),
            SweepParam::T => solve_bvp(params, &ContourSpec { t_total: s1, ..contour }, theta_fixed, &guess, &opts.solver),
        };
        match trial {
            Ok(sol) if sol.transmitted == cur.transmitted => {
                let fast = sol.iterations <= 3;
                prev = Some((q0, step));
                match track_tc(params, &sol, opts) {
                    Ok(c) => contour = c,
                    Err(e) => {
                        points.push(sol);
                        end = Some(e);
                        break;
                    }
                }
                points.push(sol);
                if fast {
                    h = (h * opts.growth).min(opts.max_step);
                }
            }
            other => {
                h *= 0.5;
                if h < opts.min_step {
                    let reason = match other {
                        Ok(_) => "solution changed branch (final direction flipped)".to_string(),
                        Err(e) => e.to_string(),
                    };
                    end = Some(Error::StepUnderflow { at: format!("{param:?} = {s0:.6}"), reason });
                    break;
                }
            }
        }
    }
    Branch { param, points, next_contour: contour, end }
}

/// Periodic-instanton seed near the top of the barrier: a small real
/// oscillation along the sphaleron's unstable direction turning at the
/// corner, continued backwards in real time to the asymptotic region.
pub fn sphaleron_seed(params: &ModelParams, contour: &ContourSpec, opts: &SolverOptions) -> Result<BvpSolution> {
    const AMPLITUDE: f64 = 0.05;
    const BACK: f64 = 45.0;
    // exactly at the linear period every small amplitude solves the problem
    const DETUNE: f64 = 1.001;
    let w = params.omega;
    let sph = Sphaleron::new(w);
    let sh = Shooter::new(params, opts);
    let z0 = super::taylor::State {
        x: C64::new(AMPLITUDE * sph.unstable[0], 0.0),
        y: C64::new(AMPLITUDE * sph.unstable[1], 0.0),
        vx: C64::new(0.0, 0.0),
        vy: C64::new(0.0, 0.0),
        s: C64::new(0.0, 0.0),
    };
    let n = (BACK / contour.spacing).ceil() as usize;
    let z = sh.integ.advance(z0, C64::new(-1.0, 0.0), BACK, n, |_, _| {})?;
    let p = z.vx.re;
    let tb = -BACK;
    let x0c = z.x.re - p * tb;
    let i = C64::new(0.0, 1.0);
    let v = 0.5 * (z.y - i * z.vy / w) * (-i * w * tb).exp();
    // X(t′) = x0c + p(t′ − t_c) vanishes at t′ = 0 once t_c = x0c / p
    let t_c = x0c / p;
    let guess = Unknowns { p, v: v * (-i * w * t_c).exp() };
    let spec = ContourSpec { t_total: DETUNE * sph.period(), t_c, ..*contour };
    solve_bvp(params, &spec, 0.0, &guess, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct F0Options {
    /// θ at which the tail of the θ continuation starts being recorded.
    pub tail_from: f64,
    pub theta_max: f64,
    /// Continuation step cap inside the recorded tail.
    pub tail_step: f64,
    /// Tolerated reversal in F(ν) before the tail counts as noisy.
    pub noise_tol: f64,
    /// Targets above this energy are reached through θ = `route_theta`.
    pub route_epsilon: f64,
    pub route_theta: f64,
    pub continuation: ContinuationOptions,
}

impl Default for F0Options {
    fn default() -> Self {
        Self { tail_from: 9.0, theta_max: 13.0, tail_step: 0.5, noise_tol: 1e-7, route_epsilon: 0.9, route_theta: 6.0, continuation: ContinuationOptions::default() }
    }
}

#[derive(Debug, Clone)]
pub struct F0Result {
    pub epsilon: f64,
    pub extrapolation: Extrapolation,
    /// Point the θ continuation started from.
    pub start: ExponentRecord,
    /// Records used for the ν → 0 fit, in order of increasing θ.
    pub tail: Vec<ExponentRecord>,
}

/// Runs θ continuation at fixed ε from `start` and extrapolates ν → 0.
pub fn f0_from(params: &ModelParams, start: &BvpSolution, opts: &F0Options) -> Result<F0Result> {
    let epsilon = start.charges.epsilon;
    let head = continuation_sweep(params, start, SweepParam::Theta, opts.tail_from, &opts.continuation).into_result()?;
    let mut tail_opts = opts.continuation;
    tail_opts.max_step = opts.tail_step;
    tail_opts.step = tail_opts.step.min(opts.tail_step);
    let mut from = head.last().expect("non-empty branch").clone();
    from.contour = head.next_contour;
    let tail = continuation_sweep(params, &from, SweepParam::Theta, opts.theta_max, &tail_opts);
    let records = tail.records();
    // a branch end at large θ still leaves a usable tail
    if records.len() < 4 {
        if let Some(e) = tail.end {
            return Err(e);
        }
    }
    let nu: Vec<f64> = records.iter().map(|r| r.nu).collect();
    let f: Vec<f64> = records.iter().map(|r| r.f).collect();
    let extrapolation = extrapolate_f0(epsilon, &nu, &f, opts.noise_tol)?;
    Ok(F0Result { epsilon, extrapolation, start: start.record(), tail: records })
}

/// Reaches (ε, θ) = (`epsilon`, 0) from a point on the θ = 0 branch, or
/// (`epsilon`, route θ) when ε lies above the route energy: near ε = 1 the
/// θ = 0 branch ends on the sphaleron, so higher energies are approached
/// with θ > 0.
fn reach(params: &ModelParams, branch: &[BvpSolution], epsilon: f64, opts: &F0Options) -> Result<BvpSolution> {
    let eb = epsilon.min(opts.route_epsilon);
    let near = branch
        .iter()
        .min_by(|a, b| (a.charges.epsilon - eb).abs().total_cmp(&(b.charges.epsilon - eb).abs()))
        .ok_or(Error::InsufficientPoints { got: 0, need: 1 })?;
    let step = |s: &BvpSolution, param, target| -> Result<BvpSolution> {
        let b = continuation_sweep(params, s, param, target, &opts.continuation).into_result()?;
        let mut last = b.points.into_iter().last().expect("non-empty branch");
        last.contour = b.next_contour;
        Ok(last)
    };
    let mut s = step(near, SweepParam::Epsilon, eb)?;
    if epsilon > eb {
        s = step(&s, SweepParam::Theta, opts.route_theta)?;
        s = step(&s, SweepParam::Epsilon, epsilon)?;
    }
    Ok(s)
}

/// F₀ at each requested ε: seed at the sphaleron, continue the θ = 0 branch
/// down in ε, then run independent continuations (in parallel) per target.
pub fn f0_at_energies(params: &ModelParams, contour: &ContourSpec, energies: &[f64], opts: &F0Options) -> Result<Vec<Result<F0Result>>> {
    if energies.is_empty() {
        return Ok(Vec::new());
    }
    let seed = sphaleron_seed(params, contour, &opts.continuation.solver)?;
    let lo = energies.iter().cloned().fold(opts.route_epsilon, f64::min);
    let b = continuation_sweep(params, &seed, SweepParam::Epsilon, lo, &opts.continuation);
    let mut branch = b.points;
    if let Some(last) = branch.last_mut() {
        last.contour = b.next_contour;
    }
    Ok(energies.par_iter().map(|&e| f0_from(params, &reach(params, &branch, e, opts)?, opts)).collect())
}
