use super::integrator::{propagate, Outcome};
use crate::model::{asymptotic_charges, ModelParams, PhasePoint};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    pub value: f64,
    pub bracket: (f64, f64),
    pub steps: usize,
    pub dt: f64,
    pub x_far: f64,
    /// Extra diagnostic: total energy of the emitted state for ν₀, NaN otherwise.
    pub epsilon: f64,
}

#[derive(Debug, Clone)]
pub struct Nu0Options {
    /// Decreasing perturbation sizes δ.
    pub deltas: Vec<f64>,
    pub dt: f64,
    pub t_max: f64,
    /// Largest acceptable |ν(δ_last) − ν(δ_prev)|.
    pub tol: f64,
}

impl Default for Nu0Options {
    fn default() -> Self {
        Self { deltas: vec![1e-2, 1e-3, 1e-4, 1e-5], dt: 1e-3, t_max: 1e4, tol: 5e-3 }
    }
}

/// ν of the state reached by the reversed sphaleron decay with kick δ.
fn emitted_nu(delta: f64, opts: &Nu0Options, params: &ModelParams) -> Result<(f64, f64, f64)> {
    let start = PhasePoint::new(0.0, 0.0, -delta, 0.0);
    let x_stop = params.barrier.cutoff();
    let (outcome, end, _) = propagate(start, opts.dt, opts.t_max, x_stop, params)?;
    if outcome != Outcome::Reflected {
        return Err(Error::Extrapolation(format!("δ = {delta}: trajectory did not reach X = −∞ ({outcome:?})")));
    }
    let c = asymptotic_charges(&[end], params, f64::INFINITY)?;
    Ok((c.nu, c.epsilon, end.x))
}

/// Occupation ν₀ emitted by the sphaleron: start at X = y = 0 with a small
/// common velocity pX = −δ (reversed decay), follow to X → −∞, read ν off
/// the free tail, and extrapolate δ → 0 linearly over the last two δ.
pub fn find_nu0(params: &ModelParams, opts: &Nu0Options) -> Result<ThresholdResult> {
    if opts.deltas.len() < 2 {
        return Err(Error::InsufficientPoints { got: opts.deltas.len(), need: 2 });
    }
    let mut est = Vec::with_capacity(opts.deltas.len());
    for &d in &opts.deltas {
        est.push((d, emitted_nu(d, opts, params)?));
    }
    let n = est.len();
    let (d1, (nu1, _, _)) = est[n - 2];
    let (d2, (nu2, eps2, x2)) = est[n - 1];
    let value = nu2 - d2 * (nu1 - nu2) / (d1 - d2);
    let err = (nu2 - nu1).abs().max((value - nu2).abs());
    if err > opts.tol {
        return Err(Error::Extrapolation(format!("ν estimates {nu1} and {nu2} differ by more than {}", opts.tol)));
    }
    Ok(ThresholdResult {
        value,
        bracket: (value - err, value + err),
        steps: n,
        dt: opts.dt,
        x_far: -x2,
        epsilon: eps2,
    })
}

#[derive(Debug, Clone)]
pub struct CritOptions {
    pub lo: f64,
    pub hi: f64,
    pub x_far: f64,
    pub dt: f64,
    pub t_max: f64,
    pub width: f64,
}

impl Default for CritOptions {
    fn default() -> Self {
        Self { lo: 1.0, hi: 3.0, x_far: 50.0, dt: 1e-3, t_max: 1e4, width: 1e-4 }
    }
}

/// Launch the classical ground state (y = pY = 0) at X = −x_far with
/// pX = √(2ε) and report where it leaves.
pub fn ground_state_outcome(epsilon: f64, opts: &CritOptions, params: &ModelParams) -> Result<Outcome> {
    let start = PhasePoint::new(-opts.x_far, 0.0, (2.0 * epsilon).sqrt(), 0.0);
    let (o, _, _) = propagate(start, opts.dt, opts.t_max, opts.x_far, params)?;
    Ok(o)
}

/// Bisection for the smallest ε at which the ground state goes over the top.
pub fn find_epsilon_crit(params: &ModelParams, opts: &CritOptions) -> Result<ThresholdResult> {
    let transmitted = |e: f64| -> Result<bool> {
        Ok(match ground_state_outcome(e, opts, params)? {
            Outcome::Transmitted => true,
            Outcome::Reflected => false,
            // a trajectory still trapped at t_max is not a transmission
            Outcome::Undecided => false,
        })
    };
    let (mut lo, mut hi) = (opts.lo, opts.hi);
    if transmitted(lo)? || !transmitted(hi)? {
        return Err(Error::NoBracket { what: "epsilon_crit", lo, hi });
    }
    let mut steps = 0;
    while hi - lo > opts.width {
        let mid = 0.5 * (lo + hi);
        if transmitted(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        steps += 1;
    }
    Ok(ThresholdResult {
        value: 0.5 * (lo + hi),
        bracket: (lo, hi),
        steps,
        dt: opts.dt,
        x_far: opts.x_far,
        epsilon: f64::NAN,
    })
}
