use ndarray::{Array1, Array2};
use ndarray_linalg::LeastSquaresSvd;
use serde::{Deserialize, Serialize};

use super::contour::{discretize_contour, ContourNode, ContourSpec};
use super::taylor::{State, TaylorIntegrator};
use crate::model::{ModelParams, ScaledCharges};
use crate::{Error, Result, C64};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Newton stops once the residual norm drops below this.
    pub tol: f64,
    pub max_newton: usize,
    /// Relative forward-difference step for the Jacobian.
    pub fd_step: f64,
    /// Taylor order of the contour integrator.
    pub order: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_newton: 30, fd_step: 1e-7, order: 24 }
    }
}

/// Free parameters of the B-segment asymptotics once X0 = 0 (translation
/// pinned), Im p = 0 and u = v* e^{−θ} are built in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Unknowns {
    pub p: f64,
    pub v: C64,
}

/// X(t′) = X0 + p t′, y(t′) = u e^{−iωt′} + v e^{iωt′} on B, t′ = t − iT/2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticCoeffs {
    pub x0: C64,
    pub p: C64,
    pub u: C64,
    pub v: C64,
}

impl AsymptoticCoeffs {
    pub fn from_unknowns(q: &Unknowns, theta: f64) -> Self {
        Self { x0: C64::new(0.0, 0.0), p: C64::new(q.p, 0.0), u: q.v.conj() * (-theta).exp(), v: q.v }
    }

    pub fn state_at(&self, tp: f64, omega: f64) -> State {
        let em = (-I * omega * tp).exp();
        let ep = (I * omega * tp).exp();
        State {
            x: self.x0 + self.p * tp,
            y: self.u * em + self.v * ep,
            vx: self.p,
            vy: -I * omega * self.u * em + I * omega * self.v * ep,
            s: C64::new(0.0, 0.0),
        }
    }

    /// ε = ½p² + 2ω²uv, ν = 2ωuv (real parts).
    pub fn charges(&self, omega: f64) -> ScaledCharges {
        let uv = (self.u * self.v).re;
        let kin = 0.5 * (self.p * self.p).re;
        ScaledCharges::from_parts(kin, 2.0 * omega * omega * uv, omega)
    }

    /// Least-squares projection of y samples on e^{∓iωt′} (read-back check).
    pub fn project_oscillator(samples: &[(f64, C64)], omega: f64) -> (C64, C64) {
        let (mut a11, mut a12, mut a22) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let (mut b1, mut b2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        for &(t, y) in samples {
            let e1 = (-I * omega * t).exp();
            let e2 = (I * omega * t).exp();
            a11 += e1.conj() * e1;
            a12 += e1.conj() * e2;
            a22 += e2.conj() * e2;
            b1 += e1.conj() * y;
            b2 += e2.conj() * y;
        }
        let det = a11 * a22 - a12 * a12.conj();
        let u = (b1 * a22 - a12 * b2) / det;
        let v = (a11 * b2 - a12.conj() * b1) / det;
        (u, v)
    }
}

#[derive(Debug, Clone)]
pub struct ComplexTrajectory {
    pub nodes: Vec<ContourNode>,
    pub states: Vec<State>,
}

impl ComplexTrajectory {
    pub fn segment_states(&self, seg: super::contour::Segment) -> impl Iterator<Item = (&ContourNode, &State)> {
        self.nodes.iter().zip(&self.states).filter(move |(n, _)| n.segment == seg)
    }
}

#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub contour: ContourSpec,
    pub theta: f64,
    pub unknowns: Unknowns,
    pub coeffs: AsymptoticCoeffs,
    pub traj: ComplexTrajectory,
    pub action_s0: C64,
    pub residual_norm: f64,
    pub charges: ScaledCharges,
    /// The real-axis part ends at X → +∞.
    pub transmitted: bool,
    pub iterations: usize,
}

impl BvpSolution {
    pub fn f(&self) -> f64 {
        2.0 * self.action_s0.im - self.charges.epsilon * self.contour.t_total - self.charges.nu * self.theta
    }

    pub fn record(&self) -> ExponentRecord {
        exponent(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    Semiclassical,
    QuantumFit,
}

impl Provenance {
    pub fn tag(&self) -> &'static str {
        match self {
            Provenance::Semiclassical => "semiclassical",
            Provenance::QuantumFit => "quantum-fit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentRecord {
    pub epsilon: f64,
    pub nu: f64,
    pub t: f64,
    pub theta: f64,
    pub f: f64,
    pub two_im_s0: f64,
    pub residual_norm: f64,
    pub nodes_b: usize,
    pub nodes_c: usize,
    pub nodes_de: usize,
    pub provenance: Provenance,
}

/// F = 2 Im S₀ − εT − νθ.
pub fn exponent(sol: &BvpSolution) -> ExponentRecord {
    let (nb, nc, nd) = sol.contour.node_counts();
    ExponentRecord {
        epsilon: sol.charges.epsilon,
        nu: sol.charges.nu,
        t: sol.contour.t_total,
        theta: sol.theta,
        f: sol.f(),
        two_im_s0: 2.0 * sol.action_s0.im,
        residual_norm: sol.residual_norm,
        nodes_b: nb,
        nodes_c: nc,
        nodes_de: nd,
        provenance: Provenance::Semiclassical,
    }
}

pub(crate) struct Shooter<'a> {
    pub params: &'a ModelParams,
    pub integ: TaylorIntegrator,
}

impl<'a> Shooter<'a> {
    pub fn new(params: &'a ModelParams, opts: &SolverOptions) -> Self {
        let mut integ = TaylorIntegrator::new(params.omega, params.barrier);
        integ.order = opts.order;
        Self { params, integ }
    }

    /// Follow B then C; returns the state at the base of C (t = t_c).
    pub fn base(&self, coeffs: &AsymptoticCoeffs, c: &ContourSpec) -> Result<State> {
        let z0 = coeffs.state_at(c.t_left, self.params.omega);
        let (nb, nc, _) = c.intervals();
        let z = self.integ.advance(z0, C64::new(1.0, 0.0), c.t_c - c.t_left, nb, |_, _| {})?;
        if nc == 0 {
            return Ok(z);
        }
        self.integ.advance(z, -I, 0.5 * c.t_total, nc, |_, _| {})
    }

    /// Full pass over B, C and DE, storing every node.
    pub fn trajectory(&self, coeffs: &AsymptoticCoeffs, c: &ContourSpec) -> Result<ComplexTrajectory> {
        let nodes = discretize_contour(c);
        let (nb, nc, nd) = c.intervals();
        let mut states = Vec::with_capacity(nodes.len());
        let z0 = coeffs.state_at(c.t_left, self.params.omega);
        states.push(z0);
        let z = self.integ.advance(z0, C64::new(1.0, 0.0), c.t_c - c.t_left, nb, |_, s| states.push(*s))?;
        let z = if nc > 0 { self.integ.advance(z, -I, 0.5 * c.t_total, nc, |_, s| states.push(*s))? } else { z };
        self.integ.advance(z, C64::new(1.0, 0.0), c.t_right - c.t_c, nd, |_, s| states.push(*s))?;
        debug_assert_eq!(states.len(), nodes.len());
        Ok(ComplexTrajectory { nodes, states })
    }

    /// Scan |Ẋ| along B for t′ in `window`; the minimiser is where the
    /// centre-of-mass motion turns and a natural place for the C segment.
    pub fn turning_point(&self, coeffs: &AsymptoticCoeffs, t_left: f64, window: (f64, f64), step: f64) -> Result<f64> {
        let z0 = coeffs.state_at(t_left, self.params.omega);
        let n = ((window.1 - t_left) / step).ceil() as usize;
        let h = (window.1 - t_left) / n as f64;
        let mut best = (f64::INFINITY, window.0);
        self.integ.advance(z0, C64::new(1.0, 0.0), window.1 - t_left, n, |i, s| {
            let t = t_left + i as f64 * h;
            if t >= window.0 && s.vx.norm() < best.0 {
                best = (s.vx.norm(), t);
            }
        })?;
        Ok(best.1)
    }
}

fn reality(z: &State) -> [f64; 4] {
    [z.x.im, z.y.im, z.vx.im, z.vy.im]
}

/// Full boundary-condition residual for explicit coefficients:
/// [Im p, Im X0, Re/Im (v − u* e^θ), Im X, Im y, Im Ẋ, Im ẏ at the base of C].
/// The equations of motion and the matching on B hold by construction of
/// the shooting integration.
pub fn residual(coeffs: &AsymptoticCoeffs, contour: &ContourSpec, theta: f64, params: &ModelParams) -> Result<Vec<f64>> {
    let sh = Shooter::new(params, &SolverOptions::default());
    let base = sh.base(coeffs, contour)?;
    let d = coeffs.v - coeffs.u.conj() * theta.exp();
    let mut r = vec![coeffs.p.im, coeffs.x0.im, d.re, d.im];
    r.extend_from_slice(&reality(&base));
    Ok(r)
}

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Damped Gauss–Newton on an over-determined smooth system; non-finite
/// evaluations count as infinitely bad.
fn gauss_newton<F>(mut q: Vec<f64>, f: F, opts: &SolverOptions) -> Result<(Vec<f64>, f64, usize)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    let eval = |q: &[f64]| -> Option<Vec<f64>> { f(q).ok().filter(|r| r.iter().all(|v| v.is_finite())) };
    let mut r = eval(&q).ok_or(Error::Newton { iterations: 0, residual: f64::INFINITY })?;
    let mut nr = norm(&r);
    for it in 0..opts.max_newton {
        if nr < opts.tol {
            return Ok((q, nr, it));
        }
        let m = r.len();
        let n = q.len();
        let mut jac = Array2::<f64>::zeros((m, n));
        for j in 0..n {
            let h = opts.fd_step * q[j].abs().max(1.0);
            let mut qj = q.clone();
            qj[j] += h;
            let rj = eval(&qj).ok_or(Error::Newton { iterations: it, residual: nr })?;
            for i in 0..m {
                jac[[i, j]] = (rj[i] - r[i]) / h;
            }
        }
        let rhs = Array1::from_iter(r.iter().map(|v| -v));
        let dq = jac.least_squares(&rhs).map_err(|_| Error::Newton { iterations: it, residual: nr })?.solution;
        let mut lam = 1.0;
        loop {
            let trial: Vec<f64> = q.iter().zip(dq.iter()).map(|(a, b)| a + lam * b).collect();
            if let Some(rt) = eval(&trial) {
                let nt = norm(&rt);
                if nt < nr || lam < 1.0 / 64.0 {
                    q = trial;
                    r = rt;
                    nr = nt;
                    break;
                }
            } else if lam < 1.0 / 64.0 {
                return Err(Error::Newton { iterations: it, residual: nr });
            }
            lam *= 0.5;
        }
    }
    if nr < opts.tol {
        Ok((q, nr, opts.max_newton))
    } else {
        Err(Error::Newton { iterations: opts.max_newton, residual: nr })
    }
}

fn finish(params: &ModelParams, sh: &Shooter, contour: ContourSpec, theta: f64, q: Unknowns, res: f64, it: usize) -> Result<BvpSolution> {
    let coeffs = AsymptoticCoeffs::from_unknowns(&q, theta);
    let traj = sh.trajectory(&coeffs, &contour)?;
    let (nb, nc, _) = contour.intervals();
    let base = traj.states[nb + nc];
    let end = traj.states.last().expect("non-empty trajectory");
    let mut charges = coeffs.charges(params.omega);
    charges.epsilon = base.energy(params.omega, &params.barrier).re;
    Ok(BvpSolution {
        contour,
        theta,
        unknowns: q,
        coeffs,
        action_s0: end.s,
        residual_norm: res,
        charges,
        transmitted: end.x.re > 0.0 && end.vx.re > 0.0,
        iterations: it,
        traj,
    })
}

/// Solve at fixed (T, θ) for (p, v).
pub fn solve_bvp(params: &ModelParams, contour: &ContourSpec, theta: f64, guess: &Unknowns, opts: &SolverOptions) -> Result<BvpSolution> {
    contour.validate(params.omega)?;
    let sh = Shooter::new(params, opts);
    let f = |q: &[f64]| -> Result<Vec<f64>> {
        let c = AsymptoticCoeffs::from_unknowns(&Unknowns { p: q[0], v: C64::new(q[1], q[2]) }, theta);
        Ok(reality(&sh.base(&c, contour)?).to_vec())
    };
    let (q, res, it) = gauss_newton(vec![guess.p, guess.v.re, guess.v.im], f, opts)?;
    finish(params, &sh, *contour, theta, Unknowns { p: q[0], v: C64::new(q[1], q[2]) }, res, it)
}

/// Solve at fixed (ε, θ) with T as an extra unknown (T from `contour` is the
/// starting value).
pub fn solve_at_energy(params: &ModelParams, contour: &ContourSpec, theta: f64, epsilon: f64, guess: &Unknowns, opts: &SolverOptions) -> Result<BvpSolution> {
    contour.validate(params.omega)?;
    let sh = Shooter::new(params, opts);
    let w = params.omega;
    let f = |q: &[f64]| -> Result<Vec<f64>> {
        if !(q[3] > 0.0) {
            return Err(Error::InvalidParam("T left the positive axis".into()));
        }
        let c = AsymptoticCoeffs::from_unknowns(&Unknowns { p: q[0], v: C64::new(q[1], q[2]) }, theta);
        let spec = ContourSpec { t_total: q[3], ..*contour };
        let mut r = reality(&sh.base(&c, &spec)?).to_vec();
        r.push(c.charges(w).epsilon - epsilon);
        Ok(r)
    };
    let (q, res, it) = gauss_newton(vec![guess.p, guess.v.re, guess.v.im, contour.t_total], f, opts)?;
    let spec = ContourSpec { t_total: q[3], ..*contour };
    finish(params, &sh, spec, theta, Unknowns { p: q[0], v: C64::new(q[1], q[2]) }, res, it)
}
