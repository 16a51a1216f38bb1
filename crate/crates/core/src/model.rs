//! Physical parameters, the barrier and energy bookkeeping.
//!
//! Rescaled units: L = ½Ẋ² + ½ẏ² − ½ω²y² − U(X + y) with U(0) = 1.  The
//! coupling g only enters the quantum layer through E = ε/g², n = ν/g².

use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Barrier family.  Closed so that analytic continuation is guaranteed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BarrierSpec {
    /// U(x) = exp(−x²/2); |x| ≥ `cutoff` counts as the force-free region.
    Gaussian { cutoff: f64 },
    /// U ≡ 0; used for free-propagation checks.
    Free,
}

impl Default for BarrierSpec {
    fn default() -> Self {
        BarrierSpec::Gaussian { cutoff: 30.0 }
    }
}

impl BarrierSpec {
    pub fn gaussian() -> Self {
        Self::default()
    }

    /// |x| beyond which the barrier counts as switched off.
    pub fn cutoff(&self) -> f64 {
        match *self {
            BarrierSpec::Gaussian { cutoff } => cutoff,
            BarrierSpec::Free => 0.0,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, BarrierSpec::Free)
    }

    /// U(x) for complex x.  Large |Im x| makes |U| huge; that value is
    /// returned as is.
    #[inline]
    pub fn eval(&self, x: C64) -> C64 {
        match self {
            BarrierSpec::Gaussian { .. } => (-0.5 * x * x).exp(),
            BarrierSpec::Free => C64::new(0.0, 0.0),
        }
    }

    #[inline]
    pub fn d1(&self, x: C64) -> C64 {
        -x * self.eval(x)
    }

    #[inline]
    pub fn d2(&self, x: C64) -> C64 {
        (x * x - 1.0) * self.eval(x)
    }

    #[inline]
    pub fn eval_re(&self, x: f64) -> f64 {
        match self {
            BarrierSpec::Gaussian { .. } => (-0.5 * x * x).exp(),
            BarrierSpec::Free => 0.0,
        }
    }

    #[inline]
    pub fn d1_re(&self, x: f64) -> f64 {
        -x * self.eval_re(x)
    }
}

/// Complex-argument barrier value, U(x) = exp(−x²/2) for the default family.
pub fn eval_barrier(barrier: &BarrierSpec, x: C64) -> C64 {
    barrier.eval(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub omega: f64,
    pub coupling_g: f64,
    pub barrier: BarrierSpec,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self { omega: 0.5, coupling_g: 0.2, barrier: BarrierSpec::default() }
    }
}

impl ModelParams {
    pub fn new(omega: f64, coupling_g: f64, barrier: BarrierSpec) -> Result<Self> {
        let p = Self { omega, coupling_g, barrier };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(Error::InvalidParam(format!("omega must be positive, got {}", self.omega)));
        }
        if !(self.coupling_g > 0.0 && self.coupling_g.is_finite()) {
            return Err(Error::InvalidParam(format!("g must be positive, got {}", self.coupling_g)));
        }
        if let BarrierSpec::Gaussian { cutoff } = self.barrier {
            if !(cutoff > 0.0) {
                return Err(Error::InvalidParam(format!("barrier cutoff must be positive, got {cutoff}")));
            }
        }
        Ok(())
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn free(mut self) -> Self {
        self.barrier = BarrierSpec::Free;
        self
    }
}

/// (X, y, pX, pY).  Real for classical dynamics, complex on the contour.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhasePoint<T = f64> {
    pub x: T,
    pub y: T,
    pub px: T,
    pub py: T,
}

pub type ComplexPhasePoint = PhasePoint<C64>;

impl<T> PhasePoint<T> {
    pub fn new(x: T, y: T, px: T, py: T) -> Self {
        Self { x, y, px, py }
    }
}

impl PhasePoint<f64> {
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.px.is_finite() && self.py.is_finite()
    }

    /// Oscillator part ½pY² + ½ω²y².
    pub fn oscillator_energy(&self, omega: f64) -> f64 {
        0.5 * self.py * self.py + 0.5 * omega * omega * self.y * self.y
    }
}

/// Rescaled charges of an asymptotic state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScaledCharges {
    pub epsilon: f64,
    pub nu: f64,
    pub epsilon_osc: f64,
}

impl ScaledCharges {
    pub fn from_parts(kinetic: f64, epsilon_osc: f64, omega: f64) -> Self {
        Self { epsilon: kinetic + epsilon_osc, nu: epsilon_osc / omega, epsilon_osc }
    }
}

/// ε = ½pX² + ½pY² + ½ω²y² + U(X + y).
pub fn total_energy(p: &PhasePoint, params: &ModelParams) -> f64 {
    0.5 * p.px * p.px + p.oscillator_energy(params.omega) + params.barrier.eval_re(p.x + p.y)
}

/// Complex conserved energy on the contour (velocities are d/dt along it).
pub fn complex_energy(p: &ComplexPhasePoint, params: &ModelParams) -> C64 {
    let w2 = params.omega * params.omega;
    0.5 * p.px * p.px + 0.5 * p.py * p.py + 0.5 * w2 * p.y * p.y + params.barrier.eval(p.x + p.y)
}

/// Charges of a trajectory tail in the force-free region.  `tol` bounds the
/// spread of ½ẏ² + ½ω²y² over the samples.
pub fn asymptotic_charges(tail: &[PhasePoint], params: &ModelParams, tol: f64) -> Result<ScaledCharges> {
    let first = tail.first().ok_or_else(|| Error::InvalidParam("empty tail".into()))?;
    let cut = params.barrier.cutoff();
    if let Some(p) = tail.iter().find(|p| (p.x + p.y).abs() < cut) {
        return Err(Error::InvalidParam(format!("tail sample at X = {} is inside the barrier region", p.x)));
    }
    let w = params.omega;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in tail {
        let e = p.oscillator_energy(w);
        lo = lo.min(e);
        hi = hi.max(e);
    }
    if hi - lo > tol {
        return Err(Error::NotAsymptotic(hi - lo));
    }
    let e_osc = first.oscillator_energy(w);
    Ok(ScaledCharges::from_parts(0.5 * first.px * first.px, e_osc, w))
}

/// Linearisation about the static solution X = y = 0 (the sphaleron).
#[derive(Debug, Clone, Copy)]
pub struct Sphaleron {
    /// Growth rate of the unstable mode.
    pub lambda: f64,
    /// Unit unstable direction (X, y), oriented with X < 0.
    pub unstable: [f64; 2],
    /// Frequency of the stable mode.
    pub stable_freq: f64,
}

impl Sphaleron {
    /// Hessian of ½ω²y² + U(X + y) at the origin is [[−1, −1], [−1, ω² − 1]].
    pub fn new(omega: f64) -> Self {
        let (a, b, d) = (-1.0, -1.0, omega * omega - 1.0);
        let mean = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b * b).sqrt();
        let (lo, hi) = (mean - disc, mean + disc);
        // eigenvector for lo: (b, lo − a)
        let (mut ex, mut ey) = (b, lo - a);
        let n = (ex * ex + ey * ey).sqrt();
        ex /= n;
        ey /= n;
        if ex > 0.0 {
            ex = -ex;
            ey = -ey;
        }
        Self { lambda: (-lo).sqrt(), unstable: [ex, ey], stable_freq: hi.sqrt() }
    }

    /// Imaginary-time period of the small oscillation about the sphaleron.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.lambda
    }
}
