use crate::model::{total_energy, ModelParams, PhasePoint};
use crate::{Error, Result};

// Omelyan–Mryglod–Folk position-extended Forest–Ruth-like coefficients
// (fourth order, symmetric, four force evaluations per step).
const XI: f64 = 0.178_617_895_844_809_1;
const LAMBDA: f64 = -0.212_341_831_062_605_4;
const CHI: f64 = -0.066_264_582_669_818_49;

/// Symmetric fourth-order splitting stepper for
/// Ẍ = −U′(X + y), ÿ = −ω²y − U′(X + y).
#[derive(Debug, Clone, Copy)]
pub struct Stepper {
    params: ModelParams,
    dt: f64,
}

impl Stepper {
    pub fn new(params: ModelParams, dt: f64) -> Self {
        Self { params, dt }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    fn force(&self, x: f64, y: f64) -> (f64, f64) {
        let f = -self.params.barrier.d1_re(x + y);
        (f, f - self.params.omega * self.params.omega * y)
    }

    #[inline]
    fn drift(&self, s: &mut PhasePoint, c: f64) {
        s.x += c * self.dt * s.px;
        s.y += c * self.dt * s.py;
    }

    #[inline]
    fn kick(&self, s: &mut PhasePoint, c: f64) {
        let (fx, fy) = self.force(s.x, s.y);
        s.px += c * self.dt * fx;
        s.py += c * self.dt * fy;
    }

    #[inline]
    pub fn step(&self, s: &mut PhasePoint) {
        self.drift(s, XI);
        self.kick(s, 0.5 * (1.0 - 2.0 * LAMBDA));
        self.drift(s, CHI);
        self.kick(s, LAMBDA);
        self.drift(s, 1.0 - 2.0 * (CHI + XI));
        self.kick(s, LAMBDA);
        self.drift(s, CHI);
        self.kick(s, 0.5 * (1.0 - 2.0 * LAMBDA));
        self.drift(s, XI);
    }

    /// Same scheme with the sign of dt flipped.
    pub fn reversed(&self) -> Self {
        Self { params: self.params, dt: -self.dt }
    }
}

#[derive(Debug, Clone)]
pub struct RealTrajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub points: Vec<PhasePoint>,
    pub energy: Vec<f64>,
}

impl RealTrajectory {
    pub fn last(&self) -> &PhasePoint {
        self.points.last().expect("trajectory holds the start point")
    }

    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().fold(0.0_f64, |m, e| m.max((e - e0).abs()))
    }
}

/// How a propagation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Crossed +x_stop moving right.
    Transmitted,
    /// Crossed −x_stop moving left.
    Reflected,
    /// Ran out of time.
    Undecided,
}

/// Escape radius: the barrier cutoff, or the launch distance if larger.
fn stop_radius(start: &PhasePoint, params: &ModelParams) -> Option<f64> {
    if params.barrier.is_free() {
        None
    } else {
        Some(params.barrier.cutoff().max(start.x.abs()))
    }
}

#[inline]
fn escaped(s: &PhasePoint, r: f64) -> Option<Outcome> {
    if s.x > r && s.px > 0.0 {
        Some(Outcome::Transmitted)
    } else if s.x < -r && s.px < 0.0 {
        Some(Outcome::Reflected)
    } else {
        None
    }
}

/// Recorded integration on a uniform grid.  Stops early once |X| exceeds
/// the escape radius with outgoing pX.
pub fn integrate(start: PhasePoint, dt: f64, t_end: f64, params: &ModelParams) -> Result<RealTrajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::InvalidParam(format!("need dt > 0 and t_end ≥ 0, got dt = {dt}, t_end = {t_end}")));
    }
    let stepper = Stepper::new(*params, dt);
    let radius = stop_radius(&start, params);
    let n = (t_end / dt).round() as usize;
    let mut traj = RealTrajectory {
        dt,
        times: Vec::with_capacity(n + 1),
        points: Vec::with_capacity(n + 1),
        energy: Vec::with_capacity(n + 1),
    };
    let mut s = start;
    traj.times.push(0.0);
    traj.points.push(s);
    traj.energy.push(total_energy(&s, params));
    for k in 1..=n {
        stepper.step(&mut s);
        if !s.is_finite() {
            return Err(Error::NonFinite { t: k as f64 * dt });
        }
        traj.times.push(k as f64 * dt);
        traj.points.push(s);
        traj.energy.push(total_energy(&s, params));
        if radius.is_some_and(|r| escaped(&s, r).is_some()) {
            break;
        }
    }
    Ok(traj)
}

/// Unrecorded propagation until escape through ±x_stop or `t_max`.
pub fn propagate(start: PhasePoint, dt: f64, t_max: f64, x_stop: f64, params: &ModelParams) -> Result<(Outcome, PhasePoint, f64)> {
    let stepper = Stepper::new(*params, dt);
    let mut s = start;
    let n = (t_max / dt).ceil() as u64;
    for k in 1..=n {
        stepper.step(&mut s);
        if let Some(o) = escaped(&s, x_stop) {
            return Ok((o, s, k as f64 * dt));
        }
        if k % 1024 == 0 && !s.is_finite() {
            return Err(Error::NonFinite { t: k as f64 * dt });
        }
    }
    Ok((Outcome::Undecided, s, n as f64 * dt))
}
