use crate::model::BarrierSpec;
use crate::{Error, Result, C64};

/// Contour state: positions, velocities d/dt along the contour, and the
/// accumulated action S₀ = −∫ U(x)(1 + x²/2) dt (equations of motion
/// already substituted into the integrand).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State {
    pub x: C64,
    pub y: C64,
    pub vx: C64,
    pub vy: C64,
    pub s: C64,
}

impl State {
    pub fn is_finite(&self) -> bool {
        [self.x, self.y, self.vx, self.vy, self.s].iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn energy(&self, omega: f64, barrier: &BarrierSpec) -> C64 {
        0.5 * (self.vx * self.vx + self.vy * self.vy) + 0.5 * omega * omega * self.y * self.y + barrier.eval(self.x + self.y)
    }
}

/// Fixed-order Taylor integrator for Ẍ = xU(x), ÿ = −ω²y + xU(x), x = X + y,
/// at complex time.  Series coefficients come from the recurrences for
/// q = −x²/2, U = e^q (kU_k = Σ j q_j U_{k−j}) and the force xU.
#[derive(Debug, Clone, Copy)]
pub struct TaylorIntegrator {
    pub omega: f64,
    pub barrier: BarrierSpec,
    pub order: usize,
    /// Per-step truncation target relative to the state size.
    pub tol: f64,
}

struct Series {
    x: Vec<C64>,
    y: Vec<C64>,
    s: Vec<C64>,
}

impl TaylorIntegrator {
    pub fn new(omega: f64, barrier: BarrierSpec) -> Self {
        Self { omega, barrier, order: 24, tol: 1e-17 }
    }

    fn series(&self, z: &State) -> Series {
        let n = self.order;
        let zero = C64::new(0.0, 0.0);
        let mut xs = vec![zero; n + 1];
        let mut ys = vec![zero; n + 1];
        let mut ss = vec![zero; n + 1];
        let mut x = vec![zero; n + 1];
        let mut q = vec![zero; n + 1];
        let mut u = vec![zero; n + 1];
        xs[0] = z.x;
        xs[1] = z.vx;
        ys[0] = z.y;
        ys[1] = z.vy;
        ss[0] = z.s;
        let free = self.barrier.is_free();
        let w2 = self.omega * self.omega;
        for k in 0..n {
            x[k] = xs[k] + ys[k];
            let mut acc = zero;
            for j in 0..=k {
                acc += x[j] * x[k - j];
            }
            q[k] = -0.5 * acc;
            if free {
                u[k] = zero;
            } else if k == 0 {
                u[0] = q[0].exp();
            } else {
                let mut acc = zero;
                for j in 1..=k {
                    acc += (j as f64) * q[j] * u[k - j];
                }
                u[k] = acc / k as f64;
            }
            // −U(1 − q) = −U(1 + x²/2)
            let mut uq = zero;
            for j in 0..=k {
                uq += u[j] * q[k - j];
            }
            ss[k + 1] = -(u[k] - uq) / (k + 1) as f64;
            if k + 2 <= n {
                let mut f = zero;
                for j in 0..=k {
                    f += x[j] * u[k - j];
                }
                let d = ((k + 1) * (k + 2)) as f64;
                xs[k + 2] = f / d;
                ys[k + 2] = (f - w2 * ys[k]) / d;
            }
        }
        Series { x: xs, y: ys, s: ss }
    }

    /// Largest |h| for which the two highest retained terms stay below tolerance.
    fn step_limit(&self, ser: &Series, z: &State) -> f64 {
        let n = self.order;
        let scale = 1.0 + z.x.norm().max(z.y.norm()).max(z.vx.norm()).max(z.vy.norm());
        let target = self.tol * scale;
        let mut h = f64::INFINITY;
        for k in [n - 1, n] {
            let c = ser.x[k].norm().max(ser.y[k].norm());
            if c > 0.0 {
                h = h.min((target / c).powf(1.0 / k as f64));
            }
        }
        h
    }

    fn eval(ser: &Series, dt: C64) -> State {
        let n = ser.x.len() - 1;
        let (mut x, mut y, mut s) = (ser.x[n], ser.y[n], ser.s[n]);
        let (mut vx, mut vy) = (ser.x[n] * n as f64, ser.y[n] * n as f64);
        for k in (0..n).rev() {
            x = x * dt + ser.x[k];
            y = y * dt + ser.y[k];
            s = s * dt + ser.s[k];
            if k >= 1 {
                vx = vx * dt + ser.x[k] * k as f64;
                vy = vy * dt + ser.y[k] * k as f64;
            }
        }
        State { x, y, vx, vy, s }
    }

    /// Integrate along t = t0 + dir·σ for σ ∈ [0, length] (|dir| = 1),
    /// splitting into `nodes` equal pieces and calling `visit` at every node
    /// (including the end).  Sub-steps are chosen adaptively.
    pub fn advance<F: FnMut(usize, &State)>(&self, mut z: State, dir: C64, length: f64, nodes: usize, mut visit: F) -> Result<State> {
        let nodes = nodes.max(1);
        let piece = length / nodes as f64;
        for i in 1..=nodes {
            let mut left = piece;
            let mut guard = 0;
            while left > 0.0 {
                let ser = self.series(&z);
                let h = (0.9 * self.step_limit(&ser, &z)).min(left);
                if !(h > 1e-12 * piece.max(1e-300)) || guard > 100_000 {
                    return Err(Error::NonFinite { t: f64::NAN });
                }
                z = Self::eval(&ser, dir * h);
                if !z.is_finite() {
                    return Err(Error::NonFinite { t: f64::NAN });
                }
                left -= h;
                if left < 1e-14 * piece {
                    left = 0.0;
                }
                guard += 1;
            }
            visit(i, &z);
        }
        Ok(z)
    }
}
