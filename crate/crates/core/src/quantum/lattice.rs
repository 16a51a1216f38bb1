use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Sites X_k = k·a for k ∈ [−n_x, n_x].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub a: f64,
    pub n_x: usize,
}

impl LatticeSpec {
    pub fn new(a: f64, n_x: usize) -> Result<Self> {
        if !(a > 0.0) || n_x < 2 {
            return Err(Error::InvalidParam(format!("lattice needs a > 0 and N_X ≥ 2, got a = {a}, N_X = {n_x}")));
        }
        Ok(Self { a, n_x })
    }

    pub fn x(&self, k: i64) -> f64 {
        k as f64 * self.a
    }

    pub fn half_width(&self) -> f64 {
        self.n_x as f64 * self.a
    }

    pub fn sites(&self) -> usize {
        2 * self.n_x + 1
    }
}

/// Oscillator levels 0..=n0 of the relative coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelBasis {
    pub n0: usize,
    pub omega: f64,
}

impl ChannelBasis {
    pub fn new(n0: usize, omega: f64) -> Self {
        Self { n0, omega }
    }

    pub fn len(&self) -> usize {
        self.n0 + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn threshold(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.omega
    }

    /// Number of channels open at energy e.
    pub fn open_count(omega: f64, e: f64) -> usize {
        if e <= 0.5 * omega {
            0
        } else {
            ((e / omega - 0.5).floor() as usize + 1).max(0)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    Open,
    Closed,
}

/// Free-lattice solutions per channel.  The Numerov stencil for
/// ψ″ = 2(W − E)ψ with τ = a²·2((n + ½)ω − E)/12 admits ψ_k = λ^k with
/// λ + 1/λ = 2(1 + 5τ)/(1 − τ).
#[derive(Debug, Clone)]
pub struct Dispersion {
    pub tau: Vec<f64>,
    pub kind: Vec<ChannelKind>,
    /// Lattice wave number q_n (open channels; zero otherwise).
    pub q: Vec<f64>,
    /// Continuum momentum p_n or decay rate κ_n.
    pub p: Vec<f64>,
    /// Ratio ψ_{edge}/ψ_{edge∓1} for outgoing or decaying waves.
    pub lambda: Vec<C64>,
    pub a: f64,
}

impl Dispersion {
    pub fn new(e: f64, basis: &ChannelBasis, a: f64) -> Result<Self> {
        let n = basis.len();
        let mut d = Dispersion {
            tau: Vec::with_capacity(n),
            kind: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            p: Vec::with_capacity(n),
            lambda: Vec::with_capacity(n),
            a,
        };
        for ch in 0..n {
            let w = basis.threshold(ch) - e;
            let tau = a * a * 2.0 * w / 12.0;
            let c = (1.0 + 5.0 * tau) / (1.0 - tau);
            d.tau.push(tau);
            d.p.push((2.0 * w.abs()).sqrt());
            if w < 0.0 {
                if !(c > -1.0) || !(tau < 1.0) {
                    return Err(Error::Coarse { pa: a * (2.0 * -w).sqrt(), channel: ch });
                }
                let qa = c.acos();
                d.kind.push(ChannelKind::Open);
                d.q.push(qa / a);
                d.lambda.push(C64::from_polar(1.0, qa));
            } else {
                if c <= 1.0 {
                    return Err(Error::InvalidParam(format!("energy sits on the threshold of channel {ch}")));
                }
                d.kind.push(ChannelKind::Closed);
                d.q.push(0.0);
                d.lambda.push(C64::new(c - (c * c - 1.0).sqrt(), 0.0));
            }
        }
        Ok(d)
    }

    pub fn is_open(&self, n: usize) -> bool {
        self.kind[n] == ChannelKind::Open
    }

    pub fn open_count(&self) -> usize {
        self.kind.iter().filter(|k| **k == ChannelKind::Open).count()
    }

    /// Conserved lattice flux of a unit-amplitude plane wave in channel n.
    pub fn flux(&self, n: usize) -> f64 {
        if self.is_open(n) {
            let t = 1.0 - self.tau[n];
            t * t * (self.q[n] * self.a).sin()
        } else {
            0.0
        }
    }

    /// e^{i q_n k a}; zero for closed channels.
    pub fn plane_wave(&self, n: usize, k: i64) -> C64 {
        if self.is_open(n) {
            C64::from_polar(1.0, self.q[n] * self.a * k as f64)
        } else {
            C64::new(0.0, 0.0)
        }
    }
}
