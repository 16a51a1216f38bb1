use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Three straight pieces: B at Im t = T/2 from t_left to t_c, C straight
/// down to the real axis at Re t = t_c, DE along the real axis to t_right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSpec {
    /// T; B sits at Im t = T/2.
    pub t_total: f64,
    pub t_left: f64,
    pub t_right: f64,
    pub t_c: f64,
    /// Upper bound on the node spacing along every segment.
    pub spacing: f64,
}

impl Default for ContourSpec {
    fn default() -> Self {
        Self { t_total: 4.5837, t_left: -40.0, t_right: 40.0, t_c: 2.0, spacing: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Segment {
    B,
    C,
    DE,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourNode {
    pub t: C64,
    pub segment: Segment,
}

impl ContourSpec {
    pub fn validate(&self, omega: f64) -> Result<()> {
        if !(self.t_total >= 0.0) {
            return Err(Error::InvalidParam(format!("T must be non-negative, got {}", self.t_total)));
        }
        if !(self.t_left < self.t_c && self.t_c < self.t_right) {
            return Err(Error::InvalidParam(format!(
                "need t_left < t_c < t_right, got {} / {} / {}",
                self.t_left, self.t_c, self.t_right
            )));
        }
        let period = 2.0 * std::f64::consts::PI / omega;
        if !(self.spacing > 0.0) || period / self.spacing < 40.0 {
            return Err(Error::InvalidParam(format!("node spacing {} resolves the period by fewer than 40 nodes", self.spacing)));
        }
        Ok(())
    }

    fn count(&self, len: f64) -> usize {
        if len <= 0.0 {
            0
        } else {
            (len / self.spacing).ceil().max(1.0) as usize
        }
    }

    /// Intervals per segment (B, C, DE).
    pub fn intervals(&self) -> (usize, usize, usize) {
        (
            self.count(self.t_c - self.t_left),
            self.count(0.5 * self.t_total),
            self.count(self.t_right - self.t_c),
        )
    }

    /// Node counts per segment with shared corners attributed to the
    /// earlier segment.
    pub fn node_counts(&self) -> (usize, usize, usize) {
        let (b, c, de) = self.intervals();
        (b + 1, c, de)
    }

    pub fn length(&self) -> f64 {
        (self.t_c - self.t_left) + 0.5 * self.t_total + (self.t_right - self.t_c)
    }

    pub fn corner(&self) -> C64 {
        C64::new(self.t_c, 0.5 * self.t_total)
    }
}

/// Ordered nodes along B, C and DE; corners appear once.
pub fn discretize_contour(spec: &ContourSpec) -> Vec<ContourNode> {
    let (nb, nc, nd) = spec.intervals();
    let h = 0.5 * spec.t_total;
    let mut out = Vec::with_capacity(nb + nc + nd + 1);
    for i in 0..=nb {
        let re = spec.t_left + (spec.t_c - spec.t_left) * i as f64 / nb.max(1) as f64;
        out.push(ContourNode { t: C64::new(if i == nb { spec.t_c } else { re }, h), segment: Segment::B });
    }
    for i in 1..=nc {
        let im = h - h * i as f64 / nc as f64;
        out.push(ContourNode { t: C64::new(spec.t_c, if i == nc { 0.0 } else { im }), segment: Segment::C });
    }
    for i in 1..=nd {
        let re = spec.t_c + (spec.t_right - spec.t_c) * i as f64 / nd as f64;
        out.push(ContourNode { t: C64::new(if i == nd { spec.t_right } else { re }, 0.0), segment: Segment::DE });
    }
    out
}
