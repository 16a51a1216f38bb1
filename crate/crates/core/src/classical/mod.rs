//! Real-time classical dynamics and the two classical thresholds.

mod integrator;
mod thresholds;

pub use integrator::{integrate, propagate, Outcome, RealTrajectory, Stepper};
pub use thresholds::{
    find_epsilon_crit, find_nu0, ground_state_outcome, CritOptions, Nu0Options, ThresholdResult,
};
