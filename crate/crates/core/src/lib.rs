//! Tunneling of a two-particle bound system through a potential barrier.
//!
//! Two independent routes to the suppression exponent F₀(ε):
//!
//! * [`semiclassical`] solves the complexified equations of motion on a
//!   complex-time contour and evaluates F(ε, ν) = 2 Im S₀ − εT − νθ;
//! * [`quantum`] solves the coupled-channel Schrödinger equation on a
//!   Numerov lattice and returns channel-resolved transmission.
//!
//! [`exponent`] fits ln T₀ against 1/g² and compares the two.  [`classical`]
//! locates the classical thresholds ν₀ and ε_crit.  All classical and
//! semiclassical code works in rescaled units where g drops out.

extern crate blas_src;

pub mod classical;
pub mod config;
pub mod error;
pub mod exponent;
pub mod model;
pub mod output;
pub mod quantum;
pub mod semiclassical;

pub use error::{Error, Result};
pub use model::{BarrierSpec, ModelParams, PhasePoint, ScaledCharges};

pub use num_complex::Complex64 as C64;
