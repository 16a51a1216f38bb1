//! Complex-time boundary-value problem for the tunneling exponent.
//!
//! The contour runs along B (Im t = T/2) from t_left to t_c, drops
//! vertically (C) to the real axis and continues along DE to t_right.  On B
//! the solution is matched to its free asymptotics
//! X = X0 + p t′, y = u e^{−iωt′} + v e^{iωt′} (t′ = t − iT/2) with
//! real X0, p and v = u* e^θ; on the real axis X and y must be real.  The
//! conditions are imposed by shooting with a Taylor-series integrator that
//! is exact to rounding for the entire right-hand side.

mod bvp;
mod continuation;
mod contour;
mod extrapolate;
mod taylor;

pub use bvp::{exponent, residual, solve_bvp, solve_at_energy, AsymptoticCoeffs, BvpSolution, ComplexTrajectory, ExponentRecord, Provenance, SolverOptions, Unknowns};
pub use continuation::{continuation_sweep, f0_at_energies, f0_from, sphaleron_seed, Branch, ContinuationOptions, F0Options, F0Result, SweepParam};
pub use contour::{discretize_contour, ContourNode, ContourSpec, Segment};
pub use extrapolate::{extrapolate_f0, Extrapolation};
pub use taylor::{State, TaylorIntegrator};
