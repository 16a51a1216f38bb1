//! Coupled-channel scattering of the bound pair on a Numerov lattice.
//!
//! Unscaled Hamiltonian H = −½∂²_X + (n + ½)ω + V_{nn′}(X) with
//! V_{nn′}(X) = g⁻²⟨n| U(g(X + y)) |n′⟩ in the oscillator basis of the
//! relative coordinate.  The channel equations are discretized with the
//! Numerov–Cowling three-point relation and solved by block elimination from
//! both ends toward the centre with outgoing/decaying closures.

mod elimination;
mod hermite;
mod lattice;
mod numerov;
mod potential;
mod scattering;

pub use elimination::{eliminate, Closure, Eliminated};
pub use hermite::{gauss_hermite, hermite_functions};
pub use lattice::{ChannelBasis, ChannelKind, Dispersion, LatticeSpec};
pub use numerov::{assemble_numerov, site_t_matrix, NumerovSite};
pub use potential::{potential_matrix, potential_matrix_quadrature};
pub use scattering::{solve_dense, solve_scattering, Incidence, ScatteringResult};
