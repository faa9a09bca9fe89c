//! Fractional-in-time anisotropic diffusion: forward map and coefficient identification.
//!
//! The abstract problem is `∂_t^α u + Σ λ_i A_i u = 0` for a family of commuting,
//! self-adjoint, nonnegative operators `A_i` given through their joint spectrum.
//! From the energies `φ_i = <A_i u(T), u(T)>` at one measuring instant the
//! positive coefficients `λ_i` are recovered by a damped Newton iteration.
//!
//! - [`specfun`]: Gamma, Mittag-Leffler and Wright functions.
//! - [`spectral`]: mode sets, solution operator, forward map, Jacobian, admissibility.
//! - [`inverse`]: Newton identification and continuation in the fractional order.

pub mod inverse;
pub mod specfun;
pub mod spectral;

pub use specfun::{FractionalOrder, SeriesControl, SpecfunError};
pub use spectral::{
    CoefficientVector, EvalSpec, Mode, Observables, SpectralError, SpectralProblem,
};
