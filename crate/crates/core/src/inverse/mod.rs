//! Recovery of `λ` from the energies `φ = F_α(λ)`.

mod continuation;
mod newton;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spectral::{AdmissibilityReport, CoefficientVector, SpectralError};

pub use continuation::{alpha_continuation, ContinuationFailure, ContinuationPath};
pub use newton::identify;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonConfig {
    /// Stopping tolerance on `|F(λ) - φ| / |φ|`.
    pub residual_tol: f64,
    pub max_iterations: usize,
    /// Smallest Armijo step factor tried before declaring stagnation.
    pub min_step_factor: f64,
    /// Defaults to `λ = (1, …, 1)`.
    pub initial_guess: Option<CoefficientVector>,
}

impl Default for NewtonConfig {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_iterations: 100,
            min_step_factor: 2f64.powi(-30),
            initial_guess: None,
        }
    }
}

impl NewtonConfig {
    pub fn validate(&self) -> Result<(), InverseError> {
        if !(self.residual_tol > 0.0 && self.residual_tol.is_finite()) {
            return Err(InverseError::InvalidConfig("residual_tol must be positive"));
        }
        if self.max_iterations == 0 {
            return Err(InverseError::InvalidConfig("max_iterations must be at least 1"));
        }
        if !(self.min_step_factor > 0.0 && self.min_step_factor <= 1.0) {
            return Err(InverseError::InvalidConfig("min_step_factor must lie in (0, 1]"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentificationResult {
    pub lambda_hat: CoefficientVector,
    pub iterations: usize,
    /// Relative residual `|F(λ) - φ| / |φ|` at every accepted iterate of the last run, its
    /// starting point included.
    pub residual_history: Vec<f64>,
    /// `|ln F(λ) - ln φ|` at the same iterates; the line search makes it strictly decreasing.
    pub log_residual_history: Vec<f64>,
    pub converged: bool,
    /// The first Newton run stalled; the reported one started where an ascent on the
    /// concave potential with gradient `F - φ` got close to the solution.
    pub restarted: bool,
    /// Ratio of extreme eigenvalue magnitudes of the Jacobian at `lambda_hat`.
    pub jacobian_condition: f64,
    /// Set when the iteration stalled above tolerance: the target is probably
    /// outside the image of the forward map.
    pub likely_incompatible: bool,
}

impl IdentificationResult {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history holds the starting point")
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InverseError {
    #[error("initial datum is not admissible (smallest Gram eigenvalue {})", .0.min_eigenvalue)]
    Inadmissible(AdmissibilityReport),
    #[error("target is incompatible: {reason} ({value} > {bound})")]
    Incompatible { reason: &'static str, value: f64, bound: f64 },
    #[error("Newton iteration did not converge (relative residual {})", .0.final_residual())]
    NotConverged(Box<IdentificationResult>),
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
