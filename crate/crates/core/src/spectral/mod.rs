//! Joint spectral representation of the operator family `A_1, …, A_n`.
//!
//! A problem is a finite list of modes: joint eigenvalues `σ_{i,k}` of the
//! commuting operators on one orthonormal eigenvector, and the coefficient `c_k`
//! of the initial datum on it. Everything else (solution, forward map, Jacobian,
//! Gram matrix) is a sum over modes.

mod admissibility;
mod forward;
mod generators;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::specfun::{FractionalOrder, SpecfunError};

pub use admissibility::{gram_admissibility, AdmissibilityReport};
pub use forward::{
    component_bounds, evolve, image_bound, jacobian, log_forward, mode_rates, observables,
    observables_and_jacobian, solution_distance, LogForward,
};
pub use generators::{dirichlet_box_modes, lame_torus_modes, Polarization, Wavevector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("problem must contain at least one mode")]
    Empty,
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("mode {index}: expected {expected} eigenvalues, got {got}")]
    DimensionMismatch { index: usize, expected: usize, got: usize },
    #[error("mode {index}: {reason}")]
    InvalidMode { index: usize, reason: &'static str },
    #[error("coefficient vector: {0}")]
    InvalidCoefficients(&'static str),
    #[error("observables: {0}")]
    InvalidObservables(&'static str),
    #[error("measuring time must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("invalid input: {0}")]
    Input(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// One joint eigentriple: eigenvalues `σ_{1,k}, …, σ_{n,k}` and the coefficient
/// `c_k = <u_0, e_k>`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub sigma: Vec<f64>,
    pub coeff: f64,
}

impl Mode {
    pub fn new(sigma: Vec<f64>, coeff: f64) -> Self {
        Self { sigma, coeff }
    }

    /// `μ_k = Σ_i λ_i σ_{i,k}`
    pub fn rate(&self, lambda: &[f64]) -> f64 {
        self.sigma.iter().zip(lambda).map(|(s, l)| s * l).sum()
    }

    fn validate(&self, index: usize, n: usize) -> Result<(), SpectralError> {
        if self.sigma.len() != n {
            return Err(SpectralError::DimensionMismatch {
                index,
                expected: n,
                got: self.sigma.len(),
            });
        }
        if self.sigma.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(SpectralError::InvalidMode {
                index,
                reason: "eigenvalues must be finite and nonnegative",
            });
        }
        if self.sigma.iter().all(|s| *s == 0.0) {
            return Err(SpectralError::InvalidMode {
                index,
                reason: "at least one eigenvalue must be positive",
            });
        }
        if !self.coeff.is_finite() {
            return Err(SpectralError::InvalidMode {
                index,
                reason: "coefficient must be finite",
            });
        }
        Ok(())
    }
}

#[derive(Deserialize)]
struct RawProblem {
    n: usize,
    modes: Vec<Mode>,
}

/// Finite mode set of dimension `n`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem")]
pub struct SpectralProblem {
    n: usize,
    modes: Vec<Mode>,
}

impl TryFrom<RawProblem> for SpectralProblem {
    type Error = SpectralError;
    fn try_from(raw: RawProblem) -> Result<Self, Self::Error> {
        Self::new(raw.n, raw.modes)
    }
}

impl SpectralProblem {
    pub fn new(n: usize, modes: Vec<Mode>) -> Result<Self, SpectralError> {
        if n == 0 {
            return Err(SpectralError::ZeroDimension);
        }
        if modes.is_empty() {
            return Err(SpectralError::Empty);
        }
        for (index, mode) in modes.iter().enumerate() {
            mode.validate(index, n)?;
        }
        Ok(Self { n, modes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    /// Modes with a nonzero coefficient; the others contribute nothing.
    pub fn active_modes(&self) -> impl Iterator<Item = &Mode> {
        self.modes.iter().filter(|m| m.coeff != 0.0)
    }

    /// `‖u_0‖`
    pub fn initial_norm(&self) -> f64 {
        self.active_modes().map(|m| m.coeff * m.coeff).sum::<f64>().sqrt()
    }

    /// `‖A_i u_0‖` for each `i`.
    pub fn image_norms(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                self.active_modes()
                    .map(|m| (m.sigma[i] * m.coeff).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect()
    }

    /// `‖u_0‖_D = Σ_i ‖A_i u_0‖`
    pub fn graph_norm(&self) -> f64 {
        self.image_norms().iter().sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SpectralError> {
        serde_json::from_str(text).map_err(|e| SpectralError::Input(e.to_string()))
    }
}

/// Unknown coefficients `λ ∈ ℝⁿ₊`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub fn new(lambda: Vec<f64>) -> Result<Self, SpectralError> {
        if lambda.is_empty() {
            return Err(SpectralError::InvalidCoefficients("empty"));
        }
        if lambda.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(SpectralError::InvalidCoefficients("entries must be positive and finite"));
        }
        Ok(Self(lambda))
    }

    pub fn ones(n: usize) -> Self {
        Self(vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<(), SpectralError> {
        if self.0.len() != n {
            return Err(SpectralError::Input(format!(
                "coefficient vector has length {}, problem has n = {n}",
                self.0.len()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<f64>> for CoefficientVector {
    type Error = SpectralError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<CoefficientVector> for Vec<f64> {
    fn from(c: CoefficientVector) -> Vec<f64> {
        c.0
    }
}

/// Fractional order and measuring instant `T̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalSpec {
    pub order: FractionalOrder,
    pub t_bar: f64,
}

impl EvalSpec {
    pub fn new(order: FractionalOrder, t_bar: f64) -> Result<Self, SpectralError> {
        if !(t_bar > 0.0 && t_bar.is_finite()) {
            return Err(SpectralError::InvalidTime(t_bar));
        }
        Ok(Self { order, t_bar })
    }
}

/// Energies `φ_i = <A_i u(T̄), u(T̄)>`.
///
/// Measured targets are strictly positive. Values produced by the forward map are
/// only guaranteed nonnegative, since they underflow for very large `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Observables(Vec<f64>);

impl Observables {
    pub fn new(phi: Vec<f64>) -> Result<Self, SpectralError> {
        if phi.is_empty() {
            return Err(SpectralError::InvalidObservables("empty"));
        }
        if phi.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(SpectralError::InvalidObservables("entries must be positive and finite"));
        }
        Ok(Self(phi))
    }

    pub(crate) fn computed(phi: Vec<f64>) -> Self {
        Self(phi)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|p| p * p).sum::<f64>().sqrt()
    }
}

impl TryFrom<Vec<f64>> for Observables {
    type Error = SpectralError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<Observables> for Vec<f64> {
    fn from(o: Observables) -> Vec<f64> {
        o.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert_eq!(SpectralProblem::new(1, vec![]), Err(SpectralError::Empty));
        assert!(matches!(
            SpectralProblem::new(2, vec![Mode::new(vec![1.0], 1.0)]),
            Err(SpectralError::DimensionMismatch { .. })
        ));
        assert!(SpectralProblem::new(2, vec![Mode::new(vec![0.0, 0.0], 1.0)]).is_err());
        assert!(SpectralProblem::new(1, vec![Mode::new(vec![-1.0], 1.0)]).is_err());
        assert!(SpectralProblem::new(2, vec![Mode::new(vec![0.0, 1.0], 1.0)]).is_ok());
        assert!(CoefficientVector::new(vec![1.0, 0.0]).is_err());
        assert!(Observables::new(vec![1.0, -1.0]).is_err());
        assert!(EvalSpec::new(FractionalOrder::ONE, 0.0).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"n": 2, "modes": [{"sigma": [1.0, 0.5], "coeff": 1.0}, {"sigma": [0.5, 1.0], "coeff": 2.0}]}"#;
        let p = SpectralProblem::from_json(text).unwrap();
        assert_eq!(p.n(), 2);
        assert_eq!(p.modes()[1].coeff, 2.0);
        let back = SpectralProblem::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        assert!(SpectralProblem::from_json(r#"{"n": 2, "modes": [{"sigma": [1.0], "coeff": 1.0}]}"#).is_err());
    }

    #[test]
    fn norms() {
        let p = SpectralProblem::new(1, vec![Mode::new(vec![2.0], 3.0)]).unwrap();
        assert_eq!(p.initial_norm(), 3.0);
        assert_eq!(p.graph_norm(), 6.0);
    }

    #[test]
    fn zero_coefficient_modes_are_inactive() {
        let p = SpectralProblem::new(1, vec![Mode::new(vec![1.0], 0.0), Mode::new(vec![4.0], 1.0)]).unwrap();
        assert_eq!(p.active_modes().count(), 1);
        assert_eq!(p.modes().len(), 2);
    }
}
