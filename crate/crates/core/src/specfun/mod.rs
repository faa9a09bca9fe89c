//! Scalar special functions used by the spectral evaluation.
//!
//! Everything here is a pure function of its arguments.

mod gamma;
mod mittag_leffler;
pub mod quadrature;
mod wright;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gamma::{gamma, ln_gamma, rgamma, sin_pi};
pub use mittag_leffler::{ml_derivative, ml_with_derivative, mittag_leffler};
pub use wright::{
    wright_laplace, wright_laplace_with, wright_moment, wright_phi, wright_phi_reliable_range,
    LaplaceEstimate,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },
    #[error("{function} did not reach tolerance (partial value {partial}, error estimate {error})")]
    Accuracy {
        function: &'static str,
        partial: f64,
        error: f64,
    },
    #[error("wright_phi at t = {t} is beyond the reliable series range t <= {t_max}")]
    Range { t: f64, t_max: f64 },
    #[error("fractional order must satisfy 0 < alpha <= 1, got {0}")]
    InvalidOrder(f64),
    #[error("invalid series control: {0}")]
    InvalidControl(&'static str),
}

/// Order `α` of the Caputo derivative, `0 < α ≤ 1`; `α = 1` is the classical case.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub const ONE: FractionalOrder = FractionalOrder(1.0);

    pub fn new(alpha: f64) -> Result<Self, SpecfunError> {
        if alpha.is_finite() && alpha > 0.0 && alpha <= 1.0 {
            Ok(Self(alpha))
        } else {
            Err(SpecfunError::InvalidOrder(alpha))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_classical(self) -> bool {
        self.0 == 1.0
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = SpecfunError;
    fn try_from(alpha: f64) -> Result<Self, Self::Error> {
        Self::new(alpha)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(order: FractionalOrder) -> f64 {
        order.0
    }
}

/// Truncation control for the power series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl SeriesControl {
    pub fn new(abs_tol: f64, max_terms: usize) -> Result<Self, SpecfunError> {
        if !(abs_tol > 0.0 && abs_tol.is_finite()) {
            return Err(SpecfunError::InvalidControl("abs_tol must be positive"));
        }
        if max_terms == 0 {
            return Err(SpecfunError::InvalidControl("max_terms must be at least 1"));
        }
        Ok(Self { abs_tol, max_terms })
    }
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-14,
            max_terms: 400,
        }
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
