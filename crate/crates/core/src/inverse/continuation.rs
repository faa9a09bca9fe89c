use serde::{Deserialize, Serialize};

use super::{identify, IdentificationResult, InverseError, NewtonConfig};
use crate::specfun::FractionalOrder;
use crate::spectral::{CoefficientVector, EvalSpec, Observables, SpectralError, SpectralProblem};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationFailure {
    pub index: usize,
    pub alpha: f64,
    pub reason: String,
}

/// Solutions `λ_α` along increasing `α`. On failure, holds the converged prefix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuationPath {
    pub alphas: Vec<f64>,
    pub lambdas: Vec<CoefficientVector>,
    pub results: Vec<IdentificationResult>,
    pub failure: Option<ContinuationFailure>,
}

impl ContinuationPath {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// Identifies `λ_α` for each `α` in turn, warm-starting every stage from the
/// previous solution. The first stage starts from `config.initial_guess`.
pub fn alpha_continuation(
    problem: &SpectralProblem,
    target: &Observables,
    t_bar: f64,
    alphas: &[f64],
    config: &NewtonConfig,
) -> Result<ContinuationPath, InverseError> {
    if alphas.is_empty() {
        return Err(InverseError::Spectral(SpectralError::Input("no orders given".into())));
    }
    if alphas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(InverseError::Spectral(SpectralError::Input(
            "orders must be strictly increasing".into(),
        )));
    }
    let orders = alphas
        .iter()
        .map(|&a| FractionalOrder::new(a).map_err(SpectralError::from))
        .collect::<Result<Vec<_>, _>>()?;
    let mut path = ContinuationPath {
        alphas: Vec::new(),
        lambdas: Vec::new(),
        results: Vec::new(),
        failure: None,
    };
    let mut guess: Option<CoefficientVector> = config.initial_guess.clone();
    for (index, order) in orders.into_iter().enumerate() {
        let spec = EvalSpec::new(order, t_bar)?;
        let stage = NewtonConfig {
            initial_guess: guess.clone(),
            ..config.clone()
        };
        match identify(problem, target, &spec, &stage) {
            Ok(result) => {
                guess = Some(result.lambda_hat.clone());
                path.alphas.push(order.value());
                path.lambdas.push(result.lambda_hat.clone());
                path.results.push(result);
            }
            Err(err) => {
                path.failure = Some(ContinuationFailure {
                    index,
                    alpha: order.value(),
                    reason: err.to_string(),
                });
                break;
            }
        }
    }
    Ok(path)
}
