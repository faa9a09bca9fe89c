use nalgebra::DMatrix;

use super::{CoefficientVector, EvalSpec, Observables, SpectralError, SpectralProblem};
use crate::specfun::{mittag_leffler, ml_with_derivative, FractionalOrder, SeriesControl};

/// `μ_k = Σ_i λ_i σ_{i,k}` for every stored mode.
pub fn mode_rates(problem: &SpectralProblem, lambda: &CoefficientVector) -> Result<Vec<f64>, SpectralError> {
    lambda.check_dim(problem.n())?;
    Ok(problem.modes().iter().map(|m| m.rate(lambda.as_slice())).collect())
}

/// Mode amplitudes `a_k(t) = c_k E_α(-μ_k t^α)` of the solution at time `t`.
pub fn evolve(
    problem: &SpectralProblem,
    lambda: &CoefficientVector,
    order: FractionalOrder,
    t: f64,
) -> Result<Vec<f64>, SpectralError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(SpectralError::InvalidTime(t));
    }
    let ctl = SeriesControl::default();
    let rates = mode_rates(problem, lambda)?;
    let t_alpha = t.powf(order.value());
    problem
        .modes()
        .iter()
        .zip(rates)
        .map(|(m, mu)| {
            if m.coeff == 0.0 || t == 0.0 {
                return Ok(m.coeff);
            }
            Ok(m.coeff * mittag_leffler(order, 1.0, -mu * t_alpha, &ctl)?)
        })
        .collect()
}

/// `‖u_λ(t) - u_μ(t)‖` evaluated mode-wise.
pub fn solution_distance(
    problem: &SpectralProblem,
    lambda: &CoefficientVector,
    mu: &CoefficientVector,
    order: FractionalOrder,
    t: f64,
) -> Result<f64, SpectralError> {
    let a = evolve(problem, lambda, order, t)?;
    let b = evolve(problem, mu, order, t)?;
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

/// Forward map `F_{α,i}(λ) = Σ_k σ_{i,k} c_k² E_α(-μ_k T̄^α)²`.
pub fn observables(
    problem: &SpectralProblem,
    lambda: &CoefficientVector,
    spec: &EvalSpec,
) -> Result<Observables, SpectralError> {
    let ctl = SeriesControl::default();
    lambda.check_dim(problem.n())?;
    let t_alpha = spec.t_bar.powf(spec.order.value());
    let mut phi = vec![0.0; problem.n()];
    for m in problem.active_modes() {
        let e = mittag_leffler(spec.order, 1.0, -m.rate(lambda.as_slice()) * t_alpha, &ctl)?;
        let weight = m.coeff * m.coeff * e * e;
        for (p, s) in phi.iter_mut().zip(&m.sigma) {
            *p += s * weight;
        }
    }
    Ok(Observables::computed(phi))
}

/// `∂F_i/∂λ_j = -2 T̄^α Σ_k σ_{i,k} σ_{j,k} c_k² E_α(-μ_k T̄^α) E_α'(-μ_k T̄^α)`.
pub fn jacobian(
    problem: &SpectralProblem,
    lambda: &CoefficientVector,
    spec: &EvalSpec,
) -> Result<DMatrix<f64>, SpectralError> {
    observables_and_jacobian(problem, lambda, spec).map(|(_, j)| j)
}

/// Forward map and Jacobian from one pass over the modes.
pub fn observables_and_jacobian(
    problem: &SpectralProblem,
    lambda: &CoefficientVector,
    spec: &EvalSpec,
) -> Result<(Observables, DMatrix<f64>), SpectralError> {
    let ctl = SeriesControl::default();
    lambda.check_dim(problem.n())?;
    let n = problem.n();
    let t_alpha = spec.t_bar.powf(spec.order.value());
    let mut phi = vec![0.0; n];
    let mut jac = DMatrix::zeros(n, n);
    for m in problem.active_modes() {
        let (e, de) = ml_with_derivative(spec.order, -m.rate(lambda.as_slice()) * t_alpha, &ctl)?;
        let c2 = m.coeff * m.coeff;
        let weight = c2 * e * e;
        let slope = -2.0 * t_alpha * c2 * e * de;
        for i in 0..n {
            phi[i] += m.sigma[i] * weight;
            for j in 0..=i {
                jac[(i, j)] += slope * m.sigma[i] * m.sigma[j];
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            jac[(j, i)] = jac[(i, j)];
        }
    }
    Ok((Observables::computed(phi), jac))
}

/// Forward map in logarithmic form, safe against underflow of `F` when `λ` is large.
#[derive(Debug, Clone, PartialEq)]
pub struct LogForward {
    /// `ln F_i(λ)`
    pub ln_phi: Vec<f64>,
    /// `∂ ln F_i / ∂ ln λ_j = (λ_j / F_i) ∂F_i/∂λ_j`
    pub log_jacobian: DMatrix<f64>,
}

/// `ln E_α(-x)` and `E_α'(-x) / E_α(-x)`.
fn log_ml(order: FractionalOrder, x: f64, ctl: &SeriesControl) -> Result<(f64, f64), SpectralError> {
    if order.is_classical() {
        return Ok((-x, 1.0));
    }
    let (e, de) = ml_with_derivative(order, -x, ctl)?;
    Ok((e.ln(), de / e))
}

/// `ln F` by log-sum-exp over modes, and the Jacobian of `ln F` in `ln λ`.
pub fn log_forward(
    problem: &SpectralProblem,
    lambda: &CoefficientVector,
    spec: &EvalSpec,
) -> Result<LogForward, SpectralError> {
    let ctl = SeriesControl::default();
    lambda.check_dim(problem.n())?;
    let n = problem.n();
    let lam = lambda.as_slice();
    let t_alpha = spec.t_bar.powf(spec.order.value());
    // per active mode: ln(c² E²) and E'/E
    let mut terms = Vec::new();
    for m in problem.active_modes() {
        let (ln_e, ratio) = log_ml(spec.order, m.rate(lam) * t_alpha, &ctl)?;
        terms.push((m, 2.0 * m.coeff.abs().ln() + 2.0 * ln_e, ratio));
    }
    let mut ln_phi = vec![f64::NEG_INFINITY; n];
    let mut log_jacobian = DMatrix::zeros(n, n);
    for i in 0..n {
        let exps: Vec<f64> = terms
            .iter()
            .map(|(m, a, _)| if m.sigma[i] > 0.0 { m.sigma[i].ln() + a } else { f64::NEG_INFINITY })
            .collect();
        let peak = exps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if peak == f64::NEG_INFINITY {
            continue;
        }
        let total: f64 = exps.iter().map(|a| (a - peak).exp()).sum();
        ln_phi[i] = peak + total.ln();
        for ((m, _, ratio), a) in terms.iter().zip(&exps) {
            let w = (a - ln_phi[i]).exp();
            if w == 0.0 {
                continue;
            }
            for j in 0..n {
                log_jacobian[(i, j)] += -2.0 * t_alpha * w * ratio * m.sigma[j] * lam[j];
            }
        }
    }
    Ok(LogForward { ln_phi, log_jacobian })
}

/// `‖u_0‖_D ‖u_0‖`, a bound on the euclidean norm of every attainable `F_α(λ)`.
pub fn image_bound(problem: &SpectralProblem) -> f64 {
    problem.graph_norm() * problem.initial_norm()
}

/// `‖A_i u_0‖ ‖u_0‖`, bounding each component `F_{α,i}` separately.
pub fn component_bounds(problem: &SpectralProblem) -> Vec<f64> {
    let norm = problem.initial_norm();
    problem.image_norms().into_iter().map(|a| a * norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Mode;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    fn single(sigma: f64, c: f64) -> SpectralProblem {
        SpectralProblem::new(1, vec![Mode::new(vec![sigma], c)]).unwrap()
    }

    #[test]
    fn classical_single_mode() {
        let p = single(2.0, 1.0);
        let lam = CoefficientVector::new(vec![3.0]).unwrap();
        let a = evolve(&p, &lam, order(1.0), 0.5).unwrap();
        assert!((a[0] - (-3f64).exp()).abs() < 1e-15);
        let a0 = evolve(&p, &lam, order(0.3), 0.0).unwrap();
        assert_eq!(a0, vec![1.0]);
    }

    #[test]
    fn single_mode_observable_and_jacobian() {
        let p = single(1.0, 1.0);
        let lam = CoefficientVector::ones(1);
        let spec = EvalSpec::new(order(1.0), 1.0).unwrap();
        let f = observables(&p, &lam, &spec).unwrap();
        assert!((f.as_slice()[0] - (-2f64).exp()).abs() < 1e-15);
        let j = jacobian(&p, &lam, &spec).unwrap();
        assert!((j[(0, 0)] + 2.0 * (-2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn large_lambda_kills_observables() {
        let p = SpectralProblem::new(2, vec![Mode::new(vec![1.0, 0.5], 1.0), Mode::new(vec![0.5, 1.0], 1.0)]).unwrap();
        let lam = CoefficientVector::new(vec![1e6, 1e6]).unwrap();
        for a in [0.75, 1.0] {
            let spec = EvalSpec::new(order(a), 0.04).unwrap();
            let f = observables(&p, &lam, &spec).unwrap();
            assert!(f.as_slice().iter().all(|v| v.abs() < 1e-8), "{f:?}");
        }
    }

    #[test]
    fn bounds() {
        assert_eq!(image_bound(&single(1.0, 1.0)), 1.0);
        assert_eq!(image_bound(&single(2.0, 3.0)), 18.0);
        assert_eq!(component_bounds(&single(2.0, 3.0)), vec![18.0]);
    }

    #[test]
    fn log_form_matches_linear_form() {
        let p = SpectralProblem::new(2, vec![Mode::new(vec![1.0, 0.5], 1.0), Mode::new(vec![0.5, 1.0], -2.0)]).unwrap();
        let lam = CoefficientVector::new(vec![1.3, 0.7]).unwrap();
        for a in [0.25, 0.75, 1.0] {
            let spec = EvalSpec::new(order(a), 0.3).unwrap();
            let (f, j) = observables_and_jacobian(&p, &lam, &spec).unwrap();
            let lf = log_forward(&p, &lam, &spec).unwrap();
            for i in 0..2 {
                assert!((lf.ln_phi[i] - f.as_slice()[i].ln()).abs() < 1e-13);
                for k in 0..2 {
                    let expected = j[(i, k)] * lam.as_slice()[k] / f.as_slice()[i];
                    assert!((lf.log_jacobian[(i, k)] - expected).abs() < 1e-12 * expected.abs());
                }
            }
        }
    }

    #[test]
    fn log_form_survives_underflow() {
        let p = single(4.0, 1.0);
        let lam = CoefficientVector::new(vec![100.0]).unwrap();
        let spec = EvalSpec::new(order(1.0), 1.0).unwrap();
        assert_eq!(observables(&p, &lam, &spec).unwrap().as_slice()[0], 0.0);
        let lf = log_forward(&p, &lam, &spec).unwrap();
        assert!((lf.ln_phi[0] - (4f64.ln() - 800.0)).abs() < 1e-12);
        assert!((lf.log_jacobian[(0, 0)] + 800.0).abs() < 1e-10);
    }

    #[test]
    fn dimension_mismatch() {
        let p = single(1.0, 1.0);
        let lam = CoefficientVector::ones(2);
        assert!(evolve(&p, &lam, order(1.0), 1.0).is_err());
    }
}
