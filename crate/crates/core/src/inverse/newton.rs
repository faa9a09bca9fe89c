use nalgebra::{DMatrix, DVector};

use super::{IdentificationResult, InverseError, NewtonConfig};
use crate::spectral::{
    component_bounds, gram_admissibility, image_bound, jacobian, log_forward, observables, observables_and_jacobian,
    CoefficientVector, EvalSpec,
    Observables, SpectralError, SpectralProblem,
};

const ARMIJO_C: f64 = 1e-4;
/// Initial and extreme trust radii for the step in `ln λ` (max norm).
const INITIAL_RADIUS: f64 = 5.0;
const MIN_RADIUS: f64 = 0.05;
const MAX_RADIUS: f64 = 100.0;
/// Extra Newton steps taken after the tolerance is met, kept only if they reduce the residual.
const POLISH_STEPS: usize = 2;

struct Iterate {
    log_lambda: DVector<f64>,
    lambda: CoefficientVector,
    log_residual: DVector<f64>,
    /// Jacobian of `ln F` with respect to `ln λ`.
    log_jacobian: DMatrix<f64>,
    residual_norm: f64,
    /// `½ |ln F - ln φ|²`
    merit: f64,
}

fn evaluate_at(
    problem: &SpectralProblem,
    target: &DVector<f64>,
    spec: &EvalSpec,
    log_lambda: DVector<f64>,
) -> Result<Iterate, InverseError> {
    let lambda = CoefficientVector::new(log_lambda.iter().map(|l| l.exp()).collect())
        .map_err(|_| InverseError::Spectral(SpectralError::InvalidCoefficients("iterate left the positive orthant")))?;
    let lf = log_forward(problem, &lambda, spec)?;
    let n = target.len();
    let f = DVector::from_iterator(n, lf.ln_phi.iter().map(|l| l.exp()));
    let log_residual = DVector::from_iterator(n, (0..n).map(|i| lf.ln_phi[i] - target[i].ln()));
    Ok(Iterate {
        log_lambda,
        lambda,
        merit: 0.5 * log_residual.norm_squared(),
        log_residual,
        log_jacobian: lf.log_jacobian,
        residual_norm: (&f - target).norm(),
    })
}

/// Newton direction in `ℓ = ln λ` for the log-residual `ln F(λ) - ln φ`.
///
/// Far from the solution the Jacobian is often nearly singular and the Newton
/// step points along its near-null direction. When the step exceeds `radius` it
/// is replaced by the Levenberg-Marquardt step `(SᵀS + νI) d = -Sᵀr`
/// with the smallest `ν` (on a geometric grid) that brings it inside.
fn direction(it: &Iterate, radius: f64) -> DVector<f64> {
    let s = &it.log_jacobian;
    let r = &it.log_residual;
    if let Some(d) = s.clone().lu().solve(&(-r)) {
        if d.iter().all(|v| v.is_finite()) && d.amax() <= radius {
            return d;
        }
    }
    let g = s.transpose() * r;
    let h = s.transpose() * s;
    let n = g.len();
    let mut nu = 1e-10 * h.trace().max(f64::MIN_POSITIVE);
    for _ in 0..200 {
        let damped = &h + DMatrix::identity(n, n) * nu;
        if let Some(d) = damped.cholesky().map(|c| c.solve(&(-&g))) {
            if d.iter().all(|v| v.is_finite()) && d.amax() <= radius {
                return d;
            }
        }
        nu *= 4.0;
    }
    clamp(-g, radius)
}

fn merit_gradient(it: &Iterate) -> DVector<f64> {
    it.log_jacobian.transpose() * &it.log_residual
}

fn clamp(mut d: DVector<f64>, radius: f64) -> DVector<f64> {
    let m = d.amax();
    if m > radius {
        d *= radius / m;
    }
    d
}

fn condition(jac: &DMatrix<f64>) -> f64 {
    let eig = jac.clone().symmetric_eigenvalues();
    let max = eig.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

fn check_target(problem: &SpectralProblem, target: &Observables) -> Result<(), InverseError> {
    if target.len() != problem.n() {
        return Err(InverseError::InvalidTarget(format!(
            "target has {} components, problem has n = {}",
            target.len(),
            problem.n()
        )));
    }
    let bound = image_bound(problem);
    if target.norm() > bound {
        return Err(InverseError::Incompatible {
            reason: "norm of target exceeds the image bound",
            value: target.norm(),
            bound,
        });
    }
    for (phi, b) in target.as_slice().iter().zip(component_bounds(problem)) {
        if *phi > b {
            return Err(InverseError::Incompatible {
                reason: "component exceeds |A_i u0| |u0|",
                value: *phi,
                bound: b,
            });
        }
    }
    // F_i decreases from its value Σ σ_ik c_k² at λ = 0, which is never attained
    for (i, phi) in target.as_slice().iter().enumerate() {
        let sup: f64 = problem.active_modes().map(|m| m.sigma[i] * m.coeff * m.coeff).sum();
        if *phi >= sup {
            return Err(InverseError::Incompatible {
                reason: "component is not below its supremum over positive coefficients",
                value: *phi,
                bound: sup,
            });
        }
    }
    Ok(())
}

/// Accepted iterates of one residual-decreasing Newton run.
struct Run {
    it: Iterate,
    history: Vec<f64>,
    log_history: Vec<f64>,
    iterations: usize,
    stalled: bool,
    converged: bool,
}

/// Window and relative decrease below which a run counts as crawling.
const STAGNATION_WINDOW: usize = 10;
const STAGNATION_DECREASE: f64 = 1e-3;

/// Newton iteration in `ln λ` with Armijo backtracking on `½|ln F - ln φ|²`.
///
/// With `give_up_on_stagnation` the run also stops when the residual falls by
/// less than 0.1% over ten accepted steps, as it does when crawling along a valley.
fn newton_run(
    problem: &SpectralProblem,
    phi: &DVector<f64>,
    spec: &EvalSpec,
    config: &NewtonConfig,
    start: DVector<f64>,
    budget: usize,
    give_up_on_stagnation: bool,
) -> Result<Run, InverseError> {
    let phi_norm = phi.norm();
    let rel = |it: &Iterate| it.residual_norm / phi_norm;
    let mut it = evaluate_at(problem, phi, spec, start)?;
    let mut history = vec![rel(&it)];
    let mut log_history = vec![it.log_residual.norm()];
    let mut iterations = 0;
    let mut stalled = false;
    let mut polish = 0;
    let mut radius = INITIAL_RADIUS;
    let mut converged = rel(&it) <= config.residual_tol;

    while iterations < budget && (!converged || polish < POLISH_STEPS) {
        let d = direction(&it, radius);
        if converged {
            // polishing: full step only, kept if it helps
            polish += 1;
            let trial = evaluate_at(problem, phi, spec, &it.log_lambda + &d)?;
            if trial.merit < it.merit {
                it = trial;
                iterations += 1;
                history.push(rel(&it));
                log_history.push(it.log_residual.norm());
                continue;
            }
            break;
        }
        let slope = merit_gradient(&it).dot(&d).min(0.0);
        let mut t = 1.0;
        let accepted = loop {
            let trial = evaluate_at(problem, phi, spec, &it.log_lambda + &d * t)?;
            if trial.merit < it.merit && trial.merit <= it.merit + ARMIJO_C * t * slope {
                break Some(trial);
            }
            t *= 0.5;
            if t < config.min_step_factor {
                break None;
            }
        };
        match accepted {
            Some(next) => {
                radius = if t == 1.0 {
                    (2.0 * radius).min(MAX_RADIUS)
                } else if t < 0.25 {
                    (0.5 * radius).max(MIN_RADIUS)
                } else {
                    radius
                };
                it = next;
                iterations += 1;
                history.push(rel(&it));
                log_history.push(it.log_residual.norm());
                converged = rel(&it) <= config.residual_tol;
                let k = log_history.len();
                if give_up_on_stagnation
                    && !converged
                    && k > STAGNATION_WINDOW
                    && log_history[k - 1] > (1.0 - STAGNATION_DECREASE) * log_history[k - 1 - STAGNATION_WINDOW]
                {
                    stalled = true;
                    break;
                }
            }
            None => {
                stalled = true;
                break;
            }
        }
    }
    Ok(Run {
        it,
        history,
        log_history,
        iterations,
        stalled,
        converged,
    })
}

/// Relative residual at which the ascent hands over to the Newton run.
const ASCENT_HANDOVER: f64 = 1e-4;
/// Fraction of the distance to the boundary `λ_j = 0` a single ascent step may cover.
/// Largest relative growth of any `λ_j` in one scaled gradient step.
const MAX_STRETCH: f64 = 10.0;
const TO_BOUNDARY: f64 = 0.9;

/// Largest `t ≤ cap` at which `(F(λ + tδ) - φ)·δ` is still positive, capped so that
/// `λ` keeps a fraction of its distance to the boundary.
fn exact_search(
    lam: &DVector<f64>,
    delta: &DVector<f64>,
    cap: f64,
    residual: &dyn Fn(&DVector<f64>) -> Result<DVector<f64>, InverseError>,
) -> Result<f64, InverseError> {
    let mut t_hi = cap;
    for j in 0..lam.len() {
        if delta[j] < 0.0 {
            t_hi = f64::min(t_hi, -TO_BOUNDARY * lam[j] / delta[j]);
        }
    }
    let slope = |t: f64| -> Result<f64, InverseError> { Ok(residual(&(lam + delta * t))?.dot(delta)) };
    if slope(t_hi)? >= 0.0 {
        return Ok(t_hi);
    }
    let (mut lo, mut hi) = (0.0, t_hi);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if slope(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Maximizes the strictly concave potential `H(λ) = G(λ) - φ·λ`, where `∇G = F`.
///
/// `∇H = F - φ` and the Hessian is the negative definite Jacobian, so the
/// Newton step in `λ` is an ascent direction, as is `F - φ` scaled by any positive diagonal, and `H`
/// has no stationary point but the solution. Along each step the exact line maximum is located by
/// bisection on the sign of `(F - φ)·δ`; `H` itself is never evaluated.
/// Unlike the residual merit this cannot be drawn into the faces `λ_j → 0`.
fn concave_ascent(
    problem: &SpectralProblem,
    phi: &DVector<f64>,
    spec: &EvalSpec,
    start: DVector<f64>,
    budget: usize,
) -> Result<(DVector<f64>, usize), InverseError> {
    let residual = |lam: &DVector<f64>| -> Result<DVector<f64>, InverseError> {
        let f = observables(problem, &CoefficientVector::new(lam.iter().copied().collect())?, spec)?;
        Ok(DVector::from_column_slice(f.as_slice()) - phi)
    };
    let mut lam = start;
    for k in 0..budget {
        let (f, jac) = observables_and_jacobian(problem, &CoefficientVector::new(lam.iter().copied().collect())?, spec)?;
        let r = DVector::from_column_slice(f.as_slice()) - phi;
        if r.norm() <= ASCENT_HANDOVER * phi.norm() {
            return Ok((lam, k));
        }
        // Far from the solution the Newton step follows the softest direction of a nearly
        // singular Jacobian, so a gradient step competes with it. Scaling the gradient by
        // `λ_j²` keeps it from jamming against a face `λ_j = 0`.
        let newton = jac.lu().solve(&(-&r)).filter(|d| d.iter().all(|v| v.is_finite()) && r.dot(d) > 0.0);
        let scaled = r.zip_map(&lam, |g, l| g * l * l);
        let stretch = scaled.zip_map(&lam, |d, l| d.abs() / l).max();
        let mut best: Option<(f64, DVector<f64>)> = None;
        for (delta, cap) in newton.map(|d| (d, 1.0)).into_iter().chain([(scaled, MAX_STRETCH / stretch)]) {
            let t = exact_search(&lam, &delta, cap, &residual)?;
            if t == 0.0 {
                continue;
            }
            let next = &lam + &delta * t;
            let size = residual(&next)?.norm();
            if best.as_ref().is_none_or(|(b, _)| size < *b) {
                best = Some((size, next));
            }
        }
        match best {
            Some((_, next)) => lam = next,
            None => return Ok((lam, k + 1)),
        }
    }
    Ok((lam, budget))
}

/// Solves `F_α(λ) = φ` for `λ > 0` by damped Newton iteration in `ln λ`.
///
/// Should the run stall or crawl, typically in a valley of the residual that
/// leaves through a face `λ_j → 0`, it is restarted from the point reached by
/// [`concave_ascent`] from the original start. The reported histories are
/// those of the last run, so they remain strictly decreasing.
pub fn identify(
    problem: &SpectralProblem,
    target: &Observables,
    spec: &EvalSpec,
    config: &NewtonConfig,
) -> Result<IdentificationResult, InverseError> {
    config.validate()?;
    let report = gram_admissibility(problem);
    if !report.admissible {
        return Err(InverseError::Inadmissible(report));
    }
    check_target(problem, target)?;
    let n = problem.n();
    let start = config.initial_guess.clone().unwrap_or_else(|| CoefficientVector::ones(n));
    start.check_dim(n)?;
    let phi = DVector::from_vec(target.as_slice().to_vec());
    let start = DVector::from_column_slice(start.as_slice());

    let mut run = newton_run(problem, &phi, spec, config, start.map(f64::ln), config.max_iterations, true)?;
    let mut iterations = run.iterations;
    let mut restarted = false;
    if !run.converged && iterations < config.max_iterations {
        let (lam, used) = concave_ascent(problem, &phi, spec, start, config.max_iterations - iterations)?;
        iterations += used;
        let retry = newton_run(problem, &phi, spec, config, lam.map(f64::ln), config.max_iterations - iterations, false)?;
        iterations += retry.iterations;
        if retry.converged || retry.it.merit < run.it.merit {
            run = retry;
            restarted = true;
        }
    }

    let jac = jacobian(problem, &run.it.lambda, spec)?;
    let result = IdentificationResult {
        lambda_hat: run.it.lambda,
        iterations,
        residual_history: run.history,
        log_residual_history: run.log_history,
        converged: run.converged,
        restarted,
        jacobian_condition: condition(&jac),
        likely_incompatible: !run.converged && (run.stalled || iterations >= config.max_iterations),
    };
    if result.converged {
        Ok(result)
    } else {
        Err(InverseError::NotConverged(Box::new(result)))
    }
}
