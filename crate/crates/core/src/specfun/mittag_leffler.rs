use std::f64::consts::PI;

use super::gamma::{ln_gamma_positive, rgamma};
use super::quadrature::{integrate_pieces, QuadratureControl};
use super::{CompensatedSum, FractionalOrder, SeriesControl, SpecfunError};

/// `e^{-v^{1/α}}` underflows past `v = 745^α`.
const EXP_UNDERFLOW: f64 = 745.0;

struct SeriesOutcome {
    value: f64,
    rounding: f64,
    converged: bool,
}

/// Power series of `E_{α,β}(z)` (or its `z`-derivative when `derivative`), with
/// a running estimate of the rounding error carried by the log-magnitude terms.
fn power_series(alpha: f64, beta: f64, z: f64, ctl: &SeriesControl, derivative: bool) -> SeriesOutcome {
    if z == 0.0 {
        let value = if derivative { rgamma(alpha + beta) } else { rgamma(beta) };
        return SeriesOutcome {
            value,
            rounding: f64::EPSILON * value.abs(),
            converged: true,
        };
    }
    let ln_abs_z = z.abs().ln();
    let first = usize::from(derivative);
    let mut sum = CompensatedSum::default();
    let mut rounding = 0.0;
    let mut prev_ln = f64::INFINITY;
    for k in first..first + ctl.max_terms {
        let power = k - first;
        let ln_gamma = ln_gamma_positive(alpha * k as f64 + beta);
        let ln_power = power as f64 * ln_abs_z;
        let ln_factor = if derivative { (k as f64).ln() } else { 0.0 };
        let ln_mag = ln_power - ln_gamma + ln_factor;
        let magnitude = ln_mag.exp();
        let term = if z < 0.0 && power % 2 == 1 { -magnitude } else { magnitude };
        sum.add(term);
        rounding += magnitude * f64::EPSILON * (4.0 + ln_power.abs() + ln_gamma.abs() + ln_factor);
        if ln_mag < prev_ln && magnitude <= ctl.abs_tol {
            return SeriesOutcome {
                value: sum.value(),
                rounding,
                converged: true,
            };
        }
        prev_ln = ln_mag;
    }
    SeriesOutcome {
        value: sum.value(),
        rounding,
        converged: false,
    }
}

impl SeriesOutcome {
    fn reliable(&self, ctl: &SeriesControl) -> bool {
        self.converged && self.rounding <= (16.0 * ctl.abs_tol).max(8.0 * f64::EPSILON * self.value.abs())
    }
}

/// Integral representation for `0 < α < 1`, `x > 0`:
/// `E_α(-x) = sin(απ)/(απ) ∫_0^∞ e^{-v^{1/α}} x / (v² + 2vx cos(απ) + x²) dv`,
/// and for `E_α'(-x)` the same with `x` replaced by `v^{1/α} / α`.
fn integral_representation(alpha: f64, x: f64, ctl: &SeriesControl, derivative: bool) -> (f64, f64, bool) {
    // written in 1 - α so that nothing cancels as α → 1
    let gap = 1.0 - alpha;
    let cos = -(gap * PI).cos();
    let half_cos_sq = (0.5 * gap * PI).sin().powi(2);
    let scale = (gap * PI).sin() / (alpha * PI);
    let inv_alpha = 1.0 / alpha;
    let kernel = |v: f64| {
        let weight = (-v.powf(inv_alpha)).exp();
        // v² + 2vx cos απ + x²
        let denom = (v - x) * (v - x) + 4.0 * v * x * half_cos_sq;
        if derivative {
            // differentiated in x before the change of variable, which keeps the kernel positive
            inv_alpha * weight * v.powf(inv_alpha) / denom
        } else {
            weight * x / denom
        }
    };
    let upper = EXP_UNDERFLOW.powf(alpha);
    let mut points = vec![0.0];
    let peak = -x * cos;
    if peak > 0.0 && peak < upper {
        points.push(peak);
    }
    points.push(upper);
    let quad = QuadratureControl {
        abs_tol: ctl.abs_tol / scale,
        rel_tol: 4.0 * f64::EPSILON,
        max_intervals: 2000,
    };
    let r = integrate_pieces(kernel, &points, quad);
    let value = scale * r.value;
    let error = scale * r.error;
    let ok = error <= (16.0 * ctl.abs_tol).max(64.0 * f64::EPSILON * value.abs());
    (value, error, ok)
}

fn check_args(function: &'static str, beta: f64, z: f64) -> Result<(), SpecfunError> {
    if !z.is_finite() {
        return Err(SpecfunError::Domain { function, value: z });
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(SpecfunError::Domain { function, value: beta });
    }
    Ok(())
}

fn evaluate(
    function: &'static str,
    order: FractionalOrder,
    beta: f64,
    z: f64,
    ctl: &SeriesControl,
    derivative: bool,
) -> Result<f64, SpecfunError> {
    check_args(function, beta, z)?;
    let alpha = order.value();
    if alpha == 1.0 && beta == 1.0 {
        return Ok(z.exp());
    }
    let series = power_series(alpha, beta, z, ctl, derivative);
    if series.reliable(ctl) {
        return Ok(series.value);
    }
    if alpha < 1.0 && beta == 1.0 && z < 0.0 {
        let (value, error, ok) = integral_representation(alpha, -z, ctl, derivative);
        if ok {
            return Ok(value);
        }
        return Err(SpecfunError::Accuracy {
            function,
            partial: value,
            error,
        });
    }
    Err(SpecfunError::Accuracy {
        function,
        partial: series.value,
        error: series.rounding,
    })
}

/// Two-parameter Mittag-Leffler function `E_{α,β}(z) = Σ_k z^k / Γ(αk + β)`.
///
/// Summed as a compensated power series. When cancellation makes the series
/// unreliable (`z ≪ 0` with small `α`), `E_α = E_{α,1}` is evaluated from its
/// integral representation instead.
pub fn mittag_leffler(order: FractionalOrder, beta: f64, z: f64, ctl: &SeriesControl) -> Result<f64, SpecfunError> {
    evaluate("mittag_leffler", order, beta, z, ctl, false)
}

/// `d/dz E_{α,1}(z)`.
pub fn ml_derivative(order: FractionalOrder, z: f64, ctl: &SeriesControl) -> Result<f64, SpecfunError> {
    evaluate("ml_derivative", order, 1.0, z, ctl, true)
}

/// `(E_α(z), E_α'(z))`.
pub fn ml_with_derivative(order: FractionalOrder, z: f64, ctl: &SeriesControl) -> Result<(f64, f64), SpecfunError> {
    Ok((mittag_leffler(order, 1.0, z, ctl)?, ml_derivative(order, z, ctl)?))
}
