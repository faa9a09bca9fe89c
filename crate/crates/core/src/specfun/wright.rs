use std::f64::consts::PI;

use super::gamma::{gamma_positive, sin_pi};
use super::quadrature::{integrate, QuadratureControl};
use super::{CompensatedSum, FractionalOrder, SeriesControl, SpecfunError};

/// The series is trusted while its rounding estimate stays below this.
const CANCELLATION_BUDGET: f64 = 2e-8;
/// Bracket width accepted by `wright_laplace`.
const LAPLACE_TOL: f64 = 1e-6;
const SEARCH_LIMIT: f64 = 50.0;

struct PhiSeries {
    value: f64,
    rounding: f64,
    converged: bool,
}

/// `Φ_α(t) = Σ_n (-t)^n / (n! Γ(1 - α(n+1)))`
///
/// Terms are formed in linear space as `(t^n/n!) Γ(y) sin(πy) / π` with
/// `y = α(n+1)` (reflection), which keeps their relative error near `√n ε`.
fn phi_series(alpha: f64, t: f64, ctl: &SeriesControl) -> PhiSeries {
    let mut sum = CompensatedSum::default();
    let mut rounding = 0.0;
    let mut prev_envelope = f64::INFINITY;
    // t^n / n!
    let mut power = 1.0;
    for n in 0..ctl.max_terms {
        let nf = n as f64;
        if n > 0 {
            power *= t / nf;
        }
        let y = alpha * (nf + 1.0);
        let envelope = power * gamma_positive(y) / PI;
        if !envelope.is_finite() {
            break;
        }
        let magnitude = envelope * sin_pi(y);
        let term = if n % 2 == 1 { -magnitude } else { magnitude };
        sum.add(term);
        rounding += envelope * f64::EPSILON * (8.0 + nf.sqrt() * 2.0);
        // terms vanish where y is an integer, so truncate on the envelope instead
        if envelope < prev_envelope && envelope <= ctl.abs_tol {
            return PhiSeries {
                value: sum.value(),
                rounding,
                converged: true,
            };
        }
        prev_envelope = envelope;
        if t == 0.0 {
            break;
        }
    }
    PhiSeries {
        value: sum.value(),
        rounding,
        converged: t == 0.0,
    }
}

fn reliable(s: &PhiSeries) -> bool {
    s.converged && s.rounding <= CANCELLATION_BUDGET
}

fn require_fractional(function: &'static str, order: FractionalOrder) -> Result<f64, SpecfunError> {
    let alpha = order.value();
    if alpha >= 1.0 {
        // Φ_1 is a point mass at 1; callers bypass it through E_1(z) = e^z
        return Err(SpecfunError::Domain { function, value: alpha });
    }
    Ok(alpha)
}

/// Largest `t` (within `[0, 50]`) up to which the alternating series for
/// `Φ_α` keeps its estimated rounding error below `2e-8`.
pub fn wright_phi_reliable_range(order: FractionalOrder, ctl: &SeriesControl) -> Result<f64, SpecfunError> {
    let alpha = require_fractional("wright_phi_reliable_range", order)?;
    let ok = |t: f64| reliable(&phi_series(alpha, t, ctl));
    if ok(SEARCH_LIMIT) {
        return Ok(SEARCH_LIMIT);
    }
    let (mut lo, mut hi) = (0.0, SEARCH_LIMIT);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Wright function `Φ_α(t)` for `0 < α < 1`, `t ≥ 0`, the probability density
/// subordinating the fractional evolution to the classical semigroup.
pub fn wright_phi(order: FractionalOrder, t: f64, ctl: &SeriesControl) -> Result<f64, SpecfunError> {
    let alpha = require_fractional("wright_phi", order)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(SpecfunError::Domain {
            function: "wright_phi",
            value: t,
        });
    }
    let s = phi_series(alpha, t, ctl);
    if !reliable(&s) {
        let t_max = wright_phi_reliable_range(order, ctl)?;
        return Err(SpecfunError::Range { t, t_max });
    }
    Ok(s.value.max(0.0))
}

/// Quadrature estimate of `∫_0^∞ Φ_α(τ) e^{-sτ} dτ`.
///
/// The integral runs over `[0, T]` with `T` the reliable range of the series. The
/// remaining mass `R = 1 - ∫_0^T Φ_α` bounds the tail: it lies in `[0, e^{-sT} R]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplaceEstimate {
    pub value: f64,
    /// Guaranteed bracket, up to quadrature error.
    pub lower: f64,
    pub upper: f64,
    pub quadrature_error: f64,
    pub cutoff: f64,
}

impl LaplaceEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower + self.quadrature_error
    }
}

fn quad_control() -> QuadratureControl {
    QuadratureControl {
        abs_tol: 1e-8,
        rel_tol: 1e-8,
        max_intervals: 500,
    }
}

fn truncated_integral<F: Fn(f64) -> f64>(
    function: &'static str,
    alpha: f64,
    weight: F,
    cutoff: f64,
    ctl: &SeriesControl,
) -> Result<(f64, f64), SpecfunError> {
    let r = integrate(|t| phi_series(alpha, t, ctl).value * weight(t), 0.0, cutoff, quad_control());
    if !r.converged {
        return Err(SpecfunError::Accuracy {
            function,
            partial: r.value,
            error: r.error,
        });
    }
    Ok((r.value, r.error))
}

pub fn wright_laplace_with(order: FractionalOrder, s: f64, ctl: &SeriesControl) -> Result<LaplaceEstimate, SpecfunError> {
    let alpha = require_fractional("wright_laplace", order)?;
    if !(s >= 0.0) || !s.is_finite() {
        return Err(SpecfunError::Domain {
            function: "wright_laplace",
            value: s,
        });
    }
    let cutoff = wright_phi_reliable_range(order, ctl)?;
    let (mass, mass_err) = truncated_integral("wright_laplace", alpha, |_| 1.0, cutoff, ctl)?;
    let (body, body_err) = if s == 0.0 {
        (mass, mass_err)
    } else {
        truncated_integral("wright_laplace", alpha, |t| (-s * t).exp(), cutoff, ctl)?
    };
    let tail_mass = (1.0 - mass).max(0.0);
    // mass above one can only be rounding noise in the series; count it as error
    let excess = (mass - 1.0).max(0.0);
    let upper = body + (-s * cutoff).exp() * tail_mass;
    Ok(LaplaceEstimate {
        value: upper,
        lower: body,
        upper,
        quadrature_error: body_err + mass_err + excess,
        cutoff,
    })
}

/// `∫_0^∞ Φ_α(τ) e^{-sτ} dτ`, an independent oracle for `E_α(-s)`.
pub fn wright_laplace(order: FractionalOrder, s: f64) -> Result<f64, SpecfunError> {
    let est = wright_laplace_with(order, s, &SeriesControl::default())?;
    if est.width() > LAPLACE_TOL {
        return Err(SpecfunError::Accuracy {
            function: "wright_laplace",
            partial: est.value,
            error: est.width(),
        });
    }
    Ok(est.value)
}

/// Moment `∫_0^∞ τ^p Φ_α(τ) dτ`.
///
/// Quadrature over the reliable range `[0, T]` plus `T^p R` for the tail, where
/// `R = 1 - ∫_0^T Φ_α` is the missing mass. Since `τ ≥ T` there, the tail term
/// can only underestimate.
pub fn wright_moment(order: FractionalOrder, p: f64, ctl: &SeriesControl) -> Result<f64, SpecfunError> {
    let alpha = require_fractional("wright_moment", order)?;
    if !(p >= 0.0) || !p.is_finite() {
        return Err(SpecfunError::Domain {
            function: "wright_moment",
            value: p,
        });
    }
    let cutoff = wright_phi_reliable_range(order, ctl)?;
    let (mass, _) = truncated_integral("wright_moment", alpha, |_| 1.0, cutoff, ctl)?;
    let (body, _) = truncated_integral("wright_moment", alpha, |t| t.powf(p), cutoff, ctl)?;
    Ok(body + cutoff.powf(p) * (1.0 - mass).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::ln_gamma_positive;

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    fn gamma_ratio(p: f64, alpha: f64) -> f64 {
        (ln_gamma_positive(p + 1.0) - ln_gamma_positive(alpha * p + 1.0)).exp()
    }

    #[test]
    fn moment_identity() {
        let ctl = SeriesControl::default();
        for a in [0.25, 0.5, 0.75] {
            for p in [0.0, 1.0, 2.0] {
                let m = wright_moment(order(a), p, &ctl).unwrap();
                assert!((m - gamma_ratio(p, a)).abs() < 1e-5, "alpha={a} p={p}: {m}");
            }
        }
    }

    #[test]
    fn truncated_mass_deficit_is_small() {
        let ctl = SeriesControl::default();
        for a in [0.25, 0.5, 0.75] {
            let e = wright_laplace_with(order(a), 0.0, &ctl).unwrap();
            assert!(e.lower <= 1.0 + 1e-7 && e.lower > 1.0 - 1e-5, "alpha={a}: {}", e.lower);
            assert!(e.cutoff > 3.0);
        }
    }

    #[test]
    fn laplace_matches_mittag_leffler() {
        let ctl = SeriesControl::default();
        for a in [0.25, 0.5, 0.75] {
            for i in 0..=10 {
                let s = 0.5 * i as f64;
                let w = wright_laplace(order(a), s).unwrap();
                let e = crate::specfun::mittag_leffler(order(a), 1.0, -s, &ctl).unwrap();
                assert!((w - e).abs() < 1e-6, "alpha={a} s={s}: {w} vs {e}");
            }
        }
    }

    #[test]
    fn half_order_closed_form() {
        let ctl = SeriesControl::default();
        for &t in &[0.0f64, 0.5, 1.0, 2.0, 4.0, 7.0] {
            let expected = (-t * t / 4.0).exp() / PI.sqrt();
            let got = wright_phi(order(0.5), t, &ctl).unwrap();
            let tol = if t <= 2.0 { 1e-13 } else { CANCELLATION_BUDGET };
            assert!((got - expected).abs() < tol, "t={t} {got} {expected}");
        }
    }

    #[test]
    fn value_at_origin() {
        let ctl = SeriesControl::default();
        let v = wright_phi(order(0.25), 0.0, &ctl).unwrap();
        assert!((v - 1.0 / 1.225_416_702_465_177_6).abs() < 1e-13);
    }

    #[test]
    fn reliable_range_shrinks_with_alpha() {
        let ctl = SeriesControl::default();
        let r25 = wright_phi_reliable_range(order(0.25), &ctl).unwrap();
        let r50 = wright_phi_reliable_range(order(0.5), &ctl).unwrap();
        let r75 = wright_phi_reliable_range(order(0.75), &ctl).unwrap();
        assert!(r25 > r50 && r50 > r75, "{r25} {r50} {r75}");
        assert!(r75 > 3.0);
        match wright_phi(order(0.75), r75 + 1.0, &ctl) {
            Err(SpecfunError::Range { t_max, .. }) => assert_eq!(t_max, r75),
            other => panic!("expected range error, got {other:?}"),
        }
    }

    #[test]
    fn classical_order_is_bypassed() {
        let ctl = SeriesControl::default();
        assert!(matches!(wright_phi(order(1.0), 1.0, &ctl), Err(SpecfunError::Domain { .. })));
        assert!(wright_laplace(order(1.0), 1.0).is_err());
    }

    #[test]
    fn normalization() {
        let v = wright_laplace(order(0.5), 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-7);
    }

    #[test]
    fn half_order_laplace_matches_erfc_form() {
        // ∫ e^{-t²/4} e^{-st} / √π dt = e^{s²} erfc(s); at s=1, e·erfc(1)
        let v = wright_laplace(order(0.5), 1.0).unwrap();
        assert!((v - 0.427_583_576_155_807).abs() < 1e-7);
    }
}
