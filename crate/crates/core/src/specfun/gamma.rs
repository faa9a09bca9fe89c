// Lanczos approximation, coefficients from Pugh (2004), "An Analysis of the
// Lanczos Gamma Approximation", g = 10.900511, n = 11.

use std::f64::consts::PI;

use super::SpecfunError;

const LANCZOS_G: f64 = 10.900511;

const LANCZOS_COEFFS: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

/// `2 sqrt(e / π)`
const TWO_SQRT_E_OVER_PI: f64 = 1.860_382_734_205_265_7;
/// `ln(2 sqrt(e / π))`
const LN_TWO_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS_COEFFS
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_COEFFS[0], |s, (i, &c)| s + c / (x + i as f64 - 1.0))
}

/// `sin(πx)`, exact zero at the integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    // reduce to r in [-1, 1], sin(πx) = sin(πr)
    let r = x - 2.0 * (x / 2.0).round();
    if r == 0.0 || r.abs() == 1.0 {
        return 0.0;
    }
    let (sign, r) = if r < 0.0 { (-1.0, -r) } else { (1.0, r) };
    let r = if r > 0.5 { 1.0 - r } else { r };
    sign * (PI * r).sin()
}

pub(crate) fn gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        PI / (sin_pi(x) * gamma_positive(1.0 - x))
    } else {
        lanczos_sum(x) * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_G) / std::f64::consts::E).powf(x - 0.5)
    }
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecfunError::Domain {
            function: "gamma",
            value: x,
        });
    }
    if x == x.floor() && x <= 171.0 {
        return Ok(factorial(x));
    }
    Ok(gamma_positive(x))
}

/// `(x - 1)!` for a positive integer `x`, exact up to `x = 23`.
fn factorial(x: f64) -> f64 {
    let mut f = 1.0;
    let mut k = 2.0;
    while k < x {
        f *= k;
        k += 1.0;
    }
    f
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64, SpecfunError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecfunError::Domain {
            function: "ln_gamma",
            value: x,
        });
    }
    Ok(ln_gamma_positive(x))
}

pub(crate) fn ln_gamma_positive(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = π / (sin(πx) Γ(1 - x)), with sin(πx) > 0 on (0, 0.5)
        PI.ln() - sin_pi(x).ln() - ln_gamma_positive(1.0 - x)
    } else {
        lanczos_sum(x).ln()
            + LN_TWO_SQRT_E_OVER_PI
            + (x - 0.5) * ((x - 0.5 + LANCZOS_G) / std::f64::consts::E).ln()
    }
}

/// Reciprocal Gamma `1/Γ(x)`, an entire function: zero at the poles `0, -1, -2, ...`.
pub fn rgamma(x: f64) -> f64 {
    if x > 0.0 && x == x.floor() && x <= 171.0 {
        return 1.0 / factorial(x);
    }
    match ln_abs_rgamma(x) {
        None => 0.0,
        Some((ln_mag, sign)) => sign * ln_mag.exp(),
    }
}

/// `(ln|1/Γ(x)|, sign(1/Γ(x)))`, or `None` at a pole of Γ.
pub(crate) fn ln_abs_rgamma(x: f64) -> Option<(f64, f64)> {
    if x > 0.0 {
        return Some((-ln_gamma_positive(x), 1.0));
    }
    // 1/Γ(x) = Γ(1 - x) sin(πx) / π
    let s = sin_pi(x);
    if s == 0.0 {
        return None;
    }
    Some((ln_gamma_positive(1.0 - x) + s.abs().ln() - PI.ln(), s.signum()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(4.0).unwrap(), 6.0);
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(1.5).unwrap(), PI.sqrt() / 2.0) < 1e-14);
        assert!(rel(gamma(10.0).unwrap(), 362_880.0) < 1e-15);
        // Γ(1/3), Γ(0.1) reference values
        assert!(rel(gamma(1.0 / 3.0).unwrap(), 2.678_938_534_707_747_6) < 1e-13);
        assert!(rel(gamma(0.1).unwrap(), 9.513_507_698_668_732) < 1e-13);
        assert!(rel(gamma(0.75).unwrap(), 1.225_416_702_465_177_6) < 1e-13);
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(matches!(gamma(0.0), Err(SpecfunError::Domain { .. })));
        assert!(gamma(-1.5).is_err());
        assert!(ln_gamma(-0.1).is_err());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.05, 0.3, 0.5, 1.7, 3.25, 12.5, 60.0] {
            let g = gamma(x).unwrap();
            assert!((ln_gamma(x).unwrap() - g.ln()).abs() < 1e-13 * g.ln().abs().max(1.0));
        }
        // ln Γ(200) = ln(199!)
        let ln_fact: f64 = (2..200).map(|k| (k as f64).ln()).sum();
        assert!(rel(ln_gamma(200.0).unwrap(), ln_fact) < 1e-14);
    }

    #[test]
    fn reciprocal_gamma_on_negative_axis() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        // Γ(-0.5) = -2 sqrt(π), Γ(-1.5) = 4 sqrt(π) / 3
        assert!(rel(rgamma(-0.5), -1.0 / (2.0 * PI.sqrt())) < 1e-14);
        assert!(rel(rgamma(-1.5), 3.0 / (4.0 * PI.sqrt())) < 1e-14);
        assert!(rel(rgamma(0.5), 1.0 / PI.sqrt()) < 1e-14);
    }

    #[test]
    fn sin_pi_reduction() {
        assert_eq!(sin_pi(5.0), 0.0);
        assert_eq!(sin_pi(-2.0), 0.0);
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(-1.5) - 1.0).abs() < 1e-16);
        assert!((sin_pi(2.25) - (PI * 0.25).sin()).abs() < 1e-15);
    }
}
