use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Mode, SpectralError, SpectralProblem};

/// Product domain `Π (0, L_i)` with `A_i = -∂²/∂x_i²` and Dirichlet data.
///
/// Multi-index `k ∈ {1..max_index}ⁿ` gives `σ_i = (k_i π / L_i)²`. Every index in
/// range becomes a mode; those absent from `initial_coeffs` get coefficient 0.
pub fn dirichlet_box_modes(
    lengths: &[f64],
    max_index: usize,
    initial_coeffs: &BTreeMap<Vec<usize>, f64>,
) -> Result<SpectralProblem, SpectralError> {
    let n = lengths.len();
    if n == 0 {
        return Err(SpectralError::ZeroDimension);
    }
    if lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(SpectralError::Input("box lengths must be positive".into()));
    }
    if max_index == 0 {
        return Err(SpectralError::Input("max_index must be at least 1".into()));
    }
    for k in initial_coeffs.keys() {
        if k.len() != n || k.iter().any(|&ki| ki == 0 || ki > max_index) {
            return Err(SpectralError::Input(format!(
                "multi-index {k:?} outside {{1..{max_index}}}^{n}"
            )));
        }
    }
    let count = max_index
        .checked_pow(n as u32)
        .ok_or_else(|| SpectralError::Input("too many modes".into()))?;
    let mut modes = Vec::with_capacity(count);
    let mut index = vec![1usize; n];
    for _ in 0..count {
        let sigma = index
            .iter()
            .zip(lengths)
            .map(|(&k, &l)| (k as f64 * PI / l).powi(2))
            .collect();
        let coeff = initial_coeffs.get(&index).copied().unwrap_or(0.0);
        modes.push(Mode::new(sigma, coeff));
        // odometer, last index fastest
        for d in (0..n).rev() {
            if index[d] < max_index {
                index[d] += 1;
                break;
            }
            index[d] = 1;
        }
    }
    SpectralProblem::new(n, modes)
}

pub type Wavevector = [i64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Displacement parallel to `k` (curl-free).
    Longitudinal,
    /// Displacement orthogonal to `k` (divergence-free).
    Transverse,
}

/// Isotropic elasticity on the `2π`-periodic torus, split as
/// `-∇·τ = (λ+μ) A + μ B` with `A = -∇(∇·)`, `B = -Δ`.
///
/// Plane waves with wavevector `k` diagonalize both: longitudinal ones give
/// `σ = (|k|², |k|²)`, transverse ones `σ = (0, |k|²)`. The unknowns are
/// `λ_1 = λ + μ` and `λ_2 = μ`.
pub fn lame_torus_modes(
    max_index: i64,
    initial_coeffs: &BTreeMap<(Wavevector, Polarization), f64>,
) -> Result<SpectralProblem, SpectralError> {
    if max_index < 1 {
        return Err(SpectralError::Input("max_index must be at least 1".into()));
    }
    for (k, _) in initial_coeffs.keys() {
        if *k == [0, 0] {
            return Err(SpectralError::Input(
                "zero wavevector: constant displacements lie in the kernel of both operators".into(),
            ));
        }
        if k[0].abs() > max_index || k[1].abs() > max_index {
            return Err(SpectralError::Input(format!("wavevector {k:?} exceeds max_index {max_index}")));
        }
    }
    let mut modes = Vec::new();
    for k1 in -max_index..=max_index {
        for k2 in -max_index..=max_index {
            if k1 == 0 && k2 == 0 {
                continue;
            }
            let k2norm = (k1 * k1 + k2 * k2) as f64;
            for pol in [Polarization::Longitudinal, Polarization::Transverse] {
                let sigma = match pol {
                    Polarization::Longitudinal => vec![k2norm, k2norm],
                    Polarization::Transverse => vec![0.0, k2norm],
                };
                let coeff = initial_coeffs.get(&([k1, k2], pol)).copied().unwrap_or(0.0);
                modes.push(Mode::new(sigma, coeff));
            }
        }
    }
    SpectralProblem::new(2, modes)
}
