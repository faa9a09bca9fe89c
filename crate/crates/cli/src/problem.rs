use std::collections::BTreeMap;
use std::path::Path;

use fracid_core::spectral::{dirichlet_box_modes, lame_torus_modes, Polarization, Wavevector};
use fracid_core::{Mode, SpectralProblem};

use crate::CliError;

/// Two modes `σ = (1, ½)` and `(½, 1)` with unit coefficients.
pub fn reference_problem() -> SpectralProblem {
    SpectralProblem::new(2, vec![Mode::new(vec![1.0, 0.5], 1.0), Mode::new(vec![0.5, 1.0], 1.0)]).expect("valid constant problem")
}

pub fn read_problem(path: &Path) -> Result<SpectralProblem, CliError> {
    let text = std::fs::read_to_string(path)?;
    Ok(SpectralProblem::from_json(&text)?)
}

fn bad(s: &str, why: &str) -> CliError {
    CliError::Problem(format!("mode {s:?}: {why}"))
}

fn split_coeff(s: &str) -> Result<(&str, f64), CliError> {
    let (key, c) = s.split_once('=').ok_or_else(|| bad(s, "expected KEY=COEFF"))?;
    let c: f64 = c.trim().parse().map_err(|_| bad(s, "coefficient is not a number"))?;
    Ok((key, c))
}

/// `"k1,k2,…=c"`: a box multi-index and its coefficient.
pub fn parse_box_mode(s: &str) -> Result<(Vec<usize>, f64), CliError> {
    let (key, c) = split_coeff(s)?;
    let index = key
        .split(',')
        .map(|k| k.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad(s, "indices must be positive integers"))?;
    Ok((index, c))
}

/// `"k1,k2:l=c"` or `"k1,k2:t=c"`: a torus wavevector, its polarization and coefficient.
pub fn parse_torus_mode(s: &str) -> Result<((Wavevector, Polarization), f64), CliError> {
    let (key, c) = split_coeff(s)?;
    let (k, pol) = key.split_once(':').ok_or_else(|| bad(s, "expected K1,K2:l or K1,K2:t"))?;
    let pol = match pol.trim() {
        "l" => Polarization::Longitudinal,
        "t" => Polarization::Transverse,
        _ => return Err(bad(s, "polarization must be l or t")),
    };
    let k: Vec<i64> = k
        .split(',')
        .map(|v| v.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad(s, "wavevector components must be integers"))?;
    let k: Wavevector = k.try_into().map_err(|_| bad(s, "wavevector needs two components"))?;
    Ok(((k, pol), c))
}

pub fn box_problem(lengths: &[f64], max_index: usize, modes: &[String]) -> Result<SpectralProblem, CliError> {
    let coeffs = modes.iter().map(|m| parse_box_mode(m)).collect::<Result<BTreeMap<_, _>, _>>()?;
    Ok(dirichlet_box_modes(lengths, max_index, &coeffs)?)
}

pub fn torus_problem(max_index: i64, modes: &[String]) -> Result<SpectralProblem, CliError> {
    let coeffs = modes.iter().map(|m| parse_torus_mode(m)).collect::<Result<BTreeMap<_, _>, _>>()?;
    Ok(lame_torus_modes(max_index, &coeffs)?)
}
