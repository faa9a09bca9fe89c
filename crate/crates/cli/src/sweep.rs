use std::time::Instant;

use fracid_core::{CoefficientVector, FractionalOrder};
use fracid_fem::{assemble, cutoff_field, derivative_norms, generate_mesh, l1_evolve_assembled, FieldVector, Mesh};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::records::SweepRecord;
use crate::CliError;

/// Runs one L1 simulation per `(α, λ₁, λ₂)` in parallel.
///
/// Records come back in the order α, then λ₁, then λ₂, whatever the completion
/// order. A failed simulation yields a flagged record; it does not stop the sweep.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRecord>, CliError> {
    config.validate()?;
    let domain = config.domain()?;
    let mesh = generate_mesh(&domain, config.target_h)?;
    let u0 = cutoff_field(&mesh, &config.initial.spec());
    let axis = config.lambda_grid.values();
    let mut tasks = Vec::with_capacity(config.alphas.len() * axis.len() * axis.len());
    for &a in &config.alphas {
        for &l1 in &axis {
            for &l2 in &axis {
                tasks.push((a, l1, l2));
            }
        }
    }
    let records = tasks
        .par_iter()
        .map(|&(alpha, l1, l2)| {
            let start = Instant::now();
            let result = simulate(&mesh, &u0, alpha, [l1, l2], config.dt, config.t_end);
            let (norms, error) = match result {
                Ok((x, y)) => ((Some(x), Some(y)), None),
                Err(e) => ((None, None), Some(e.to_string())),
            };
            SweepRecord {
                domain: domain.id().to_string(),
                initial: config.initial.id().to_string(),
                alpha,
                lambda1: l1,
                lambda2: l2,
                norm_x: norms.0,
                norm_y: norms.1,
                wall_time_seconds: start.elapsed().as_secs_f64(),
                error,
            }
        })
        .collect();
    Ok(records)
}

/// `(‖u_x‖, ‖u_y‖)` at `t_end`.
pub fn simulate(mesh: &Mesh, u0: &FieldVector, alpha: f64, lambda: [f64; 2], dt: f64, t_end: f64) -> Result<(f64, f64), CliError> {
    let order = FractionalOrder::new(alpha).map_err(fracid_core::SpectralError::from)?;
    let system = assemble(mesh, &CoefficientVector::new(lambda.to_vec())?)?;
    let (u, _) = l1_evolve_assembled(&system, order, u0, dt, t_end)?;
    Ok(derivative_norms(mesh, u.as_slice()))
}
