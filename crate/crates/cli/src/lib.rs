//! Experiment runner on top of `fracid-core` and `fracid-fem`: FEM parameter
//! sweeps over `(α, λ₁, λ₂)`, map plots of the resulting derivative norms, a
//! grid-topology check on those maps, and file/flag handling for the inverse
//! solver commands.

pub mod config;
pub mod plot;
pub mod problem;
pub mod records;
pub mod sweep;
pub mod topology;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("invalid records: {0}")]
    Records(String),
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error(transparent)]
    Fem(#[from] fracid_fem::FemError),
    #[error(transparent)]
    Spectral(#[from] fracid_core::SpectralError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
