//! Finite-element counterpart of the spectral model: P1 triangles on planar
//! domains, homogeneous Dirichlet data, and the L1 scheme for the Caputo
//! derivative in time.
//!
//! The solved problem is `∂_t^α u - λ_1 ∂²_x u - λ_2 ∂²_y u = 0` on `Ω`,
//! `u = 0` on `∂Ω`, `u(0) = u_0`.

pub mod assembly;
pub mod cutoff;
pub mod field;
pub mod l1;
pub mod mesh;
pub mod mesh_io;
pub mod norms;

use thiserror::Error;

pub use assembly::{assemble, assemble_free, element_matrices, ElementMatrices, SystemMatrices};
pub use cutoff::{cutoff, cutoff_field, CutoffSpec, InitialCondition};
pub use field::FieldVector;
pub use l1::{l1_evolve, l1_evolve_assembled, l1_weights, L1History};
pub use mesh::{generate_mesh, Domain, Mesh, Point};
pub use norms::{derivative_norms, mass_inner, mass_norm};

#[derive(Debug, Error)]
pub enum FemError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("triangle {index} has signed area {area}; expected a positive value")]
    Orientation { index: usize, area: f64 },
    #[error("invalid mesh: {0}")]
    Topology(String),
    #[error("invalid field: {0}")]
    Field(String),
    #[error("invalid time stepping: {0}")]
    Step(String),
    #[error("expected two diffusion coefficients, got {0}")]
    Coefficients(usize),
    #[error("linear solve failed: {0}")]
    Solver(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
