use serde::{Deserialize, Serialize};

use crate::mesh::{Mesh, Point};
use crate::FemError;

/// Nodal values of a P1 function that vanishes on `∂Ω`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldVector(Vec<f64>);

impl FieldVector {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Result<Self, FemError> {
        if values.len() != mesh.n_vertices() {
            return Err(FemError::Field(format!(
                "{} values for {} vertices",
                values.len(),
                mesh.n_vertices()
            )));
        }
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(FemError::Field(format!("value at vertex {v} is not finite")));
        }
        if let Some(&v) = mesh.boundary_vertices().iter().find(|&&v| values[v] != 0.0) {
            return Err(FemError::Field(format!("boundary vertex {v} carries {}", values[v])));
        }
        Ok(Self(values))
    }

    pub fn zeros(mesh: &Mesh) -> Self {
        Self(vec![0.0; mesh.n_vertices()])
    }

    /// Nodal interpolant of `f`, set to zero on boundary vertices.
    pub fn interpolate(mesh: &Mesh, f: impl Fn(Point) -> f64) -> Self {
        Self(
            mesh.vertices()
                .iter()
                .enumerate()
                .map(|(v, &p)| if mesh.is_boundary(v) { 0.0 } else { f(p) })
                .collect(),
        )
    }

    pub(crate) fn from_solution(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl AsRef<[f64]> for FieldVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
