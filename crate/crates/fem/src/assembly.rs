use nalgebra_sparse::{CooMatrix, CscMatrix};

use fracid_core::CoefficientVector;

use crate::mesh::{signed_area, Mesh, Point};
use crate::FemError;

/// P1 element matrices of an affine triangle, split by derivative direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementMatrices {
    /// `∫ ∂_x φ_i ∂_x φ_j`
    pub stiffness_x: [[f64; 3]; 3],
    /// `∫ ∂_y φ_i ∂_y φ_j`
    pub stiffness_y: [[f64; 3]; 3],
    /// `∫ φ_i φ_j`
    pub mass: [[f64; 3]; 3],
}

/// Exact integrals for the three hat functions on a counter-clockwise triangle.
pub fn element_matrices(p: [Point; 3]) -> Result<ElementMatrices, FemError> {
    let area = signed_area(p);
    if !(area > 0.0) {
        return Err(FemError::Orientation { index: 0, area });
    }
    let grad = barycentric_gradients(p, area);
    let mut out = ElementMatrices {
        stiffness_x: [[0.0; 3]; 3],
        stiffness_y: [[0.0; 3]; 3],
        mass: [[0.0; 3]; 3],
    };
    for i in 0..3 {
        for j in 0..3 {
            out.stiffness_x[i][j] = area * grad[i][0] * grad[j][0];
            out.stiffness_y[i][j] = area * grad[i][1] * grad[j][1];
            out.mass[i][j] = area / if i == j { 6.0 } else { 12.0 };
        }
    }
    Ok(out)
}

pub(crate) fn barycentric_gradients(p: [Point; 3], area: f64) -> [[f64; 2]; 3] {
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        g[i] = [(p[j][1] - p[k][1]) / (2.0 * area), (p[k][0] - p[j][0]) / (2.0 * area)];
    }
    g
}

/// Global stiffness `K(λ) = λ_1 K_x + λ_2 K_y` and mass `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMatrices {
    pub stiffness: CscMatrix<f64>,
    pub mass: CscMatrix<f64>,
}

fn check_lambda(lambda: &CoefficientVector) -> Result<(f64, f64), FemError> {
    match lambda.as_slice() {
        &[l1, l2] => Ok((l1, l2)),
        other => Err(FemError::Coefficients(other.len())),
    }
}

fn assemble_with(
    mesh: &Mesh,
    lambda: &CoefficientVector,
    constrained: bool,
) -> Result<SystemMatrices, FemError> {
    let (l1, l2) = check_lambda(lambda)?;
    let n = mesh.n_vertices();
    let mut k = CooMatrix::new(n, n);
    let mut m = CooMatrix::new(n, n);
    for (index, t) in mesh.triangles().iter().enumerate() {
        let e = element_matrices(mesh.corners(index)).map_err(|err| match err {
            FemError::Orientation { area, .. } => FemError::Orientation { index, area },
            other => other,
        })?;
        for i in 0..3 {
            for j in 0..3 {
                let (r, c) = (t[i], t[j]);
                if constrained && (mesh.is_boundary(r) || mesh.is_boundary(c)) {
                    continue;
                }
                k.push(r, c, l1 * e.stiffness_x[i][j] + l2 * e.stiffness_y[i][j]);
                m.push(r, c, e.mass[i][j]);
            }
        }
    }
    if constrained {
        for &v in mesh.boundary_vertices() {
            k.push(v, v, 1.0);
            m.push(v, v, 1.0);
        }
    }
    Ok(SystemMatrices {
        stiffness: CscMatrix::from(&k),
        mass: CscMatrix::from(&m),
    })
}

/// Matrices with the Dirichlet condition built in: rows and columns of
/// boundary vertices are replaced by those of the identity, in both matrices.
pub fn assemble(mesh: &Mesh, lambda: &CoefficientVector) -> Result<SystemMatrices, FemError> {
    assemble_with(mesh, lambda, true)
}

/// Matrices of the bilinear forms on the full P1 space, without constraints.
pub fn assemble_free(mesh: &Mesh, lambda: &CoefficientVector) -> Result<SystemMatrices, FemError> {
    assemble_with(mesh, lambda, false)
}

/// `y = A x` for a sparse matrix.
pub(crate) fn mul(a: &CscMatrix<f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    for (col, lane) in a.col_iter().enumerate() {
        let xc = x[col];
        if xc == 0.0 {
            continue;
        }
        for (&row, &v) in lane.row_indices().iter().zip(lane.values()) {
            y[row] += v * xc;
        }
    }
    y
}
