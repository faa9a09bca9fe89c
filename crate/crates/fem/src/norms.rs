use nalgebra_sparse::CscMatrix;

use crate::assembly::{barycentric_gradients, mul};
use crate::mesh::Mesh;

/// `(‖∂_x u‖_{L²}, ‖∂_y u‖_{L²})` of the P1 function with nodal values `u`.
/// Gradients are constant on each triangle.
pub fn derivative_norms(mesh: &Mesh, u: &[f64]) -> (f64, f64) {
    assert_eq!(u.len(), mesh.n_vertices(), "one value per vertex");
    let (mut sx, mut sy) = (0.0, 0.0);
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let area = mesh.triangle_area(t);
        let g = barycentric_gradients(mesh.corners(t), area);
        let (mut gx, mut gy) = (0.0, 0.0);
        for k in 0..3 {
            gx += u[tri[k]] * g[k][0];
            gy += u[tri[k]] * g[k][1];
        }
        sx += area * gx * gx;
        sy += area * gy * gy;
    }
    (sx.sqrt(), sy.sqrt())
}

/// `uᵀ M v`
pub fn mass_inner(mass: &CscMatrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    mul(mass, v).iter().zip(u).map(|(a, b)| a * b).sum()
}

/// `√(uᵀ M u)`
pub fn mass_norm(mass: &CscMatrix<f64>, u: &[f64]) -> f64 {
    mass_inner(mass, u, u).max(0.0).sqrt()
}
