use nalgebra::DMatrix;
use nalgebra_sparse::factorization::CscCholesky;
use nalgebra_sparse::{CooMatrix, CscMatrix};
use serde::{Deserialize, Serialize};

use fracid_core::specfun::gamma;
use fracid_core::{CoefficientVector, FractionalOrder};

use crate::assembly::{assemble, mul, SystemMatrices};
use crate::field::FieldVector;
use crate::mesh::Mesh;
use crate::FemError;

/// `b_j = (j+1)^{1-α} - j^{1-α}` for `j < count`, with `b_0 = 1`.
pub fn l1_weights(order: FractionalOrder, count: usize) -> Vec<f64> {
    let e = 1.0 - order.value();
    (0..count)
        .map(|j| if j == 0 { 1.0 } else { ((j + 1) as f64).powf(e) - (j as f64).powf(e) })
        .collect()
}

/// Every time level of an L1 run, `u⁰` first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L1History {
    pub order: FractionalOrder,
    pub dt: f64,
    pub snapshots: Vec<FieldVector>,
    pub weights: Vec<f64>,
}

fn step_count(dt: f64, t_end: f64) -> Result<usize, FemError> {
    if !(dt > 0.0 && dt.is_finite() && t_end.is_finite() && t_end >= dt) {
        return Err(FemError::Step(format!("need 0 < dt <= t_end, got dt = {dt}, t_end = {t_end}")));
    }
    let ratio = t_end / dt;
    let steps = ratio.round();
    if (ratio - steps).abs() > 1e-9 * ratio {
        return Err(FemError::Step(format!("t_end = {t_end} is not a multiple of dt = {dt}")));
    }
    Ok(steps as usize)
}

/// `sa·A + sb·B`
fn combine(a: &CscMatrix<f64>, sa: f64, b: &CscMatrix<f64>, sb: f64) -> CscMatrix<f64> {
    let mut coo = CooMatrix::new(a.nrows(), a.ncols());
    for (i, j, v) in a.triplet_iter() {
        coo.push(i, j, sa * v);
    }
    for (i, j, v) in b.triplet_iter() {
        coo.push(i, j, sb * v);
    }
    CscMatrix::from(&coo)
}

/// L1 scheme on assembled (Dirichlet-constrained) matrices. Step `m` solves
///
/// `(c M + K) u^m = c M (u^{m-1} - Σ_{j=1}^{m-1} b_j (u^{m-j} - u^{m-j-1}))`,
/// `c = dt^{-α} / Γ(2-α)`,
///
/// with one Cholesky factorization shared by all steps.
pub fn l1_evolve_assembled(
    system: &SystemMatrices,
    order: FractionalOrder,
    u0: &FieldVector,
    dt: f64,
    t_end: f64,
) -> Result<(FieldVector, L1History), FemError> {
    let n = system.mass.nrows();
    if u0.len() != n {
        return Err(FemError::Field(format!("initial field has {} values, system has {n}", u0.len())));
    }
    let steps = step_count(dt, t_end)?;
    let alpha = order.value();
    let c = dt.powf(-alpha) / gamma(2.0 - alpha).expect("2 - α lies in [1, 2)");
    let weights = l1_weights(order, steps);
    let chol = CscCholesky::factor(&combine(&system.mass, c, &system.stiffness, 1.0))
        .map_err(|e| FemError::Solver(e.to_string()))?;
    // rows that are identity in both matrices belong to constrained vertices
    let fixed: Vec<bool> = (0..n)
        .map(|i| {
            let row = system.mass.col(i);
            row.nnz() == 1 && row.row_indices()[0] == i && row.values()[0] == 1.0
        })
        .collect();

    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
    levels.push(u0.as_slice().to_vec());
    for m in 1..=steps {
        let mut w = levels[m - 1].clone();
        for (j, &b) in weights.iter().enumerate().take(m).skip(1) {
            if b == 0.0 {
                continue;
            }
            let (newer, older) = (&levels[m - j], &levels[m - j - 1]);
            for ((wi, a), p) in w.iter_mut().zip(newer).zip(older) {
                *wi -= b * (a - p);
            }
        }
        let rhs: Vec<f64> = mul(&system.mass, &w).into_iter().map(|v| c * v).collect();
        let sol = chol.solve(&DMatrix::from_column_slice(n, 1, &rhs));
        let mut u: Vec<f64> = sol.column(0).iter().copied().collect();
        for (ui, &f) in u.iter_mut().zip(&fixed) {
            if f {
                *ui = 0.0;
            }
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(FemError::Solver(format!("non-finite solution at step {m}")));
        }
        levels.push(u);
    }
    let snapshots: Vec<FieldVector> = levels.into_iter().map(FieldVector::from_solution).collect();
    let last = snapshots.last().expect("at least u⁰").clone();
    Ok((
        last,
        L1History {
            order,
            dt,
            snapshots,
            weights,
        },
    ))
}

/// Assembles the system for `λ` and runs the L1 scheme up to `t_end`.
pub fn l1_evolve(
    mesh: &Mesh,
    lambda: &CoefficientVector,
    order: FractionalOrder,
    u0: &FieldVector,
    dt: f64,
    t_end: f64,
) -> Result<(FieldVector, L1History), FemError> {
    if u0.len() != mesh.n_vertices() {
        return Err(FemError::Field(format!(
            "initial field has {} values, mesh has {} vertices",
            u0.len(),
            mesh.n_vertices()
        )));
    }
    let system = assemble(mesh, lambda)?;
    l1_evolve_assembled(&system, order, u0, dt, t_end)
}
