use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::SpectralProblem;

/// Relative threshold on the smallest Gram eigenvalue.
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    /// `G_ij = <A_i u_0, A_j u_0>`
    pub gram: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// `min_eigenvalue > 1e-12 · trace`
    pub admissible: bool,
    /// False when some operator has a zero eigenvalue on a populated mode, i.e.
    /// it is not strictly positive on the span of the initial datum.
    pub strictly_positive: bool,
}

pub fn gram_admissibility(problem: &SpectralProblem) -> AdmissibilityReport {
    let n = problem.n();
    let mut g = DMatrix::<f64>::zeros(n, n);
    for m in problem.active_modes() {
        let c2 = m.coeff * m.coeff;
        for i in 0..n {
            for j in 0..n {
                g[(i, j)] += m.sigma[i] * m.sigma[j] * c2;
            }
        }
    }
    let trace = g.trace();
    let min_eigenvalue = g.clone().symmetric_eigenvalues().min();
    let strictly_positive = problem.active_modes().all(|m| m.sigma.iter().all(|s| *s > 0.0));
    AdmissibilityReport {
        gram: g.row_iter().map(|r| r.iter().copied().collect()).collect(),
        min_eigenvalue,
        trace,
        admissible: trace > 0.0 && min_eigenvalue > ADMISSIBILITY_TOL * trace,
        strictly_positive,
    }
}
