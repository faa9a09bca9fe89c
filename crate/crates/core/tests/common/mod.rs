#![allow(dead_code)]

use fracid_core::spectral::{gram_admissibility, observables};
use fracid_core::{CoefficientVector, EvalSpec, Mode, Observables, SpectralProblem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Random problem of dimension `n` whose smallest Gram eigenvalue is at least 5% of the trace.
pub fn random_admissible(rng: &mut ChaCha8Rng, n: usize) -> SpectralProblem {
    loop {
        let count = rng.random_range(n..=n + 3);
        let modes = (0..count)
            .map(|_| {
                let sigma = (0..n).map(|_| rng.random_range(0.1..4.0)).collect();
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                Mode::new(sigma, sign * rng.random_range(0.3..1.5))
            })
            .collect();
        let p = SpectralProblem::new(n, modes).unwrap();
        let r = gram_admissibility(&p);
        if r.min_eigenvalue >= 0.05 * r.trace {
            return p;
        }
    }
}

pub fn reference() -> SpectralProblem {
    SpectralProblem::new(2, vec![Mode::new(vec![1.0, 0.5], 1.0), Mode::new(vec![0.5, 1.0], 1.0)]).unwrap()
}

pub fn lambda(v: &[f64]) -> CoefficientVector {
    CoefficientVector::new(v.to_vec()).unwrap()
}

pub fn target(p: &SpectralProblem, lam: &CoefficientVector, spec: &EvalSpec) -> Observables {
    Observables::new(observables(p, lam, spec).unwrap().into()).unwrap()
}
