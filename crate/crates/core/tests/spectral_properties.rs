mod common;

use std::collections::BTreeMap;

use common::{lambda, log_uniform, random_admissible, reference, rng};
use fracid_core::specfun::{gamma, mittag_leffler, wright_laplace};
use fracid_core::spectral::{
    dirichlet_box_modes, evolve, gram_admissibility, image_bound, jacobian, lame_torus_modes, observables,
    observables_and_jacobian, solution_distance, Polarization,
};
use fracid_core::{CoefficientVector, EvalSpec, FractionalOrder, Mode, SeriesControl, SpectralProblem};
use proptest::prelude::*;

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn coefficients(n: usize) -> impl Strategy<Value = CoefficientVector> {
    proptest::collection::vec(-2.3f64..2.3, n).prop_map(|v| lambda(&v.iter().map(|x| x.exp()).collect::<Vec<_>>()))
}

fn problem(n: usize) -> impl Strategy<Value = SpectralProblem> {
    any::<u64>().prop_map(move |seed| random_admissible(&mut rng(seed), n))
}

#[test]
fn reference_instance_is_admissible() {
    let r = gram_admissibility(&reference());
    assert!(r.admissible && r.strictly_positive);
    assert!((r.trace - 2.5).abs() < 1e-14);
    assert!((r.min_eigenvalue - 0.25).abs() < 1e-14);
}

#[test]
fn reference_observables_match_wright_laplace() {
    // F_i = Σ σ c² (∫ Φ_α(t) e^{-μ T̄^α t} dt)² computed from the density instead of the series
    let p = reference();
    let lam = lambda(&[1.0, 2.0]);
    for a in [0.25, 0.5, 0.75] {
        let spec = EvalSpec::new(order(a), 0.04).unwrap();
        let f = observables(&p, &lam, &spec).unwrap();
        let t_alpha = 0.04f64.powf(a);
        let mut expected = [0.0; 2];
        for m in p.modes() {
            let e = wright_laplace(order(a), m.rate(lam.as_slice()) * t_alpha).unwrap();
            for i in 0..2 {
                expected[i] += m.sigma[i] * m.coeff * m.coeff * e * e;
            }
        }
        for i in 0..2 {
            assert!((f.as_slice()[i] - expected[i]).abs() < 1e-5, "alpha={a}");
        }
    }
}

#[test]
fn jacobian_negative_definite_on_log_grid() {
    let mut r = rng(7);
    let grid: Vec<f64> = (0..5).map(|k| 10f64.powf(-1.0 + 0.5 * k as f64)).collect();
    for n in [1, 2, 3] {
        for _ in 0..4 {
            let p = random_admissible(&mut r, n);
            for a in [0.25, 0.5, 0.75, 1.0] {
                let spec = EvalSpec::new(order(a), 0.04).unwrap();
                for idx in 0..grid.len().pow(n as u32) {
                    let mut rest = idx;
                    let lam: Vec<f64> = (0..n)
                        .map(|_| {
                            let g = grid[rest % grid.len()];
                            rest /= grid.len();
                            g
                        })
                        .collect();
                    let j = jacobian(&p, &lambda(&lam), &spec).unwrap();
                    let eig = j.symmetric_eigen().eigenvalues;
                    assert!(eig.iter().all(|e| *e < 0.0), "n={n} alpha={a} lambda={lam:?} eig={eig}");
                }
            }
        }
    }
}

#[test]
fn forward_map_is_injective_on_samples() {
    let mut r = rng(11);
    let p = reference();
    for a in [0.25, 0.5, 0.75, 1.0] {
        let spec = EvalSpec::new(order(a), 0.04).unwrap();
        let mut checked = 0;
        while checked < 100 {
            let x: Vec<f64> = (0..2).map(|_| log_uniform(&mut r, 0.1, 10.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| log_uniform(&mut r, 0.1, 10.0)).collect();
            let gap = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if gap < 1e-3 {
                continue;
            }
            let fx = observables(&p, &lambda(&x), &spec).unwrap();
            let fy = observables(&p, &lambda(&y), &spec).unwrap();
            let diff = fx.as_slice().iter().zip(fy.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(diff > 1e-10, "alpha={a}: {x:?} and {y:?} collide");
            checked += 1;
        }
    }
}

#[test]
fn semigroup_limit() {
    let p = reference();
    let lam = lambda(&[1.0, 2.0]);
    for t in [0.04, 0.5, 1.0] {
        let classical = evolve(&p, &lam, FractionalOrder::ONE, t).unwrap();
        let gaps: Vec<f64> = [0.9, 0.99, 0.999]
            .iter()
            .map(|&a| {
                let u = evolve(&p, &lam, order(a), t).unwrap();
                u.iter().zip(&classical).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            })
            .collect();
        assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "t={t}: {gaps:?}");
    }
}

#[test]
fn box_generator_example() {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(vec![1, 1], 1.0);
    coeffs.insert(vec![2, 1], 0.5);
    let p = dirichlet_box_modes(&[1.0, 2.0], 2, &coeffs).unwrap();
    assert_eq!(p.n(), 2);
    assert_eq!(p.modes().len(), 4);
    let pi2 = std::f64::consts::PI.powi(2);
    let m = p.modes().iter().find(|m| m.coeff == 0.5).unwrap();
    assert!((m.sigma[0] - 4.0 * pi2).abs() < 1e-12);
    assert!((m.sigma[1] - pi2 / 4.0).abs() < 1e-12);
    assert!(gram_admissibility(&p).admissible);
}

#[test]
fn torus_generator_example() {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(([1, 0], Polarization::Longitudinal), 1.0);
    coeffs.insert(([1, 0], Polarization::Transverse), 1.0);
    let p = lame_torus_modes(1, &coeffs).unwrap();
    assert_eq!(p.modes().len(), 16);
    let r = gram_admissibility(&p);
    assert!(r.admissible);
    assert!(!r.strictly_positive);
    let only_t: BTreeMap<_, _> = [(([0, 1], Polarization::Transverse), 1.0)].into_iter().collect();
    assert!(!gram_admissibility(&lame_torus_modes(1, &only_t).unwrap()).admissible);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solution_contracts(p in problem(2), lam in coefficients(2), a in 0.1f64..=1.0, t in 0.0f64..5.0) {
        let u = evolve(&p, &lam, order(a), t).unwrap();
        let norm: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(norm <= p.initial_norm() * (1.0 + 1e-12));
        for (x, m) in u.iter().zip(p.modes()) {
            prop_assert!(x.abs() <= m.coeff.abs() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn classical_decay_rate(p in problem(2), lam in coefficients(2), t in 0.0f64..5.0) {
        let gap = p.modes().iter().map(|m| m.rate(lam.as_slice())).fold(f64::INFINITY, f64::min);
        let u = evolve(&p, &lam, FractionalOrder::ONE, t).unwrap();
        let norm: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!(norm <= (-gap * t).exp() * p.initial_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn observables_within_image_bound(p in problem(3), lam in coefficients(3), a in 0.1f64..=1.0, t in 0.001f64..2.0) {
        let f = observables(&p, &lam, &EvalSpec::new(order(a), t).unwrap()).unwrap();
        prop_assert!(f.as_slice().iter().all(|v| *v >= 0.0));
        prop_assert!(f.norm() <= image_bound(&p) * (1.0 + 1e-12));
    }

    #[test]
    fn jacobian_symmetric_and_matches_differences(p in problem(2), lam in coefficients(2), a in prop::sample::select(vec![0.25, 0.5, 0.75, 1.0])) {
        let spec = EvalSpec::new(order(a), 0.04).unwrap();
        let (_, j) = observables_and_jacobian(&p, &lam, &spec).unwrap();
        prop_assert_eq!(j[(0, 1)], j[(1, 0)]);
        let scale = j.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for k in 0..2 {
            let h = 1e-6 * lam.as_slice()[k];
            let shift = |d: f64| {
                let mut v = lam.as_slice().to_vec();
                v[k] += d;
                observables(&p, &lambda(&v), &spec).unwrap()
            };
            let (up, down) = (shift(h), shift(-h));
            for i in 0..2 {
                let fd = (up.as_slice()[i] - down.as_slice()[i]) / (2.0 * h);
                prop_assert!((fd - j[(i, k)]).abs() <= 1e-6 * scale, "i={} k={} fd={} j={}", i, k, fd, j[(i, k)]);
            }
        }
    }

    #[test]
    fn lipschitz_in_lambda(p in problem(2), x in coefficients(2), y in coefficients(2), a in 0.1f64..=1.0, t in 0.0f64..2.0) {
        let d = solution_distance(&p, &x, &y, order(a), t).unwrap();
        let dl = x.as_slice().iter().zip(y.as_slice()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let bound = gamma(2.0).unwrap() / gamma(1.0 + a).unwrap() * t.powf(a) * p.graph_norm() * dl;
        prop_assert!(d <= bound * (1.0 + 1e-10) + 1e-14);
    }

    #[test]
    fn single_mode_is_scaled_mittag_leffler(sigma in 0.1f64..5.0, c in -2.0f64..2.0, l in 0.1f64..10.0, a in 0.1f64..=1.0, t in 0.0f64..2.0) {
        let p = SpectralProblem::new(1, vec![Mode::new(vec![sigma], c)]).unwrap();
        let u = evolve(&p, &lambda(&[l]), order(a), t).unwrap();
        let e = mittag_leffler(order(a), 1.0, -sigma * l * t.powf(a), &SeriesControl::default()).unwrap();
        prop_assert!((u[0] - c * e).abs() <= 1e-15 * c.abs().max(1.0));
    }
}
