use std::collections::HashMap;
use std::f64::consts::PI;

use fracid_fem::assembly::{assemble_free, element_matrices};
use fracid_fem::mesh::{generate_mesh, Domain, Mesh, Point};
use fracid_core::CoefficientVector;
use proptest::prelude::*;

fn edge_counts(m: &Mesh) -> HashMap<(usize, usize), usize> {
    let mut edges = HashMap::new();
    for t in m.triangles() {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    edges
}

/// Distance from `p` to the boundary curves of the domain.
fn boundary_distance(d: &Domain, p: Point) -> f64 {
    match *d {
        Domain::Rectangle {
            x_min,
            x_max,
            y_min,
            y_max,
        } => (p[0] - x_min).abs().min((x_max - p[0]).abs()).min((p[1] - y_min).abs()).min((y_max - p[1]).abs()),
        Domain::Lshape { half_width: a } => {
            let outer = (p[0] + a).abs().min((a - p[0]).abs()).min((p[1] + a).abs()).min((a - p[1]).abs());
            let notch_x = if p[1] >= 0.0 { p[0].abs() } else { f64::INFINITY };
            let notch_y = if p[0] >= 0.0 { p[1].abs() } else { f64::INFINITY };
            outer.min(notch_x).min(notch_y)
        }
        Domain::DiscWithHole {
            outer_center,
            outer_radius,
            inner_center,
            inner_radius,
        } => {
            let ro = (p[0] - outer_center[0]).hypot(p[1] - outer_center[1]);
            let ri = (p[0] - inner_center[0]).hypot(p[1] - inner_center[1]);
            (ro - outer_radius).abs().min((ri - inner_radius).abs())
        }
    }
}

fn domains() -> Vec<Domain> {
    vec![Domain::square_pi(), Domain::l_shape(), Domain::eccentric_annulus()]
}

fn check_invariants(d: &Domain, h: f64) {
    let m = generate_mesh(d, h).unwrap();
    for t in 0..m.n_triangles() {
        assert!(m.triangle_area(t) > 0.0);
    }
    let edges = edge_counts(&m);
    assert!(edges.values().all(|&c| c == 1 || c == 2));
    for (&(a, b), &c) in &edges {
        if c == 1 {
            assert!(m.is_boundary(a) && m.is_boundary(b));
        }
    }
    assert!(m.max_edge_length() <= 1.5 * h, "{} h={h}: {}", d.id(), m.max_edge_length());
    for (v, &p) in m.vertices().iter().enumerate() {
        let on = boundary_distance(d, p) < 1e-12;
        assert_eq!(m.is_boundary(v), on, "{} vertex {v} at {p:?}", d.id());
    }
    // Euler characteristic: one hole for the annulus, none otherwise
    let holes = if matches!(d, Domain::DiscWithHole { .. }) { 1 } else { 0 };
    let chi = m.n_vertices() as i64 - edges.len() as i64 + m.n_triangles() as i64;
    assert_eq!(chi, 1 - holes);
}

#[test]
fn square_example() {
    let m = generate_mesh(&Domain::square_pi(), PI / 4.0).unwrap();
    assert_eq!((m.n_vertices(), m.n_triangles(), m.n_interior(), m.boundary_vertices().len()), (25, 32, 9, 16));
}

#[test]
fn invariants_at_default_resolution() {
    for d in domains() {
        check_invariants(&d, 0.05);
    }
}

#[test]
fn hole_boundary_radius() {
    let m = generate_mesh(&Domain::eccentric_annulus(), 0.05).unwrap();
    let mut on_hole = 0;
    for &v in m.boundary_vertices() {
        let p = m.vertices()[v];
        let r = (p[0] - 0.2).hypot(p[1] - 0.2);
        if r < 0.5 {
            assert!((r - 0.3).abs() <= 1e-12, "{r}");
            on_hole += 1;
        } else {
            assert!((p[0].hypot(p[1]) - 1.0).abs() <= 1e-12);
        }
    }
    assert!(on_hole >= 8);
}

#[test]
fn areas_converge() {
    for d in domains() {
        let exact = d.area();
        let coarse = (generate_mesh(&d, 0.2).unwrap().area() - exact).abs();
        let fine = (generate_mesh(&d, 0.05).unwrap().area() - exact).abs();
        if matches!(d, Domain::DiscWithHole { .. }) {
            // inscribed polygons: second order in h
            assert!(fine < coarse / 8.0, "{coarse} {fine}");
        } else {
            assert!(fine < 1e-12 && coarse < 1e-12);
        }
    }
}

#[test]
fn symmetric_domains_have_symmetric_meshes() {
    for d in [Domain::l_shape(), Domain::eccentric_annulus()] {
        let m = generate_mesh(&d, 0.05).unwrap();
        let key = |p: Point| ((p[0] * 1e9).round() as i64, (p[1] * 1e9).round() as i64);
        let index: HashMap<_, _> = m.vertices().iter().enumerate().map(|(i, &p)| (key(p), i)).collect();
        let mirror: Vec<usize> = m
            .vertices()
            .iter()
            .map(|p| *index.get(&key([p[1], p[0]])).unwrap_or_else(|| panic!("{} has no mirror of {p:?}", d.id())))
            .collect();
        let mut tris: Vec<[usize; 3]> = m
            .triangles()
            .iter()
            .map(|t| {
                let mut s = *t;
                s.sort_unstable();
                s
            })
            .collect();
        tris.sort_unstable();
        for t in m.triangles() {
            let mut r = [mirror[t[0]], mirror[t[1]], mirror[t[2]]];
            r.sort_unstable();
            assert!(tris.binary_search(&r).is_ok(), "{}: mirrored triangle missing", d.id());
        }
    }
}

#[test]
fn mass_sums_to_area() {
    for d in domains() {
        let m = generate_mesh(&d, 0.1).unwrap();
        let s = assemble_free(&m, &CoefficientVector::ones(2)).unwrap();
        let total: f64 = s.mass.values().iter().sum();
        assert!((total - m.area()).abs() < 1e-12 * m.area());
        // constants lie in the kernel of the unconstrained stiffness
        let mut row_sums = vec![0.0; m.n_vertices()];
        for (i, _, v) in s.stiffness.triplet_iter() {
            row_sums[i] += v;
        }
        assert!(row_sums.iter().all(|r| r.abs() < 1e-12));
    }
}

proptest! {
    #[test]
    fn invariants_for_any_resolution(h in 0.04f64..0.6, which in 0usize..3) {
        check_invariants(&domains()[which], h);
    }

    #[test]
    fn element_identities(p in prop::array::uniform3(prop::array::uniform2(-3.0f64..3.0)), shift in prop::array::uniform2(-10.0f64..10.0)) {
        let area = 0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
        prop_assume!(area > 1e-3);
        let e = element_matrices(p).unwrap();
        let moved = element_matrices(p.map(|q| [q[0] + shift[0], q[1] + shift[1]])).unwrap();
        for i in 0..3 {
            prop_assert!(e.stiffness_x[i].iter().sum::<f64>().abs() < 1e-9 * (1.0 + e.stiffness_x[i][i]));
            prop_assert!(e.stiffness_y[i].iter().sum::<f64>().abs() < 1e-9 * (1.0 + e.stiffness_y[i][i]));
            for j in 0..3 {
                prop_assert_eq!(e.mass[i][j], e.mass[j][i]);
                prop_assert!((e.stiffness_x[i][j] - moved.stiffness_x[i][j]).abs() < 1e-8 * (1.0 + e.stiffness_x[i][i]));
            }
        }
        prop_assert!((e.mass.iter().flatten().sum::<f64>() - area).abs() < 1e-12 * area.max(1.0));
        // a linear function x has ∫|∂_x|² = area
        let xs = [p[0][0], p[1][0], p[2][0]];
        let quad: f64 = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| xs[i] * e.stiffness_x[i][j] * xs[j]).sum();
        prop_assert!((quad - area).abs() < 1e-9 * area.max(1.0));
    }
}
