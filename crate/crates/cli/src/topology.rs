use serde::Serialize;

use crate::records::{grids, AlphaGrid, SweepRecord};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaTopology {
    pub alpha: f64,
    pub cells: usize,
    /// Cells whose orientation differs from the majority, degenerate ones included.
    pub flipped_cells: usize,
    /// Crossing pairs of non-adjacent segments of the mapped grid outline.
    pub boundary_self_intersections: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyReport {
    pub per_alpha: Vec<AlphaTopology>,
    pub pass: bool,
}

/// Checks that the λ-grid keeps its cell structure under the map to derivative norms.
pub fn grid_topology_check(records: &[SweepRecord]) -> Result<TopologyReport, CliError> {
    let per_alpha: Vec<AlphaTopology> = grids(records)?.iter().map(check_grid).collect();
    let pass = per_alpha.iter().all(|a| a.flipped_cells == 0 && a.boundary_self_intersections == 0);
    Ok(TopologyReport { per_alpha, pass })
}

/// Shoelace formula, counter-clockwise positive.
pub fn signed_area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    0.5 * (0..n)
        .map(|k| {
            let (p, q) = (poly[k], poly[(k + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
}

fn check_grid(g: &AlphaGrid) -> AlphaTopology {
    let (n, m) = (g.lambda1.len(), g.lambda2.len());
    let p = &g.points;
    let mut areas = Vec::with_capacity((n - 1) * (m - 1));
    for i in 0..n - 1 {
        for j in 0..m - 1 {
            areas.push(signed_area(&[p[i][j], p[i + 1][j], p[i + 1][j + 1], p[i][j + 1]]));
        }
    }
    let positive = areas.iter().filter(|a| **a > 0.0).count();
    let negative = areas.iter().filter(|a| **a < 0.0).count();
    let flipped_cells = areas.len() - positive.max(negative);

    let mut outline: Vec<[f64; 2]> = Vec::new();
    outline.extend((0..m).map(|j| p[0][j]));
    outline.extend((1..n).map(|i| p[i][m - 1]));
    outline.extend((0..m - 1).rev().map(|j| p[n - 1][j]));
    outline.extend((1..n - 1).rev().map(|i| p[i][0]));
    let k = outline.len();
    let seg = |s: usize| (outline[s], outline[(s + 1) % k]);
    let mut crossings = 0;
    for a in 0..k {
        for b in a + 2..k {
            if a == 0 && b == k - 1 {
                continue;
            }
            let (p1, p2) = seg(a);
            let (q1, q2) = seg(b);
            if segments_intersect(p1, p2, q1, q2) {
                crossings += 1;
            }
        }
    }
    AlphaTopology {
        alpha: g.alpha,
        cells: areas.len(),
        flipped_cells,
        boundary_self_intersections: crossings,
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> bool {
    c[0] >= a[0].min(b[0]) && c[0] <= a[0].max(b[0]) && c[1] >= a[1].min(b[1]) && c[1] <= a[1].max(b[1])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let (d1, d2) = (orient(q1, q2, p1), orient(q1, q2, p2));
    let (d3, d4) = (orient(p1, p2, q1), orient(p1, p2, q2));
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::records::tests::identity;

    #[test]
    fn identity_map_passes() {
        let axis = [0.1, 0.2, 0.5, 1.0];
        let r = grid_topology_check(&identity(&[0.25, 1.0], &axis)).unwrap();
        assert!(r.pass);
        assert_eq!(r.per_alpha.len(), 2);
        assert_eq!(r.per_alpha[0].cells, 9);
    }

    #[test]
    fn mirrored_map_passes() {
        // a consistently reversed orientation is not a flip
        let mut recs = identity(&[1.0], &[0.1, 0.2, 0.5]);
        for r in &mut recs {
            r.norm_x = Some(-r.lambda1);
        }
        assert!(grid_topology_check(&recs).unwrap().pass);
    }

    #[test]
    fn swapped_nodes_fail() {
        let mut recs = identity(&[1.0], &[0.1, 0.2, 0.3, 0.4]);
        // exchange the images of two neighbouring interior nodes
        let (a, b) = (5, 6);
        let (pa, pb) = ((recs[a].norm_x, recs[a].norm_y), (recs[b].norm_x, recs[b].norm_y));
        (recs[a].norm_x, recs[a].norm_y) = pb;
        (recs[b].norm_x, recs[b].norm_y) = pa;
        let r = grid_topology_check(&recs).unwrap();
        assert!(!r.pass);
        assert!(r.per_alpha[0].flipped_cells >= 1);
    }

    #[test]
    fn folded_outline_is_detected() {
        let mut recs = identity(&[1.0], &[0.1, 0.2, 0.3]);
        // drag a corner across the opposite side
        recs[0].norm_x = Some(0.5);
        recs[0].norm_y = Some(0.25);
        let r = grid_topology_check(&recs).unwrap();
        assert!(r.per_alpha[0].boundary_self_intersections > 0);
        assert!(!r.pass);
    }

    #[test]
    fn incomplete_grid_is_an_error() {
        let mut recs = identity(&[1.0], &[0.1, 0.2]);
        recs.remove(2);
        assert!(grid_topology_check(&recs).is_err());
    }

    #[test]
    fn shoelace() {
        assert_eq!(signed_area(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]), 1.0);
        assert_eq!(signed_area(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]), -1.0);
    }
}
