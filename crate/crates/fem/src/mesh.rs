use std::collections::HashMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::FemError;

pub type Point = [f64; 2];

/// Computational domains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Domain {
    Rectangle {
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
    },
    /// `[-a, a]² \ [0, a]²`
    Lshape { half_width: f64 },
    /// Disc minus a disc lying strictly inside it.
    DiscWithHole {
        outer_center: Point,
        outer_radius: f64,
        inner_center: Point,
        inner_radius: f64,
    },
}

impl Domain {
    /// `([-1,1] × [-1,1]) \ ([0,1] × [0,1])`
    pub fn l_shape() -> Self {
        Domain::Lshape { half_width: 1.0 }
    }

    /// Unit disc with a hole of radius 0.3 centered at (0.2, 0.2).
    pub fn eccentric_annulus() -> Self {
        Domain::DiscWithHole {
            outer_center: [0.0, 0.0],
            outer_radius: 1.0,
            inner_center: [0.2, 0.2],
            inner_radius: 0.3,
        }
    }

    pub fn square_pi() -> Self {
        Domain::Rectangle {
            x_min: 0.0,
            x_max: PI,
            y_min: 0.0,
            y_max: PI,
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Domain::Rectangle { .. } => "rectangle",
            Domain::Lshape { .. } => "lshape",
            Domain::DiscWithHole { .. } => "disc_with_hole",
        }
    }

    /// Exact area of the continuous domain.
    pub fn area(&self) -> f64 {
        match *self {
            Domain::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => (x_max - x_min) * (y_max - y_min),
            Domain::Lshape { half_width } => 3.0 * half_width * half_width,
            Domain::DiscWithHole {
                outer_radius,
                inner_radius,
                ..
            } => PI * (outer_radius * outer_radius - inner_radius * inner_radius),
        }
    }

    pub fn validate(&self) -> Result<(), FemError> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match *self {
            Domain::Rectangle {
                x_min,
                x_max,
                y_min,
                y_max,
            } => {
                if !finite(&[x_min, x_max, y_min, y_max]) || x_max <= x_min || y_max <= y_min {
                    return Err(FemError::Geometry(format!(
                        "rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}] is empty"
                    )));
                }
            }
            Domain::Lshape { half_width } => {
                if !(half_width > 0.0 && half_width.is_finite()) {
                    return Err(FemError::Geometry(format!("L-shape half width {half_width} must be positive")));
                }
            }
            Domain::DiscWithHole {
                outer_center,
                outer_radius,
                inner_center,
                inner_radius,
            } => {
                if !finite(&[outer_center[0], outer_center[1], inner_center[0], inner_center[1]])
                    || !(outer_radius > 0.0 && outer_radius.is_finite())
                    || !(inner_radius > 0.0 && inner_radius.is_finite())
                {
                    return Err(FemError::Geometry("disc radii must be positive and centers finite".into()));
                }
                if distance(outer_center, inner_center) + inner_radius >= outer_radius {
                    return Err(FemError::Geometry("hole must lie strictly inside the outer disc".into()));
                }
            }
        }
        Ok(())
    }
}

/// Conforming triangulation with counter-clockwise triangles.
///
/// The boundary vertex set is derived from the connectivity: a vertex lies on
/// `∂Ω` exactly when it ends an edge that belongs to a single triangle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMesh")]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_vertices: Vec<usize>,
    #[serde(skip)]
    on_boundary: Vec<bool>,
}

#[derive(Deserialize)]
struct RawMesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    boundary_vertices: Vec<usize>,
}

impl TryFrom<RawMesh> for Mesh {
    type Error = FemError;
    fn try_from(raw: RawMesh) -> Result<Self, FemError> {
        Mesh::with_boundary(raw.vertices, raw.triangles, raw.boundary_vertices)
    }
}

pub(crate) fn distance(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

pub(crate) fn signed_area(p: [Point; 3]) -> f64 {
    0.5 * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1]) - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
}

impl Mesh {
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, FemError> {
        let nv = vertices.len();
        if vertices.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
            return Err(FemError::Topology("vertex coordinates must be finite".into()));
        }
        for (index, t) in triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= nv) {
                return Err(FemError::Topology(format!("triangle {index} references a missing vertex")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(FemError::Topology(format!("triangle {index} repeats a vertex")));
            }
            let area = signed_area([vertices[t[0]], vertices[t[1]], vertices[t[2]]]);
            if !(area > 0.0) {
                return Err(FemError::Orientation { index, area });
            }
        }
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut on_boundary = vec![false; nv];
        for (&(a, b), &count) in &edges {
            match count {
                1 => {
                    on_boundary[a] = true;
                    on_boundary[b] = true;
                }
                2 => {}
                _ => return Err(FemError::Topology(format!("edge ({a}, {b}) is shared by {count} triangles"))),
            }
        }
        let mut used = vec![false; nv];
        triangles.iter().flatten().for_each(|&v| used[v] = true);
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(FemError::Topology(format!("vertex {v} belongs to no triangle")));
        }
        let boundary_vertices = (0..nv).filter(|&v| on_boundary[v]).collect();
        Ok(Self {
            vertices,
            triangles,
            boundary_vertices,
            on_boundary,
        })
    }

    /// Like [`Mesh::new`], additionally checking a stored boundary list.
    pub fn with_boundary(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, boundary: Vec<usize>) -> Result<Self, FemError> {
        let mesh = Self::new(vertices, triangles)?;
        let mut given = boundary;
        given.sort_unstable();
        given.dedup();
        if given != mesh.boundary_vertices {
            return Err(FemError::Topology(
                "boundary vertex list does not match the mesh connectivity".into(),
            ));
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Sorted.
    pub fn boundary_vertices(&self) -> &[usize] {
        &self.boundary_vertices
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn n_interior(&self) -> usize {
        self.n_vertices() - self.boundary_vertices.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        signed_area(self.corners(t))
    }

    pub fn area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        (0..self.n_triangles())
            .flat_map(|t| {
                let p = self.corners(t);
                [distance(p[0], p[1]), distance(p[1], p[2]), distance(p[2], p[0])]
            })
            .fold(0.0, f64::max)
    }

    /// Edges belonging to exactly one triangle, oriented as in that triangle.
    pub fn boundary_edges(&self) -> Vec<[usize; 2]> {
        let mut edges: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.entry((a.min(b), a.max(b))).or_insert((a, b, 0)).2 += 1;
            }
        }
        let mut out: Vec<[usize; 2]> = edges.values().filter(|e| e.2 == 1).map(|e| [e.0, e.1]).collect();
        out.sort_unstable();
        out
    }
}

/// Number of cells of size at most `h` covering a length. The slack absorbs
/// rounding in ratios such as `π / (π/4)`.
fn cells(length: f64, h: f64) -> usize {
    ((length / h) * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

/// Structured grid on `[x0, x1] × [y0, y1]` with `nx × ny` cells split along the
/// `/` diagonal; `keep(i, j)` selects cells by their lower-left grid index.
fn split_square_grid(
    (x0, x1): (f64, f64),
    (y0, y1): (f64, f64),
    (nx, ny): (usize, usize),
    keep: impl Fn(usize, usize) -> bool,
) -> Result<Mesh, FemError> {
    let grid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut index = vec![usize::MAX; (nx + 1) * (ny + 1)];
    let mut cells_kept = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if keep(i, j) {
                cells_kept.push((i, j));
                for (a, b) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
                    index[grid(a, b)] = 0;
                }
            }
        }
    }
    let mut vertices = Vec::new();
    for j in 0..=ny {
        for i in 0..=nx {
            let slot = &mut index[grid(i, j)];
            if *slot == 0 {
                *slot = vertices.len();
                // symmetric in the index so that mirrored grids give mirrored coordinates
                let x = x0 + (x1 - x0) * i as f64 / nx as f64;
                let y = y0 + (y1 - y0) * j as f64 / ny as f64;
                vertices.push([x, y]);
            }
        }
    }
    let mut triangles = Vec::with_capacity(2 * cells_kept.len());
    for (i, j) in cells_kept {
        let (a, b, c, d) = (
            index[grid(i, j)],
            index[grid(i + 1, j)],
            index[grid(i + 1, j + 1)],
            index[grid(i, j + 1)],
        );
        triangles.push([a, b, c]);
        triangles.push([a, c, d]);
    }
    Mesh::new(vertices, triangles)
}

/// Layers of circles interpolating between the hole and the outer circle. Every
/// intermediate curve is itself a circle, and the circles are nested because the
/// hole is interior, so no cell folds. The angular grid starts on the axis
/// through both centers and quad diagonals are mirrored across that axis, which
/// makes the mesh symmetric under the reflection that preserves the domain.
fn annulus(c_out: Point, r_out: f64, c_in: Point, r_in: f64, h: f64) -> Result<Mesh, FemError> {
    let offset = [c_in[0] - c_out[0], c_in[1] - c_out[1]];
    let shift = offset[0].hypot(offset[1]);
    let theta0 = if shift > 0.0 { offset[1].atan2(offset[0]) } else { 0.0 };
    let mut sectors = cells(2.0 * PI * r_out, h).max(8);
    sectors += sectors % 2;
    let layers = cells(r_out - r_in + shift, h);
    let point = |l: usize, j: usize| {
        let s = l as f64 / layers as f64;
        let theta = theta0 + 2.0 * PI * j as f64 / sectors as f64;
        let (sin, cos) = theta.sin_cos();
        let inner = [c_in[0] + r_in * cos, c_in[1] + r_in * sin];
        let outer = [c_out[0] + r_out * cos, c_out[1] + r_out * sin];
        if l == 0 {
            inner
        } else if l == layers {
            outer
        } else {
            [(1.0 - s) * inner[0] + s * outer[0], (1.0 - s) * inner[1] + s * outer[1]]
        }
    };
    let mut vertices = Vec::with_capacity((layers + 1) * sectors);
    for l in 0..=layers {
        for j in 0..sectors {
            vertices.push(point(l, j));
        }
    }
    let id = |l: usize, j: usize| l * sectors + j % sectors;
    let mut triangles = Vec::with_capacity(2 * layers * sectors);
    for l in 0..layers {
        // true: diagonal (l, j)-(l+1, j+1); false: (l, j+1)-(l+1, j)
        let mut rising = vec![true; sectors];
        for j in 0..sectors / 2 {
            let rise = distance(vertices[id(l, j)], vertices[id(l + 1, j + 1)]);
            let fall = distance(vertices[id(l, j + 1)], vertices[id(l + 1, j)]);
            rising[j] = rise <= fall;
            rising[sectors - 1 - j] = !rising[j];
        }
        for j in 0..sectors {
            let (a, b, c, d) = (id(l, j), id(l, j + 1), id(l + 1, j + 1), id(l + 1, j));
            let pair = if rising[j] {
                [[a, d, c], [a, c, b]]
            } else {
                [[a, d, b], [b, d, c]]
            };
            for mut t in pair {
                if signed_area([vertices[t[0]], vertices[t[1]], vertices[t[2]]]) < 0.0 {
                    t.swap(1, 2);
                }
                triangles.push(t);
            }
        }
    }
    Mesh::new(vertices, triangles)
}

/// Triangulates `domain` with edges no longer than `1.5 · target_h`.
pub fn generate_mesh(domain: &Domain, target_h: f64) -> Result<Mesh, FemError> {
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(FemError::Geometry(format!("target_h must be positive, got {target_h}")));
    }
    domain.validate()?;
    match *domain {
        Domain::Rectangle {
            x_min,
            x_max,
            y_min,
            y_max,
        } => {
            let n = (cells(x_max - x_min, target_h), cells(y_max - y_min, target_h));
            split_square_grid((x_min, x_max), (y_min, y_max), n, |_, _| true)
        }
        Domain::Lshape { half_width } => {
            let half = cells(half_width, target_h);
            let n = 2 * half;
            split_square_grid((-half_width, half_width), (-half_width, half_width), (n, n), |i, j| {
                i < half || j < half
            })
        }
        Domain::DiscWithHole {
            outer_center,
            outer_radius,
            inner_center,
            inner_radius,
        } => annulus(outer_center, outer_radius, inner_center, inner_radius, target_h),
    }
}
