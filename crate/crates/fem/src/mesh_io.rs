//! Plain-text exchange formats.
//!
//! Mesh: a header `nv nt nb`, then `nv` lines `x y`, `nt` lines `i j k`
//! (0-based) and `nb` lines with one boundary vertex index each.
//! Field: one `index value` line per vertex.

use std::io::{BufRead, Write};

use crate::mesh::Mesh;
use crate::FemError;

pub fn write_mesh<W: Write>(mesh: &Mesh, mut out: W) -> std::io::Result<()> {
    writeln!(
        out,
        "{} {} {}",
        mesh.n_vertices(),
        mesh.n_triangles(),
        mesh.boundary_vertices().len()
    )?;
    for p in mesh.vertices() {
        writeln!(out, "{:e} {:e}", p[0], p[1])?;
    }
    for t in mesh.triangles() {
        writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
    }
    for v in mesh.boundary_vertices() {
        writeln!(out, "{v}")?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_fields<T: std::str::FromStr>(&mut self, count: usize) -> Result<Vec<T>, FemError> {
        loop {
            self.line += 1;
            let text = match self.inner.next() {
                Some(text) => text?,
                None => {
                    return Err(FemError::Parse {
                        line: self.line,
                        message: "unexpected end of input".into(),
                    })
                }
            };
            if text.trim().is_empty() {
                continue;
            }
            let fields: Vec<T> = text
                .split_whitespace()
                .map(|f| f.parse::<T>())
                .collect::<Result<_, _>>()
                .map_err(|_| self.error(format!("cannot parse {text:?}")))?;
            if fields.len() != count {
                return Err(self.error(format!("expected {count} fields, found {}", fields.len())));
            }
            return Ok(fields);
        }
    }

    fn error(&self, message: String) -> FemError {
        FemError::Parse {
            line: self.line,
            message,
        }
    }
}

pub fn read_mesh<R: BufRead>(input: R) -> Result<Mesh, FemError> {
    let mut lines = Lines {
        inner: input.lines(),
        line: 0,
    };
    let header: Vec<usize> = lines.next_fields(3)?;
    let (nv, nt, nb) = (header[0], header[1], header[2]);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let p: Vec<f64> = lines.next_fields(2)?;
        vertices.push([p[0], p[1]]);
    }
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let t: Vec<usize> = lines.next_fields(3)?;
        triangles.push([t[0], t[1], t[2]]);
    }
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        boundary.push(lines.next_fields::<usize>(1)?[0]);
    }
    Mesh::with_boundary(vertices, triangles, boundary)
}

pub fn write_field<W: Write>(values: &[f64], mut out: W) -> std::io::Result<()> {
    for (i, v) in values.iter().enumerate() {
        writeln!(out, "{i} {v:e}")?;
    }
    Ok(())
}

/// Reads `index value` lines; indices must run 0, 1, 2, … in order.
pub fn read_field<R: BufRead>(input: R) -> Result<Vec<f64>, FemError> {
    let mut values = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| FemError::Parse { line: n + 1, message };
        let mut parts = line.split_whitespace();
        let (Some(i), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `index value`, found {line:?}")));
        };
        let i: usize = i.parse().map_err(|_| err(format!("bad index {i:?}")))?;
        let v: f64 = v.parse().map_err(|_| err(format!("bad value {v:?}")))?;
        if i != values.len() {
            return Err(err(format!("expected index {}, found {i}", values.len())));
        }
        values.push(v);
    }
    Ok(values)
}
