//! Conforming 2-D triangulations.
//!
//! Triangles are stored as vertex triples `(v0, v1, v2)` in counter-clockwise
//! order. The side `(v0, v1)` is the triangle's refinement edge and `v2` its
//! newest vertex; newest-vertex bisection in [`refine`] relies on this.

mod domains;
mod io;
mod patch;
mod refine;
mod space;

use std::collections::HashMap;

use thiserror::Error;

pub use domains::{lshape, square, square_grid, Domain};
pub use io::{read_ascii_tri, write_ascii_tri, ASCII_TRI_HEADER};
pub use patch::{bisect_patch_geometry, EdgePatch, SubTriangle};
pub use refine::{refine_nvb, refine_uniform, FineVertexSource, Prolongation};
pub use space::{prolong, CoeffVector, P1Space};

pub type Point = [f64; 2];

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("triangle {triangle} references vertex {vertex}, but only {count} vertices exist")]
    VertexOutOfRange {
        triangle: usize,
        vertex: usize,
        count: usize,
    },
    #[error("triangle {triangle} is degenerate (signed area {area:e})")]
    Degenerate { triangle: usize, area: f64 },
    #[error("triangle {triangle} is inverted (signed area {area:e}); expected counter-clockwise order")]
    Inverted { triangle: usize, area: f64 },
    #[error("non-conforming mesh: edge ({a}, {b}) traversed in the same direction by triangles {first} and {second}")]
    NonConforming {
        a: usize,
        b: usize,
        first: usize,
        second: usize,
    },
    #[error("edge {edge} does not exist (mesh has {count} edges)")]
    UnknownEdge { edge: usize, count: usize },
    #[error("edge {edge} lies on the boundary; enrichment is only defined on interior edges")]
    BoundaryEdge { edge: usize },
    #[error("coefficient vector has length {got}, space has {expected} degrees of freedom")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed mesh file at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// One side of the triangulation.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// Endpoints, sorted ascending.
    pub vertices: [usize; 2],
    /// First incident triangle.
    pub left: usize,
    /// Second incident triangle; `None` on the boundary.
    pub right: Option<usize>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    edge_lookup: HashMap<(usize, usize), usize>,
    /// Edge ids of the sides `(v0,v1)`, `(v1,v2)`, `(v2,v0)` of each triangle.
    triangle_edges: Vec<[usize; 3]>,
    boundary_vertex: Vec<bool>,
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl Mesh {
    /// Builds a mesh, deriving the edge table and boundary flags.
    ///
    /// Boundary vertices are the endpoints of edges with a single incident
    /// triangle; homogeneous Dirichlet conditions are imposed there.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let nv = vertices.len();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                if v >= nv {
                    return Err(MeshError::VertexOutOfRange {
                        triangle: t,
                        vertex: v,
                        count: nv,
                    });
                }
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            let scale = side_scale(&vertices, tri);
            if area.abs() <= 1e-14 * scale * scale {
                return Err(MeshError::Degenerate { triangle: t, area });
            }
            if area < 0.0 {
                return Err(MeshError::Inverted { triangle: t, area });
            }
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if let Some(&first) = directed.get(&(a, b)) {
                    return Err(MeshError::NonConforming { a, b, first, second: t });
                }
                directed.insert((a, b), t);
            }
        }

        let mut keys: Vec<(usize, usize)> = directed.keys().map(|&(a, b)| edge_key(a, b)).collect();
        keys.sort_unstable();
        keys.dedup();

        let mut edge_lookup = HashMap::with_capacity(keys.len());
        let mut edges = Vec::with_capacity(keys.len());
        for (id, &(a, b)) in keys.iter().enumerate() {
            edge_lookup.insert((a, b), id);
            let ab = directed.get(&(a, b)).copied();
            let ba = directed.get(&(b, a)).copied();
            let (left, right) = match (ab, ba) {
                (Some(x), Some(y)) => (x.min(y), Some(x.max(y))),
                (Some(x), None) | (None, Some(x)) => (x, None),
                (None, None) => unreachable!("edge key derived from a triangle side"),
            };
            edges.push(Edge {
                vertices: [a, b],
                left,
                right,
            });
        }

        let triangle_edges = triangles
            .iter()
            .map(|tri| {
                let mut ids = [0; 3];
                for k in 0..3 {
                    ids[k] = edge_lookup[&edge_key(tri[k], tri[(k + 1) % 3])];
                }
                ids
            })
            .collect();

        let mut boundary_vertex = vec![false; nv];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            boundary_vertex[e.vertices[0]] = true;
            boundary_vertex[e.vertices[1]] = true;
        }

        Ok(Self {
            vertices,
            triangles,
            edges,
            edge_lookup,
            triangle_edges,
            boundary_vertex,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edge ids of the sides `(v0,v1)`, `(v1,v2)`, `(v2,v0)` of triangle `t`.
    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// Looks up the edge joining two vertices.
    pub fn find_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_lookup.get(&edge_key(a, b)).copied()
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_boundary())
            .map(|(id, _)| id)
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        signed_area(a, b, c)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_points(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    /// Smallest interior angle over all triangles, in radians.
    pub fn min_angle(&self) -> f64 {
        (0..self.num_triangles())
            .map(|t| {
                let p = self.triangle_points(t);
                (0..3)
                    .map(|k| angle_at(p[k], p[(k + 1) % 3], p[(k + 2) % 3]))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

fn side_scale(vertices: &[Point], tri: &[usize; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let (p, q) = (vertices[tri[k]], vertices[tri[(k + 1) % 3]]);
            (q[0] - p[0]).hypot(q[1] - p[1])
        })
        .fold(0.0, f64::max)
}

fn angle_at(p: Point, q: Point, r: Point) -> f64 {
    let u = [q[0] - p[0], q[1] - p[1]];
    let v = [r[0] - p[0], r[1] - p[1]];
    let cross = u[0] * v[1] - u[1] * v[0];
    let dot = u[0] * v[0] + u[1] * v[1];
    cross.abs().atan2(dot)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Vec<Point> {
        vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
    }

    #[test]
    fn two_triangle_square() {
        let mesh = Mesh::new(unit_square(), vec![[0, 1, 2], [0, 2, 3]]).unwrap();
        assert_eq!(mesh.num_edges(), 5);
        let interior: Vec<_> = mesh.interior_edges().collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(mesh.edges()[interior[0]].vertices, [0, 2]);
        assert!((0..4).all(|v| mesh.is_boundary_vertex(v)));
    }

    #[test]
    fn centroid_fan() {
        let mut v = unit_square();
        v.push([0.5, 0.5]);
        let tris = vec![[0, 1, 4], [1, 2, 4], [2, 3, 4], [3, 0, 4]];
        let mesh = Mesh::new(v, tris).unwrap();
        assert_eq!(mesh.num_edges(), 8);
        assert_eq!(mesh.interior_edges().count(), 4);
        assert_eq!((0..5).filter(|&v| !mesh.is_boundary_vertex(v)).count(), 1);
    }

    #[test]
    fn rejects_edge_shared_on_same_side() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, 2.0]];
        let err = Mesh::new(v, vec![[0, 1, 2], [0, 1, 3]]).unwrap_err();
        assert!(matches!(err, MeshError::NonConforming { a: 0, b: 1, .. }));
        assert!(err.to_string().contains("non-conforming"));
    }

    #[test]
    fn rejects_degenerate_and_inverted() {
        let v = vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [0.0, 1.0]];
        assert!(matches!(
            Mesh::new(v.clone(), vec![[0, 1, 2]]),
            Err(MeshError::Degenerate { triangle: 0, .. })
        ));
        assert!(matches!(
            Mesh::new(v.clone(), vec![[0, 3, 1]]),
            Err(MeshError::Inverted { triangle: 0, .. })
        ));
        assert!(matches!(
            Mesh::new(v, vec![[0, 1, 7]]),
            Err(MeshError::VertexOutOfRange { vertex: 7, .. })
        ));
    }

    #[test]
    fn edges_sorted_lexicographically() {
        let mesh = Mesh::new(unit_square(), vec![[0, 2, 3], [2, 0, 1]]).unwrap();
        let keys: Vec<_> = mesh.edges().iter().map(|e| e.vertices).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(mesh.find_edge(2, 0), Some(1));
    }
}
