//! Newest-vertex bisection with conformity closure.

use super::{Mesh, MeshError, Point};

/// Origin of a vertex of the refined mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FineVertexSource {
    /// Vertex carried over from the coarse mesh (same id).
    Coarse(usize),
    /// Midpoint of the coarse edge with these endpoints.
    Midpoint(usize, usize),
}

/// Coarse-to-fine bookkeeping produced by one refinement.
#[derive(Clone, Debug)]
pub struct Prolongation {
    pub(crate) coarse_vertices: usize,
    pub(crate) sources: Vec<FineVertexSource>,
    pub(crate) parent_triangle: Vec<usize>,
}

impl Prolongation {
    pub fn identity(mesh: &Mesh) -> Self {
        Self {
            coarse_vertices: mesh.num_vertices(),
            sources: (0..mesh.num_vertices()).map(FineVertexSource::Coarse).collect(),
            parent_triangle: (0..mesh.num_triangles()).collect(),
        }
    }

    /// Source of every fine vertex, indexed by fine vertex id.
    pub fn sources(&self) -> &[FineVertexSource] {
        &self.sources
    }

    /// Coarse triangle containing each fine triangle.
    pub fn parent_triangles(&self) -> &[usize] {
        &self.parent_triangle
    }

    pub fn coarse_vertex_count(&self) -> usize {
        self.coarse_vertices
    }

    pub fn new_vertex_count(&self) -> usize {
        self.sources.len() - self.coarse_vertices
    }
}

/// Refines `mesh` so that every edge in `marked` is bisected.
///
/// The closure marks, for every triangle with a marked side, its refinement
/// edge as well, until no new marks appear. Each triangle is then bisected
/// along its refinement edge and its children along their refinement edges
/// where those are marked, which yields the usual green/blue/red-like NVB
/// patterns.
pub fn refine_nvb(mesh: &Mesh, marked: &[usize]) -> Result<(Mesh, Prolongation), MeshError> {
    let ne = mesh.num_edges();
    let mut flag = vec![false; ne];
    let mut work = Vec::with_capacity(marked.len());
    for &e in marked {
        if e >= ne {
            return Err(MeshError::UnknownEdge { edge: e, count: ne });
        }
        if !flag[e] {
            flag[e] = true;
            work.push(e);
        }
    }
    if work.is_empty() {
        return Ok((mesh.clone(), Prolongation::identity(mesh)));
    }

    while let Some(e) = work.pop() {
        let edge = &mesh.edges()[e];
        for t in std::iter::once(edge.left).chain(edge.right) {
            let refinement_edge = mesh.triangle_edges(t)[0];
            if !flag[refinement_edge] {
                flag[refinement_edge] = true;
                work.push(refinement_edge);
            }
        }
    }

    let mut vertices: Vec<Point> = mesh.vertices().to_vec();
    let mut sources: Vec<FineVertexSource> = (0..mesh.num_vertices()).map(FineVertexSource::Coarse).collect();
    let mut midpoint = vec![usize::MAX; ne];
    for (e, _) in flag.iter().enumerate().filter(|(_, &f)| f) {
        let [a, b] = mesh.edges()[e].vertices;
        let (pa, pb) = (vertices[a], vertices[b]);
        midpoint[e] = vertices.len();
        vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        sources.push(FineVertexSource::Midpoint(a, b));
    }

    let mut triangles = Vec::with_capacity(mesh.num_triangles() * 2);
    let mut parent_triangle = Vec::with_capacity(mesh.num_triangles() * 2);
    for (t, &[a, b, c]) in mesh.triangles().iter().enumerate() {
        let [e_ab, e_bc, e_ca] = mesh.triangle_edges(t);
        let mut emit = |tri: [usize; 3]| {
            triangles.push(tri);
            parent_triangle.push(t);
        };
        if !flag[e_ab] {
            emit([a, b, c]);
            continue;
        }
        let m = midpoint[e_ab];
        // children [c, a, m] and [b, c, m]; their refinement edges are the
        // coarse sides (c, a) and (b, c)
        if flag[e_ca] {
            let m2 = midpoint[e_ca];
            emit([m, c, m2]);
            emit([a, m, m2]);
        } else {
            emit([c, a, m]);
        }
        if flag[e_bc] {
            let m3 = midpoint[e_bc];
            emit([m, b, m3]);
            emit([c, m, m3]);
        } else {
            emit([b, c, m]);
        }
    }

    let coarse_vertices = mesh.num_vertices();
    let fine = Mesh::new(vertices, triangles)?;
    Ok((
        fine,
        Prolongation {
            coarse_vertices,
            sources,
            parent_triangle,
        },
    ))
}

/// One uniform sweep: every edge is bisected, every triangle split in four.
pub fn refine_uniform(mesh: &Mesh) -> (Mesh, Prolongation) {
    let all: Vec<usize> = (0..mesh.num_edges()).collect();
    refine_nvb(mesh, &all).expect("all edge ids are valid")
}

#[cfg(test)]
mod tests {
    use super::super::{lshape, square};
    use super::*;

    #[test]
    fn bisect_square_diagonal() {
        let mesh = square();
        let diag = mesh.find_edge(0, 2).unwrap();
        let (fine, p) = refine_nvb(&mesh, &[diag]).unwrap();
        assert_eq!(fine.num_triangles(), 4);
        assert_eq!(fine.num_vertices(), 5);
        assert_eq!(fine.vertices()[4], [0.5, 0.5]);
        assert_eq!(p.sources()[4], FineVertexSource::Midpoint(0, 2));
        assert!(!fine.is_boundary_vertex(4));
    }

    #[test]
    fn empty_marking_is_identity() {
        let mesh = lshape();
        let (fine, p) = refine_nvb(&mesh, &[]).unwrap();
        assert_eq!(fine.vertices(), mesh.vertices());
        assert_eq!(fine.triangles(), mesh.triangles());
        assert_eq!(p.new_vertex_count(), 0);
    }

    #[test]
    fn unknown_edge_rejected() {
        let mesh = square();
        assert_eq!(
            refine_nvb(&mesh, &[99]).unwrap_err(),
            MeshError::UnknownEdge { edge: 99, count: 5 }
        );
    }

    #[test]
    fn closure_propagates_to_refinement_edges() {
        // marking a boundary leg of the square forces the diagonal too
        let mesh = square();
        let leg = mesh.find_edge(0, 1).unwrap();
        let (fine, p) = refine_nvb(&mesh, &[leg]).unwrap();
        assert_eq!(p.new_vertex_count(), 2);
        assert_eq!(fine.num_triangles(), 5);
        assert!((fine.total_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uniform_sweep_quadruples() {
        let mesh = lshape();
        let (fine, _) = refine_uniform(&mesh);
        assert_eq!(fine.num_triangles(), 24);
        assert_eq!(
            (0..fine.num_vertices())
                .filter(|&v| !fine.is_boundary_vertex(v))
                .count(),
            5
        );
    }
}
