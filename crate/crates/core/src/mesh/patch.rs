//! Virtual bisection of a single interior edge.

use super::{signed_area, Mesh, MeshError, Point};

/// One of the four triangles of a virtually bisected edge patch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubTriangle {
    /// Counter-clockwise corners; exactly one of them is the edge midpoint.
    pub points: [Point; 3],
    /// Mesh vertex ids of the corners; `None` marks the midpoint.
    pub vertices: [Option<usize>; 3],
    /// Position of the midpoint within `points`.
    pub midpoint_slot: usize,
    /// Coarse triangle this piece belongs to.
    pub parent: usize,
}

impl SubTriangle {
    pub fn area(&self) -> f64 {
        signed_area(self.points[0], self.points[1], self.points[2])
    }
}

/// Geometry of the patch `T_sharp ∪ T_flat` around an interior edge after
/// splitting the edge at its midpoint and joining the midpoint to both
/// opposite vertices.
#[derive(Clone, Debug)]
pub struct EdgePatch {
    pub edge: usize,
    /// Edge endpoints `z_i`, `z_j` (vertex ids).
    pub endpoints: [usize; 2],
    /// Vertices opposite the edge in the sharp and flat triangle.
    pub opposite: [usize; 2],
    /// The two coarse triangles `[T_sharp, T_flat]`.
    pub triangles: [usize; 2],
    pub midpoint: Point,
    /// `T_sharp^1, T_sharp^2, T_flat^1, T_flat^2`.
    pub children: [SubTriangle; 4],
}

fn oriented(points: [Point; 3], vertices: [Option<usize>; 3], parent: usize) -> SubTriangle {
    let midpoint_slot = 1;
    if signed_area(points[0], points[1], points[2]) >= 0.0 {
        SubTriangle {
            points,
            vertices,
            midpoint_slot,
            parent,
        }
    } else {
        let swap = |s: usize| match s {
            1 => 2,
            2 => 1,
            s => s,
        };
        SubTriangle {
            points: [points[0], points[2], points[1]],
            vertices: [vertices[0], vertices[2], vertices[1]],
            midpoint_slot: swap(midpoint_slot),
            parent,
        }
    }
}

pub fn bisect_patch_geometry(mesh: &Mesh, edge: usize) -> Result<EdgePatch, MeshError> {
    let e = mesh.edges().get(edge).ok_or(MeshError::UnknownEdge {
        edge,
        count: mesh.num_edges(),
    })?;
    let flat = e.right.ok_or(MeshError::BoundaryEdge { edge })?;
    let sharp = e.left;
    let [i, j] = e.vertices;
    let opposite_of = |t: usize| {
        mesh.triangles()[t]
            .into_iter()
            .find(|&v| v != i && v != j)
            .expect("triangle has a vertex off the edge")
    };
    let (os, of) = (opposite_of(sharp), opposite_of(flat));
    let p = mesh.vertices();
    let (zi, zj) = (p[i], p[j]);
    let m = [0.5 * (zi[0] + zj[0]), 0.5 * (zi[1] + zj[1])];
    let children = [
        oriented([zi, m, p[os]], [Some(i), None, Some(os)], sharp),
        oriented([zj, m, p[os]], [Some(j), None, Some(os)], sharp),
        oriented([zi, m, p[of]], [Some(i), None, Some(of)], flat),
        oriented([zj, m, p[of]], [Some(j), None, Some(of)], flat),
    ];
    Ok(EdgePatch {
        edge,
        endpoints: [i, j],
        opposite: [os, of],
        triangles: [sharp, flat],
        midpoint: m,
        children,
    })
}

#[cfg(test)]
mod tests {
    use super::super::square;
    use super::*;

    #[test]
    fn kite_patch() {
        let v = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.5], [-1.0, 0.5]];
        let mesh = Mesh::new(v, vec![[0, 2, 1], [1, 3, 0]]).unwrap();
        let e = mesh.find_edge(0, 1).unwrap();
        let patch = bisect_patch_geometry(&mesh, e).unwrap();
        assert_eq!(patch.midpoint, [0.0, 0.5]);
        let total = mesh.total_area();
        for c in &patch.children {
            assert!((c.area() - 0.25 * total).abs() < 1e-15);
            assert_eq!(c.points[c.midpoint_slot], [0.0, 0.5]);
        }
    }

    #[test]
    fn children_tile_patch() {
        let mesh = square();
        let e = mesh.find_edge(0, 2).unwrap();
        let patch = bisect_patch_geometry(&mesh, e).unwrap();
        let sum: f64 = patch.children.iter().map(|c| c.area()).sum();
        assert!((sum - mesh.area(patch.triangles[0]) - mesh.area(patch.triangles[1])).abs() < 1e-14);
        assert_eq!(patch.children[0].area(), patch.children[1].area());
    }

    #[test]
    fn boundary_edge_rejected() {
        let mesh = square();
        let e = mesh.find_edge(0, 1).unwrap();
        assert_eq!(
            bisect_patch_geometry(&mesh, e).unwrap_err(),
            MeshError::BoundaryEdge { edge: e }
        );
    }
}
