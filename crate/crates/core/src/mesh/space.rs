use std::sync::Arc;

use super::refine::{FineVertexSource, Prolongation};
use super::{Mesh, MeshError};

/// P1 space with homogeneous Dirichlet conditions: one degree of freedom per
/// interior vertex.
#[derive(Clone, Debug)]
pub struct P1Space {
    mesh: Arc<Mesh>,
    dof_of_vertex: Vec<Option<usize>>,
    vertex_of_dof: Vec<usize>,
}

impl P1Space {
    pub fn new(mesh: Arc<Mesh>) -> Self {
        let mut dof_of_vertex = vec![None; mesh.num_vertices()];
        let mut vertex_of_dof = Vec::new();
        for v in 0..mesh.num_vertices() {
            if !mesh.is_boundary_vertex(v) {
                dof_of_vertex[v] = Some(vertex_of_dof.len());
                vertex_of_dof.push(v);
            }
        }
        Self {
            mesh,
            dof_of_vertex,
            vertex_of_dof,
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    /// Number of degrees of freedom `d_N`.
    pub fn dim(&self) -> usize {
        self.vertex_of_dof.len()
    }

    pub fn dof(&self, vertex: usize) -> Option<usize> {
        self.dof_of_vertex[vertex]
    }

    pub fn vertex(&self, dof: usize) -> usize {
        self.vertex_of_dof[dof]
    }

    pub fn zeros(&self) -> CoeffVector {
        CoeffVector(vec![0.0; self.dim()])
    }

    /// Nodal values at every mesh vertex (zero on the boundary).
    pub fn vertex_values(&self, u: &[f64]) -> Vec<f64> {
        debug_assert_eq!(u.len(), self.dim());
        self.dof_of_vertex.iter().map(|d| d.map_or(0.0, |i| u[i])).collect()
    }

    /// Interpolates `g` at the interior vertices.
    pub fn interpolate(&self, g: impl Fn(f64, f64) -> f64) -> CoeffVector {
        CoeffVector(
            self.vertex_of_dof
                .iter()
                .map(|&v| {
                    let [x, y] = self.mesh.vertices()[v];
                    g(x, y)
                })
                .collect(),
        )
    }

    pub fn check(&self, u: &CoeffVector) -> Result<(), MeshError> {
        if u.len() == self.dim() {
            Ok(())
        } else {
            Err(MeshError::DimensionMismatch {
                expected: self.dim(),
                got: u.len(),
            })
        }
    }
}

/// Coefficients of a finite element function in the hat basis of a
/// [`P1Space`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CoeffVector(pub Vec<f64>);

impl CoeffVector {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for CoeffVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::DerefMut for CoeffVector {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for CoeffVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Interpolates a coarse P1 function onto the refined space. Midpoint values
/// are the average of the parent edge endpoints, so the function itself is
/// unchanged.
pub fn prolong(
    coarse: &CoeffVector,
    coarse_space: &P1Space,
    prolongation: &Prolongation,
    fine_space: &P1Space,
) -> Result<CoeffVector, MeshError> {
    coarse_space.check(coarse)?;
    if prolongation.coarse_vertex_count() != coarse_space.mesh().num_vertices()
        || prolongation.sources().len() != fine_space.mesh().num_vertices()
    {
        return Err(MeshError::DimensionMismatch {
            expected: prolongation.sources().len(),
            got: fine_space.mesh().num_vertices(),
        });
    }
    let value = |v: usize| coarse_space.dof(v).map_or(0.0, |d| coarse[d]);
    let fine = (0..fine_space.dim())
        .map(|i| match prolongation.sources()[fine_space.vertex(i)] {
            FineVertexSource::Coarse(v) => value(v),
            FineVertexSource::Midpoint(a, b) => 0.5 * (value(a) + value(b)),
        })
        .collect();
    Ok(CoeffVector(fine))
}
