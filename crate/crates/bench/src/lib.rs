//! Shared fixtures for the kernel benchmarks.

use std::sync::Arc;

use vadapt::mesh::{refine_uniform, Domain, Mesh};
use vadapt::solver::{cg_run, CgOptions, FixedIterations, Preconditioner};
use vadapt::{compute_indicators, doerfler_mark, CoeffVector, Discretization, P1Space, ProblemId};

/// The L-shape initial mesh after `sweeps` uniform refinements.
pub fn lshape_mesh(sweeps: usize) -> Mesh {
    let mut mesh = Domain::LShape.initial_mesh();
    for _ in 0..sweeps {
        mesh = refine_uniform(&mesh).0;
    }
    mesh
}

pub fn discretization(id: ProblemId, mesh: Mesh) -> Discretization {
    Discretization::new(P1Space::new(Arc::new(mesh)), id.problem()).expect("catalog data is valid")
}

/// `iters` plain CG steps from zero on a linear problem.
pub fn cg_iterate(disc: &Discretization, iters: usize) -> Vec<f64> {
    let k = disc.system_matrix().expect("linear problem");
    let zero = CoeffVector(vec![0.0; disc.dim()]);
    let (u, _) = cg_run(
        k,
        disc.load(),
        &zero,
        &Preconditioner::Identity,
        &mut FixedIterations(iters),
        CgOptions::default(),
    )
    .expect("SPD system");
    u.into_inner()
}

/// Edges marked with bulk parameter one half from a rough iterate.
pub fn marked_edges(disc: &Discretization) -> Vec<usize> {
    let u = cg_iterate(disc, 50);
    doerfler_mark(&compute_indicators(disc, &u).expect("finite data"), 0.5)
}
