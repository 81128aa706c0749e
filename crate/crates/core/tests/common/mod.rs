#![allow(dead_code)]

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vadapt::energy::SparseOperator;
use vadapt::mesh::{bisect_patch_geometry, refine_nvb, refine_uniform, Domain, FineVertexSource, Mesh, Prolongation};
use vadapt::P1Space;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn to_dense(a: &SparseOperator) -> DMatrix<f64> {
    let n = a.dim();
    let mut m = DMatrix::zeros(n, n);
    for r in 0..n {
        for (c, v) in a.row(r) {
            m[(r, c)] += v;
        }
    }
    m
}

/// Random SPD matrix `Qᵀ diag(λ) Q` with eigenvalues spread over
/// `[1, cond]`, plus a random right-hand side.
pub fn random_spd(rng: &mut impl Rng, n: usize, cond: f64) -> (SparseOperator, Vec<f64>) {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let q = g.qr().q();
    let lambda = DVector::from_fn(n, |i, _| {
        let t = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
        cond.powf(t) * rng.gen_range(0.9..1.1)
    });
    let a = &q * DMatrix::from_diagonal(&lambda) * q.transpose();
    let a = (&a + a.transpose()) * 0.5;
    let mut triplets = Vec::new();
    for r in 0..n {
        for c in 0..n {
            triplets.push((r, c, a[(r, c)]));
        }
    }
    let b = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (SparseOperator::from_triplets(n, triplets), b)
}

/// `E(x) - E(y)` for the quadratic energy, evaluated exactly in rational
/// arithmetic from the stored floats and rounded once at the end.
pub fn exact_energy_drop(a: &SparseOperator, b: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let q = |v: f64| BigRational::from_float(v).expect("finite");
    let energy = |u: &[f64]| {
        let u: Vec<BigRational> = u.iter().map(|&v| q(v)).collect();
        let mut quad = BigRational::zero();
        let mut lin = BigRational::zero();
        for r in 0..a.dim() {
            for (c, v) in a.row(r) {
                quad += q(v) * &u[r] * &u[c];
            }
            lin += q(b[r]) * &u[r];
        }
        quad / q(2.0) - lin
    };
    (energy(x) - energy(y)).to_f64().expect("representable")
}

pub fn dense_solve(a: &SparseOperator, b: &[f64]) -> Vec<f64> {
    let chol = to_dense(a).cholesky().expect("matrix is SPD");
    chol.solve(&DVector::from_column_slice(b)).as_slice().to_vec()
}

/// Initial mesh of `domain` refined uniformly `sweeps` times and then by
/// `rounds` NVB steps on random edge subsets.
pub fn random_mesh(rng: &mut impl Rng, domain: Domain, sweeps: usize, rounds: usize) -> Mesh {
    let mut mesh = domain.initial_mesh();
    for _ in 0..sweeps {
        mesh = refine_uniform(&mesh).0;
    }
    for _ in 0..rounds {
        let marked: Vec<usize> = (0..mesh.num_edges()).filter(|_| rng.gen_bool(0.15)).collect();
        mesh = refine_nvb(&mesh, &marked).unwrap().0;
    }
    mesh
}

pub fn space(mesh: Mesh) -> P1Space {
    P1Space::new(Arc::new(mesh))
}

/// The mesh with only `edge` bisected: both neighbours are split by joining
/// the new midpoint to their opposite vertex. Returns the mesh and the id
/// of the midpoint vertex.
pub fn virtually_refined(mesh: &Mesh, edge: usize) -> (Mesh, usize) {
    let patch = bisect_patch_geometry(mesh, edge).unwrap();
    let mut vertices = mesh.vertices().to_vec();
    let mid = vertices.len();
    vertices.push(patch.midpoint);
    let mut triangles: Vec<[usize; 3]> = mesh
        .triangles()
        .iter()
        .enumerate()
        .filter(|(t, _)| !patch.triangles.contains(t))
        .map(|(_, tri)| *tri)
        .collect();
    for child in &patch.children {
        triangles.push(child.vertices.map(|v| v.unwrap_or(mid)));
    }
    (Mesh::new(vertices, triangles).unwrap(), mid)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Barycentric coordinates of `p` in the triangle `t`.
pub fn barycentric(t: [[f64; 2]; 3], p: [f64; 2]) -> [f64; 3] {
    let area = |a: [f64; 2], b: [f64; 2], c: [f64; 2]| (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let total = area(t[0], t[1], t[2]);
    [
        area(p, t[1], t[2]) / total,
        area(t[0], p, t[2]) / total,
        area(t[0], t[1], p) / total,
    ]
}

/// Smallest interior angle of a triangle.
pub fn min_angle(t: [[f64; 2]; 3]) -> f64 {
    (0..3)
        .map(|k| {
            let (a, b, c) = (t[k], t[(k + 1) % 3], t[(k + 2) % 3]);
            let u = [b[0] - a[0], b[1] - a[1]];
            let v = [c[0] - a[0], c[1] - a[1]];
            let cos = (u[0] * v[0] + u[1] * v[1]) / (u[0].hypot(u[1]) * v[0].hypot(v[1]));
            cos.clamp(-1.0, 1.0).acos()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Conformity without trusting the edge table: the triangles tile the
/// domain, and every edge with a single neighbour lies on the geometric
/// boundary. A hanging node would leave an unmatched edge inside.
pub fn check_conforming(mesh: &Mesh, domain: Domain) -> Result<(), String> {
    let area = mesh.total_area();
    if (area - domain.area()).abs() > 1e-12 * domain.area() {
        return Err(format!("triangles cover area {area}, domain has {}", domain.area()));
    }
    for e in mesh.edges().iter().filter(|e| e.is_boundary()) {
        let [a, b] = e.vertices.map(|v| mesh.vertices()[v]);
        let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        if let Some(p) = [a, b, m].into_iter().find(|p| !domain.on_boundary(*p, 1e-12)) {
            return Err(format!("unmatched edge through interior point {p:?}"));
        }
    }
    Mesh::new(mesh.vertices().to_vec(), mesh.triangles().to_vec()).map_err(|e| e.to_string())?;
    Ok(())
}

pub fn check_right_isosceles(mesh: &Mesh) -> Result<(), String> {
    for t in 0..mesh.num_triangles() {
        let angle = min_angle(mesh.triangle_points(t));
        if (angle - std::f64::consts::FRAC_PI_4).abs() > 1e-9 {
            return Err(format!("triangle {t} has minimum angle {angle}"));
        }
    }
    Ok(())
}

/// Every fine triangle lies inside its recorded parent, and every marked
/// coarse edge received a midpoint.
pub fn check_refinement(coarse: &Mesh, fine: &Mesh, p: &Prolongation, marked: &[usize]) -> Result<(), String> {
    if p.parent_triangles().len() != fine.num_triangles() {
        return Err("parent map has the wrong length".into());
    }
    if fine.vertices()[..coarse.num_vertices()] != *coarse.vertices() {
        return Err("coarse vertices were moved or renumbered".into());
    }
    for (t, &parent) in p.parent_triangles().iter().enumerate() {
        let outer = coarse.triangle_points(parent);
        for q in fine.triangle_points(t) {
            if barycentric(outer, q).iter().any(|l| *l < -1e-12) {
                return Err(format!("fine triangle {t} leaves parent {parent}"));
            }
        }
    }
    for &e in marked {
        let [a, b] = coarse.edges()[e].vertices;
        let found = p
            .sources()
            .iter()
            .any(|s| *s == FineVertexSource::Midpoint(a, b) || *s == FineVertexSource::Midpoint(b, a));
        if !found {
            return Err(format!("marked edge {e} was not bisected"));
        }
    }
    Ok(())
}
