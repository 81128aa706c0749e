use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use vadapt::mesh::refine_nvb;
use vadapt::{compute_indicators, Discretization, P1Space, ProblemId};
use vadapt_bench::{cg_iterate, discretization, lshape_mesh, marked_edges};

const SWEEPS: [usize; 3] = [3, 4, 5];

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assembly");
    for id in [ProblemId::LinLshape, ProblemId::LinSubdomains] {
        for sweeps in SWEEPS {
            let space = P1Space::new(Arc::new(lshape_mesh(sweeps)));
            g.throughput(Throughput::Elements(space.mesh().num_triangles() as u64));
            g.bench_with_input(BenchmarkId::new(id.as_str(), space.dim()), &space, |b, s| {
                b.iter(|| Discretization::new(s.clone(), id.problem()).unwrap())
            });
        }
    }
    g.finish();
}

fn cg(c: &mut Criterion) {
    let mut g = c.benchmark_group("cg_100_steps");
    for sweeps in SWEEPS {
        let disc = discretization(ProblemId::LinLshape, lshape_mesh(sweeps));
        g.throughput(Throughput::Elements(disc.dim() as u64));
        g.bench_with_input(BenchmarkId::from_parameter(disc.dim()), &disc, |b, d| {
            b.iter(|| cg_iterate(d, 100))
        });
    }
    g.finish();
}

fn indicators(c: &mut Criterion) {
    let mut g = c.benchmark_group("indicators");
    for sweeps in SWEEPS {
        let disc = discretization(ProblemId::LinLshape, lshape_mesh(sweeps));
        let u = cg_iterate(&disc, 50);
        g.throughput(Throughput::Elements(disc.mesh().num_edges() as u64));
        g.bench_with_input(BenchmarkId::from_parameter(disc.dim()), &(disc, u), |b, (d, u)| {
            b.iter(|| compute_indicators(d, black_box(u)).unwrap())
        });
    }
    g.finish();
}

fn refinement(c: &mut Criterion) {
    let mut g = c.benchmark_group("nvb_refinement");
    for sweeps in SWEEPS {
        let disc = discretization(ProblemId::LinLshape, lshape_mesh(sweeps));
        let marked = marked_edges(&disc);
        g.throughput(Throughput::Elements(disc.mesh().num_triangles() as u64));
        g.bench_with_input(BenchmarkId::from_parameter(disc.dim()), &marked, |b, m| {
            b.iter(|| refine_nvb(disc.mesh(), black_box(m)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, assembly, cg, indicators, refinement);
criterion_main!(benches);
