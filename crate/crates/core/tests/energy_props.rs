mod common;

use common::{random_mesh, rng, space};
use proptest::prelude::*;
use rand::Rng;
use vadapt::driver::{run, RunOptions};
use vadapt::energy::{Diffusion, Load, Reaction};
use vadapt::mesh::{prolong, refine_nvb, Domain};
use vadapt::{CoeffVector, Criterion, Discretization, DriverConfig, Problem, ProblemId};

fn fd_gradient(disc: &Discretization, u: &[f64], h: f64) -> Vec<f64> {
    let mut x = u.to_vec();
    (0..u.len())
        .map(|i| {
            x[i] = u[i] + h;
            let up = disc.energy(&x).unwrap();
            x[i] = u[i] - h;
            let down = disc.energy(&x).unwrap();
            x[i] = u[i];
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn assembled_gradient_matches_central_differences(seed in any::<u64>(), which in 0usize..3, singular in any::<bool>()) {
        let mut r = rng(seed);
        let mesh = random_mesh(&mut r, Domain::LShape, 1, 2);
        let s = space(mesh);
        prop_assume!(s.dim() > 0 && s.dim() <= 200);
        let reaction = [Reaction::Cubic, Reaction::AbsQuadratic, Reaction::Exponential][which];
        let load = if singular { Load::SingularManufactured } else { Load::Constant(r.gen_range(-2.0..2.0)) };
        let disc = Discretization::new(s, Problem::new(Domain::LShape, Diffusion::identity(), reaction, load)).unwrap();
        let u: Vec<f64> = (0..disc.dim()).map(|_| r.gen_range(-1.5..1.5)).collect();
        let g = disc.gradient(&u).unwrap();
        let fd = fd_gradient(&disc, &u, 1e-5);
        let err = rel_diff(&fd, &g);
        prop_assert!(err <= 1e-6, "{reaction:?}: relative error {err}");
    }

    /// Exact whenever the element integrands stay polynomials of degree at
    /// most six; `|u| u` qualifies only for one-signed `u`.
    #[test]
    fn prolonged_iterate_keeps_its_energy(seed in any::<u64>(), which in 0usize..3) {
        let mut r = rng(seed);
        let coarse = random_mesh(&mut r, Domain::LShape, 1, 1);
        let marked: Vec<usize> = (0..coarse.num_edges()).filter(|_| r.gen_bool(0.3)).collect();
        let (fine, p) = refine_nvb(&coarse, &marked).unwrap();
        let reaction = [Reaction::Linear(0.7), Reaction::Cubic, Reaction::AbsQuadratic][which];
        let problem = Problem::new(Domain::LShape, Diffusion::identity(), reaction, Load::Constant(1.0));
        let (cs, fs) = (space(coarse), space(fine));
        let lo = if reaction == Reaction::AbsQuadratic { 0.0 } else { -1.0 };
        let u = CoeffVector((0..cs.dim()).map(|_| r.gen_range(lo..1.0)).collect());
        let pu = prolong(&u, &cs, &p, &fs).unwrap();
        let e0 = Discretization::new(cs, problem.clone()).unwrap().energy(&u).unwrap();
        let e1 = Discretization::new(fs, problem).unwrap().energy(&pu).unwrap();
        prop_assert!((e1 - e0).abs() <= 1e-12 * e0.abs().max(1e-300), "{e0} vs {e1}");
    }
}

fn run_small(id: ProblemId, n_max: usize) -> vadapt::driver::RunOutput {
    let mut cfg = DriverConfig::catalog_defaults(id, Criterion::TailOff);
    cfg.n_max = n_max;
    run(&cfg, RunOptions::default()).unwrap()
}

/// Warm starts carry the previous energy over, and final energies never
/// increase from one mesh to the next.
#[test]
fn catalog_runs_preserve_energy_across_refinement() {
    for id in ProblemId::ALL.into_iter().filter(|&id| id != ProblemId::NlSingular) {
        let out = run_small(id, 5_000);
        assert!(out.records.len() >= 3, "{id:?}");
        for w in out.records.windows(2) {
            let (prev, next) = (&w[0], &w[1]);
            assert!(next.ndof > prev.ndof);
            let mismatch = (next.initial_energy - prev.energy).abs() / prev.energy.abs();
            assert!(mismatch <= 1e-12, "{id:?} step {}: {mismatch:e}", next.step);
            assert!(
                next.energy <= prev.energy + 1e-12 * prev.energy.abs(),
                "{id:?} step {}",
                next.step
            );
        }
    }
}

/// With a singular load the quadrature of `∫ f v` on the corner elements
/// changes under refinement, so the warm-start energy is only preserved up
/// to a quadrature error that shrinks as the corner is refined.
#[test]
fn singular_load_mismatch_shrinks_with_corner_refinement() {
    let out = run_small(ProblemId::NlSingular, 5_000);
    let mismatches: Vec<f64> = out
        .records
        .windows(2)
        .map(|w| (w[1].initial_energy - w[0].energy).abs() / w[0].energy.abs())
        .collect();
    assert!(mismatches.len() >= 3);
    assert!(mismatches.windows(2).all(|m| m[1] < m[0]), "{mismatches:?}");
    for w in out.records.windows(2) {
        assert!(w[1].energy <= w[0].energy + 1e-12 * w[0].energy.abs());
    }
}
