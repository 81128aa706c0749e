use std::sync::Arc;
use std::time::Instant;

use super::{ConfigError, DriverConfig};
use crate::adaptivity::{compute_indicators, doerfler_mark};
use crate::energy::{Discretization, SparseOperator};
use crate::error::{Error, Result};
use crate::mesh::{prolong, refine_nvb, refine_uniform, CoeffVector, Mesh, P1Space};
use crate::solver::{
    cg_run, ncg_run, CgOptions, Decision, NcgOptions, Preconditioner, SolverError, SolverTrace, Stopper,
};
use crate::stopping::{Criterion, StoppingConfig, StoppingRule};

/// One row of the convergence table.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRecord {
    pub step: usize,
    pub ndof: usize,
    /// `E(u*_N)`.
    pub energy: f64,
    /// Solver iterations on this mesh, lookahead steps included.
    pub iters: usize,
    /// Final lookahead delay (relative criterion only).
    pub delay: Option<usize>,
    /// `2 E(u*_N) + ref`, the squared energy error when `ref` is the squared
    /// norm of the exact solution.
    pub err_total_sq: Option<f64>,
    /// Squared energy norm of `u_h - u*_N`.
    pub err_iter_sq: Option<f64>,
    /// `‖u - u*_N‖_a²` for a known exact solution `u`.
    pub err_exact_sq: Option<f64>,
    pub wall_s: Option<f64>,
    /// Energy of the warm start on this mesh.
    pub initial_energy: f64,
    /// Edges marked for refinement after this step.
    pub marked: usize,
}

/// Where the value in `err_total_sq` comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReferenceKind {
    /// Known high-accuracy value for the problem.
    Catalog,
    /// `ref_value` from the configuration.
    Override,
    /// `-2 E` on a mesh two adaptive rounds finer than the last record.
    SelfReference,
    None,
}

impl ReferenceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ReferenceKind::Catalog => "catalog",
            ReferenceKind::Override => "override",
            ReferenceKind::SelfReference => "self-reference",
            ReferenceKind::None => "none",
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Keep every mesh solved on, for snapshots.
    pub keep_meshes: bool,
}

#[derive(Debug)]
pub struct RunOutput {
    pub config: DriverConfig,
    pub records: Vec<ConvergenceRecord>,
    /// Meshes of the records when requested.
    pub meshes: Vec<Arc<Mesh>>,
    pub reference: ReferenceKind,
    pub reference_value: Option<f64>,
    pub final_space: P1Space,
    pub final_u: CoeffVector,
    /// Set when a solve aborted; `records` then holds the completed steps.
    pub error: Option<Error>,
}

/// Stops once the residual 2-norm is at most `tol`.
struct AbsoluteResidual(f64);

impl Stopper for AbsoluteResidual {
    fn decide(&mut self, trace: &SolverTrace) -> Decision {
        if trace.grad_norm[trace.n()] <= self.0 {
            Decision::Stop(trace.n())
        } else {
            Decision::Continue
        }
    }
}

/// Squared `K`-norm of `u_h - u*`, with `u_h` from CG started at `u*` and
/// run to a residual of `1e-12 ‖b‖`.
pub fn iteration_error_oracle(
    k: &SparseOperator,
    b: &[f64],
    u: &[f64],
    precond: &Preconditioner,
) -> std::result::Result<f64, SolverError> {
    let tol = 1e-12 * crate::energy::dot(b, b).sqrt();
    let opts = CgOptions {
        max_iter: Some(50 * k.dim() + 1000),
    };
    let (uh, _) = cg_run(
        k,
        b,
        &CoeffVector(u.to_vec()),
        precond,
        &mut AbsoluteResidual(tol),
        opts,
    )?;
    let diff: Vec<f64> = uh.iter().zip(u).map(|(a, b)| a - b).collect();
    Ok(k.quadratic_form(&diff))
}

struct Solved {
    u: CoeffVector,
    iters: usize,
    delay: Option<usize>,
}

fn solve(disc: &Discretization, u0: &CoeffVector, cfg: &StoppingConfig, preconditioned: bool) -> Result<Solved> {
    let mut rule = StoppingRule::new(*cfg, disc.dim())?;
    let (u, trace) = match disc.system_matrix() {
        Some(k) => {
            let precond = if preconditioned {
                Preconditioner::diagonal_of(k)?
            } else {
                Preconditioner::Identity
            };
            cg_run(k, disc.load(), u0, &precond, &mut rule, CgOptions::default())?
        }
        None => ncg_run(disc, u0, &mut rule, NcgOptions::default())?,
    };
    let delay = (cfg.kind == Criterion::Relative).then(|| rule.delay());
    Ok(Solved {
        u,
        iters: trace.n(),
        delay,
    })
}

/// Marks by Dörfler and refines; `None` when nothing is marked.
fn adapt(disc: &Discretization, u: &CoeffVector, theta: f64) -> Result<Option<(P1Space, CoeffVector, usize)>> {
    let indicators = compute_indicators(disc, u)?;
    let marked = doerfler_mark(&indicators, theta);
    if marked.is_empty() {
        return Ok(None);
    }
    let (fine, p) = refine_nvb(disc.mesh(), &marked)?;
    let fine_space = P1Space::new(Arc::new(fine));
    let u_fine = prolong(u, disc.space(), &p, &fine_space)?;
    Ok(Some((fine_space, u_fine, marked.len())))
}

/// Solve → mark → refine → prolong until the next mesh would exceed
/// `N_max`, the relative energy change stalls, or nothing is marked.
pub fn run(config: &DriverConfig, opts: RunOptions) -> Result<RunOutput> {
    config.validate()?;
    let id = config.problem;
    let problem = id.problem();
    let preconditioned = id.preconditioned();

    let mut mesh = id.domain().initial_mesh();
    for _ in 0..config.seed_sweeps {
        mesh = refine_uniform(&mesh).0;
    }
    let mut space = P1Space::new(Arc::new(mesh));
    let mut u = space.zeros();

    if !problem.is_linear() {
        // warm-up: loose default solve and one adaptive round
        let warm = StoppingConfig {
            kind: Criterion::Default,
            n_min: 0,
            g_tol: 1e-5,
            ..config.stopping
        };
        let disc = Discretization::new(space.clone(), problem.clone())?;
        let solved = solve(&disc, &u, &warm, false)?;
        if let Some((s, v, _)) = adapt(&disc, &solved.u, config.theta)? {
            space = s;
            u = v;
        } else {
            u = solved.u;
        }
    }
    if config.n_max < space.dim() {
        return Err(ConfigError::NmaxBelowInitial {
            n_max: config.n_max,
            initial: space.dim(),
        }
        .into());
    }

    let (mut reference, mut reference_value) = match (config.ref_value, id.reference_value()) {
        (Some(r), _) => (ReferenceKind::Override, Some(r)),
        (None, Some(r)) => (ReferenceKind::Catalog, Some(r)),
        (None, None) => (ReferenceKind::None, None),
    };

    let mut out = RunOutput {
        config: config.clone(),
        records: Vec::new(),
        meshes: Vec::new(),
        reference,
        reference_value,
        final_space: space.clone(),
        final_u: u.clone(),
        error: None,
    };

    let mut step = 0;
    let mut pending: Option<(P1Space, CoeffVector)> = None;
    loop {
        if space.dim() > config.n_max {
            pending = Some((space.clone(), u.clone()));
            break;
        }
        let start = Instant::now();
        let disc = Discretization::new(space.clone(), problem.clone())?;
        let initial_energy = disc.energy(&u)?;
        let solved = match solve(&disc, &u, &config.stopping, preconditioned) {
            Ok(s) => s,
            Err(e) => {
                out.error = Some(e);
                break;
            }
        };
        let energy = disc.energy(&solved.u)?;
        let err_iter_sq = match (config.diagnostics, disc.system_matrix()) {
            (true, Some(k)) => {
                let precond = if preconditioned {
                    Preconditioner::diagonal_of(k)?
                } else {
                    Preconditioner::Identity
                };
                Some(iteration_error_oracle(k, disc.load(), &solved.u, &precond)?)
            }
            _ => None,
        };
        let err_exact_sq = problem.exact.map(|ex| disc.exact_error_sq(&solved.u, ex));
        let next = adapt(&disc, &solved.u, config.theta)?;
        let wall_s = config.timing.then(|| start.elapsed().as_secs_f64());

        let previous = out.records.last().map(|r| r.energy);
        out.records.push(ConvergenceRecord {
            step,
            ndof: space.dim(),
            energy,
            iters: solved.iters,
            delay: solved.delay,
            err_total_sq: reference_value.map(|r| 2.0 * energy + r),
            err_iter_sq,
            err_exact_sq,
            wall_s,
            initial_energy,
            marked: next.as_ref().map_or(0, |n| n.2),
        });
        if opts.keep_meshes {
            out.meshes.push(space.mesh_arc().clone());
        }
        out.final_space = space.clone();
        out.final_u = solved.u.clone();

        let stalled = match (config.rel_energy_stop, previous) {
            (Some(tol), Some(prev)) => (energy - prev).abs() <= tol * prev.abs(),
            _ => false,
        };
        let Some((s, v, _)) = next else { break };
        if stalled {
            break;
        }
        space = s;
        u = v;
        step += 1;
    }

    let wants_self_reference = config.diagnostics && reference == ReferenceKind::None && problem.exact.is_none();
    if wants_self_reference && out.error.is_none() {
        if let Some((mut s, mut v)) = pending {
            let mut energy = None;
            for round in 0..2 {
                let disc = Discretization::new(s.clone(), problem.clone())?;
                let solved = solve(&disc, &v, &config.stopping, preconditioned)?;
                energy = Some(disc.energy(&solved.u)?);
                if round == 0 {
                    match adapt(&disc, &solved.u, config.theta)? {
                        Some((s2, v2, _)) => {
                            s = s2;
                            v = v2;
                        }
                        None => break,
                    }
                }
            }
            if let Some(e) = energy {
                reference = ReferenceKind::SelfReference;
                reference_value = Some(-2.0 * e);
                for r in &mut out.records {
                    r.err_total_sq = Some(2.0 * r.energy - 2.0 * e);
                }
                out.reference = reference;
                out.reference_value = reference_value;
            }
        }
    }
    Ok(out)
}
