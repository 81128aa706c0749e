use super::{max_abs, Decision, FixedIterations, SolverError, SolverTrace, Stopper};
use crate::energy::{dot, SparseOperator};
use crate::mesh::CoeffVector;

/// Energies are updated incrementally and recomputed from scratch this often.
const RESYNC_EVERY: usize = 50;

/// Relative residual below which CG counts as converged to machine precision.
const ROUNDOFF: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub enum Preconditioner {
    Identity,
    /// Jacobi preconditioner; holds the diagonal of the system matrix.
    Diagonal(Vec<f64>),
}

impl Preconditioner {
    pub fn diagonal_of(a: &SparseOperator) -> Result<Self, SolverError> {
        let d = a.diagonal();
        Self::check(&d)?;
        Ok(Preconditioner::Diagonal(d))
    }

    fn check(d: &[f64]) -> Result<(), SolverError> {
        match d.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
            Some(index) => Err(SolverError::BadPreconditioner { index, value: d[index] }),
            None => Ok(()),
        }
    }

    fn apply(&self, r: &[f64], z: &mut [f64]) {
        match self {
            Preconditioner::Identity => z.copy_from_slice(r),
            Preconditioner::Diagonal(d) => {
                for ((zi, ri), di) in z.iter_mut().zip(r).zip(d) {
                    *zi = ri / di;
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CgOptions {
    /// Iteration cap; defaults to `10 d + 200` for a system of dimension `d`.
    pub max_iter: Option<usize>,
}

fn quadratic_energy(a: &SparseOperator, b: &[f64], x: &[f64], ax: &mut [f64]) -> f64 {
    a.apply(x, ax);
    0.5 * dot(x, ax) - dot(b, x)
}

/// Preconditioned CG for `A x = b`, i.e. minimization of
/// `E(x) = ½ xᵀA x - bᵀx`, starting from `x0`.
///
/// Returns the iterate selected by `stopper` and the trace of every
/// iteration performed. Once the residual drops to roundoff level
/// (`‖r‖ ≤ 1e-14 ‖b‖`) no further step is meaningful, and the current
/// iterate is returned regardless of the stopper.
pub fn cg_run(
    a: &SparseOperator,
    b: &[f64],
    x0: &CoeffVector,
    precond: &Preconditioner,
    stopper: &mut dyn Stopper,
    opts: CgOptions,
) -> Result<(CoeffVector, SolverTrace), SolverError> {
    let n = a.dim();
    for got in [b.len(), x0.len()] {
        if got != n {
            return Err(SolverError::DimensionMismatch { expected: n, got });
        }
    }
    if let Preconditioner::Diagonal(d) = precond {
        if d.len() != n {
            return Err(SolverError::DimensionMismatch {
                expected: n,
                got: d.len(),
            });
        }
        Preconditioner::check(d)?;
    }
    let cap = opts.max_iter.unwrap_or(10 * n + 200);

    let mut x = x0.0.clone();
    let mut ax = vec![0.0; n];
    let mut energy = quadratic_energy(a, b, &x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let floor = ROUNDOFF * dot(b, b).sqrt();

    let mut trace = SolverTrace::new(n);
    trace.update_norms_sq.push(0.0);
    trace.record(energy, &r, &x);

    loop {
        let k = trace.n();
        if let Decision::Stop(m) = stopper.decide(&trace) {
            let u = trace.take(m)?;
            trace.clear_iterates();
            return Ok((CoeffVector(u), trace));
        }
        if trace.grad_norm[k] <= floor {
            let u = trace.take(k)?;
            trace.clear_iterates();
            return Ok((CoeffVector(u), trace));
        }
        if k >= cap {
            return Err(SolverError::IterationCap {
                cap,
                energy,
                grad_inf: max_abs(&r),
            });
        }
        trace.trim(stopper.min_retained(k));

        a.apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(SolverError::NotPositiveDefinite {
                iteration: k + 1,
                curvature: pap,
            });
        }
        let alpha = rz / pap;
        if !alpha.is_finite() {
            return Err(SolverError::NonFinite { iteration: k + 1 });
        }
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let step_sq = alpha * alpha * pap;
        if (k + 1).is_multiple_of(RESYNC_EVERY) {
            energy = quadratic_energy(a, b, &x, &mut ax);
        } else {
            energy -= 0.5 * step_sq;
        }
        if !energy.is_finite() {
            return Err(SolverError::NonFinite { iteration: k + 1 });
        }
        trace.update_norms_sq.push(step_sq);
        trace.record(energy, &r, &x);

        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
}

/// Runs diagonally preconditioned CG on `A x = b` and plain CG on the
/// symmetrically scaled system `D^{-1/2} A D^{-1/2} y = D^{-1/2} b` for
/// `iterations` steps. Returns the largest relative difference between the
/// two energy sequences, which coincide in exact arithmetic.
pub fn pcg_transform_consistency(
    a: &SparseOperator,
    b: &[f64],
    precond: &Preconditioner,
    iterations: usize,
) -> Result<f64, SolverError> {
    let n = a.dim();
    let d = match precond {
        Preconditioner::Identity => vec![1.0; n],
        Preconditioner::Diagonal(d) => d.clone(),
    };
    let s: Vec<f64> = d.iter().map(|v| 1.0 / v.sqrt()).collect();
    let mut triplets = Vec::with_capacity(a.nnz());
    for r in 0..n {
        triplets.extend(a.row(r).map(|(c, v)| (r, c, s[r] * v * s[c])));
    }
    let scaled = SparseOperator::from_triplets(n, triplets);
    let b_scaled: Vec<f64> = b.iter().zip(&s).map(|(bi, si)| bi * si).collect();
    let zero = CoeffVector(vec![0.0; n]);
    let opts = CgOptions::default();

    let (_, t1) = cg_run(a, b, &zero, precond, &mut FixedIterations(iterations), opts)?;
    let (_, t2) = cg_run(
        &scaled,
        &b_scaled,
        &zero,
        &Preconditioner::Identity,
        &mut FixedIterations(iterations),
        opts,
    )?;
    let scale = t1
        .energies
        .iter()
        .fold(0.0f64, |m, e| m.max(e.abs()))
        .max(f64::MIN_POSITIVE);
    let len = t1.energies.len().min(t2.energies.len());
    Ok(t1.energies[..len]
        .iter()
        .zip(&t2.energies[..len])
        .map(|(e1, e2)| (e1 - e2).abs() / scale)
        .fold(0.0, f64::max))
}
