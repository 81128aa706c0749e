use super::{max_abs, Decision, SolverError, SolverTrace, Stopper};
use crate::energy::{dot, Discretization, SparseOperator};
use crate::mesh::CoeffVector;

/// Smooth objective with gradient. Non-finite values are allowed and are
/// treated as "too far" by the line search.
pub trait Objective {
    fn dim(&self) -> usize;
    /// Writes the gradient at `x` into `grad` and returns the value.
    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64;
}

impl Objective for Discretization {
    fn dim(&self) -> usize {
        Discretization::dim(self)
    }

    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.energy_and_gradient(x, grad).unwrap_or(f64::INFINITY)
    }
}

/// `½ xᵀA x - bᵀx`.
pub struct QuadraticObjective<'a> {
    pub a: &'a SparseOperator,
    pub b: &'a [f64],
}

impl Objective for QuadraticObjective<'_> {
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn eval(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.a.apply(x, grad);
        let e = 0.5 * dot(x, grad) - dot(self.b, x);
        for (g, b) in grad.iter_mut().zip(self.b) {
            *g -= b;
        }
        e
    }
}

#[derive(Clone, Copy, Debug)]
pub struct NcgOptions {
    /// Sufficient decrease constant.
    pub c1: f64,
    /// Curvature constant of the strong Wolfe conditions.
    pub c2: f64,
    /// Iteration cap; defaults to `10 d + 200`.
    pub max_iter: Option<usize>,
    /// Restart period; defaults to the dimension.
    pub restart: Option<usize>,
    /// Trial steps allowed in bracketing and in zooming.
    pub max_line_steps: usize,
}

impl Default for NcgOptions {
    fn default() -> Self {
        Self {
            c1: 1e-4,
            c2: 0.1,
            max_iter: None,
            restart: None,
            max_line_steps: 40,
        }
    }
}

struct Point {
    alpha: f64,
    f: f64,
    /// Directional derivative.
    df: f64,
    grad: Vec<f64>,
}

struct LineSearch<'a, O: Objective + ?Sized> {
    obj: &'a O,
    x: &'a [f64],
    dir: &'a [f64],
    buf: Vec<f64>,
    f0: f64,
    df0: f64,
    /// Energy slack below which value comparisons are roundoff noise.
    noise: f64,
}

/// Relative size of the energy noise floor.
const VALUE_NOISE: f64 = 1e-13;

impl<O: Objective + ?Sized> LineSearch<'_, O> {
    fn at(&mut self, alpha: f64) -> Point {
        for ((b, x), d) in self.buf.iter_mut().zip(self.x).zip(self.dir) {
            *b = x + alpha * d;
        }
        let mut grad = vec![0.0; self.buf.len()];
        let f = self.obj.eval(&self.buf, &mut grad);
        let df = if f.is_finite() { dot(&grad, self.dir) } else { f64::NAN };
        Point { alpha, f, df, grad }
    }

    /// Armijo condition, or its derivative form once the energy decrease is
    /// at roundoff level and function values can no longer resolve it.
    fn decreases(&self, p: &Point, c1: f64) -> bool {
        p.f <= self.f0 + c1 * p.alpha * self.df0 || (p.f <= self.f0 + self.noise && p.df <= (2.0 * c1 - 1.0) * self.df0)
    }

    fn worse(&self, p: &Point, reference: &Point) -> bool {
        p.f > reference.f + self.noise
    }
}

/// Minimizer of the cubic interpolating values and slopes at `a` and `b`,
/// or `None` if it is undefined.
fn cubic_min(a: &Point, b: &Point) -> Option<f64> {
    let d1 = a.df + b.df - 3.0 * (a.f - b.f) / (a.alpha - b.alpha);
    let disc = d1 * d1 - a.df * b.df;
    if !(disc >= 0.0) {
        return None;
    }
    let d2 = (b.alpha - a.alpha).signum() * disc.sqrt();
    let t = b.alpha - (b.alpha - a.alpha) * (b.df + d2 - d1) / (b.df - a.df + 2.0 * d2);
    t.is_finite().then_some(t)
}

fn zoom<O: Objective + ?Sized>(
    ls: &mut LineSearch<'_, O>,
    mut lo: Point,
    mut hi: Point,
    opts: &NcgOptions,
) -> Option<Point> {
    let df0 = ls.df0;
    for _ in 0..opts.max_line_steps {
        let (a, b) = (lo.alpha.min(hi.alpha), lo.alpha.max(hi.alpha));
        let width = b - a;
        if width <= f64::EPSILON * b.max(1e-300) {
            return None;
        }
        let mid = 0.5 * (a + b);
        let trial = if hi.f.is_finite() && hi.df.is_finite() {
            cubic_min(&lo, &hi)
                .filter(|t| *t > a + 0.1 * width && *t < b - 0.1 * width)
                .unwrap_or(mid)
        } else {
            mid
        };
        let p = ls.at(trial);
        if !ls.decreases(&p, opts.c1) || ls.worse(&p, &lo) {
            hi = p;
        } else {
            if p.df.abs() <= -opts.c2 * df0 {
                return Some(p);
            }
            if p.df * (hi.alpha - lo.alpha) >= 0.0 {
                hi = lo;
            }
            lo = p;
        }
    }
    None
}

/// Strong Wolfe line search along `dir` from `x`.
fn strong_wolfe<O: Objective + ?Sized>(ls: &mut LineSearch<'_, O>, alpha0: f64, opts: &NcgOptions) -> Option<Point> {
    let df0 = ls.df0;
    let mut prev = Point {
        alpha: 0.0,
        f: ls.f0,
        df: df0,
        grad: Vec::new(),
    };
    let mut alpha = alpha0;
    for i in 0..opts.max_line_steps {
        let p = ls.at(alpha);
        if !ls.decreases(&p, opts.c1) || (i > 0 && ls.worse(&p, &prev)) {
            return zoom(ls, prev, p, opts);
        }
        if p.df.abs() <= -opts.c2 * df0 {
            return Some(p);
        }
        if p.df >= 0.0 {
            return zoom(ls, p, prev, opts);
        }
        prev = p;
        alpha *= 2.0;
    }
    None
}

/// Armijo backtracking, used when the Wolfe search fails.
fn backtrack<O: Objective + ?Sized>(ls: &mut LineSearch<'_, O>, alpha0: f64, opts: &NcgOptions) -> Option<Point> {
    let mut alpha = alpha0;
    for _ in 0..4 * opts.max_line_steps {
        let p = ls.at(alpha);
        if ls.decreases(&p, opts.c1) && p.f <= ls.f0 + ls.noise {
            return Some(p);
        }
        alpha *= 0.5;
    }
    None
}

/// Polak–Ribière-plus nonlinear CG with a strong Wolfe line search.
///
/// Near the minimizer energy differences drown in roundoff; there the line
/// search switches to the derivative form of sufficient decrease and may
/// accept an energy up to `1e-13 |E|` above the current one.
///
/// The direction is reset to steepest descent when the PR coefficient is
/// negative, every `restart` iterations, and whenever it fails to be a
/// descent direction. If neither the Wolfe search nor backtracking finds a
/// lower energy along steepest descent, the run aborts.
pub fn ncg_run<O: Objective + ?Sized>(
    obj: &O,
    x0: &CoeffVector,
    stopper: &mut dyn Stopper,
    opts: NcgOptions,
) -> Result<(CoeffVector, SolverTrace), SolverError> {
    let n = obj.dim();
    if x0.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: x0.len(),
        });
    }
    let cap = opts.max_iter.unwrap_or(10 * n + 200);
    let restart = opts.restart.unwrap_or(n).max(1);

    let mut x = x0.0.clone();
    let mut g = vec![0.0; n];
    let mut f = obj.eval(&x, &mut g);
    if !f.is_finite() {
        return Err(SolverError::NonFinite { iteration: 0 });
    }
    let mut trace = SolverTrace::new(n);
    trace.record(f, &g, &x);

    let mut dir: Vec<f64> = g.iter().map(|v| -v).collect();
    let mut f_prev: Option<f64> = None;
    let mut since_restart = 0;

    loop {
        let k = trace.n();
        if let Decision::Stop(m) = stopper.decide(&trace) {
            let u = trace.take(m)?;
            trace.clear_iterates();
            return Ok((CoeffVector(u), trace));
        }
        if max_abs(&g) == 0.0 {
            let u = trace.take(k)?;
            trace.clear_iterates();
            return Ok((CoeffVector(u), trace));
        }
        if k >= cap {
            return Err(SolverError::IterationCap {
                cap,
                energy: f,
                grad_inf: max_abs(&g),
            });
        }
        trace.trim(stopper.min_retained(k));

        let mut df0 = dot(&g, &dir);
        if !(df0 < 0.0) {
            dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
            df0 = -dot(&g, &g);
            since_restart = 0;
        }
        let alpha0 = match f_prev {
            Some(fp) if fp > f => (1.01 * 2.0 * (f - fp) / df0).min(1.0),
            _ => (1.0 / max_abs(&dir)).min(1.0),
        };
        let alpha0 = if alpha0 > 0.0 && alpha0.is_finite() {
            alpha0
        } else {
            1.0
        };

        let mut ls = LineSearch {
            obj,
            x: &x,
            dir: &dir,
            buf: vec![0.0; n],
            f0: f,
            df0,
            noise: VALUE_NOISE * f.abs(),
        };
        let found = strong_wolfe(&mut ls, alpha0, &opts).or_else(|| backtrack(&mut ls, alpha0, &opts));
        let Some(p) = found else {
            if since_restart == 0 {
                return Err(SolverError::LineSearch {
                    iteration: k + 1,
                    energy: f,
                });
            }
            // retry from steepest descent before giving up
            dir.iter_mut().zip(&g).for_each(|(d, gi)| *d = -gi);
            since_restart = 0;
            f_prev = None;
            continue;
        };

        for (xi, di) in x.iter_mut().zip(&dir) {
            *xi += p.alpha * di;
        }
        let g_new = p.grad;
        f_prev = Some(f);
        f = p.f;
        trace.record(f, &g_new, &x);

        since_restart += 1;
        let gg = dot(&g, &g);
        let beta = if since_restart >= restart {
            0.0
        } else {
            let y: f64 = g_new.iter().zip(&g).map(|(a, b)| a * (a - b)).sum();
            (y / gg).max(0.0)
        };
        if beta == 0.0 {
            since_restart = 0;
        }
        for (d, gi) in dir.iter_mut().zip(&g_new) {
            *d = -gi + beta * *d;
        }
        g = g_new;
    }
}
