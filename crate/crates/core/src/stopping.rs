//! Energy-based stopping criteria and the adaptive delay controller.

use std::fmt;
use std::str::FromStr;

use crate::driver::ConfigError;
use crate::solver::{Decision, SolverTrace, Stopper};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// Per-step energy drop against the averaged accumulated drop.
    TailOff,
    /// Energy change over a lookahead window relative to `|E|`.
    Relative,
    /// Max-norm of the energy gradient.
    Default,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::TailOff, Criterion::Relative, Criterion::Default];

    pub fn as_str(self) -> &'static str {
        match self {
            Criterion::TailOff => "tail_off",
            Criterion::Relative => "relative",
            Criterion::Default => "default",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Criterion {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownCriterion(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StoppingConfig {
    pub kind: Criterion,
    pub alpha_e: f64,
    pub alpha_gamma: f64,
    pub n_min: usize,
    pub n_batch: usize,
    pub d_init: usize,
    pub delta_d: usize,
    pub tau: f64,
    pub g_tol: f64,
    /// Compare `|E(u^n) - E(u^{n+d})|` with `|E(u^n)|` instead of the signed
    /// form suited to linear problems.
    pub abs_variant: bool,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        Self {
            kind: Criterion::TailOff,
            alpha_e: 0.1,
            alpha_gamma: 0.1,
            n_min: 10,
            n_batch: 1,
            d_init: 10,
            delta_d: 10,
            tau: 1.01,
            g_tol: 1e-8,
            abs_variant: false,
        }
    }
}

impl StoppingConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |name: &'static str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    key: name,
                    value: v.to_string(),
                    expected: "in (0, 1]",
                })
            }
        };
        unit("alpha_E", self.alpha_e)?;
        unit("alpha_gamma", self.alpha_gamma)?;
        let at_least_one = |name: &'static str, v: usize| {
            if v >= 1 {
                Ok(())
            } else {
                Err(ConfigError::OutOfRange {
                    key: name,
                    value: v.to_string(),
                    expected: ">= 1",
                })
            }
        };
        at_least_one("n_batch", self.n_batch)?;
        at_least_one("d_init", self.d_init)?;
        at_least_one("delta_d", self.delta_d)?;
        if !(self.tau > 1.0 && self.tau.is_finite()) {
            return Err(ConfigError::OutOfRange {
                key: "tau",
                value: self.tau.to_string(),
                expected: "> 1",
            });
        }
        if !(self.g_tol >= 0.0 && self.g_tol.is_finite()) {
            return Err(ConfigError::OutOfRange {
                key: "g_tol",
                value: self.g_tol.to_string(),
                expected: ">= 0",
            });
        }
        Ok(())
    }
}

/// Whether `n` is an evaluation point of the batched tail-off test.
pub fn tail_off_due(n: usize, cfg: &StoppingConfig) -> bool {
    n > cfg.n_min && (n - cfg.n_min).is_multiple_of(cfg.n_batch)
}

/// Tail-off test at the latest iterate `n` of `energies`:
/// `E^{n-1} - E^n < α_E (E^{n_min} - E^n) / (n - n_min)`.
///
/// Returns `false` at points that are not due for evaluation.
pub fn tail_off_should_stop(energies: &[f64], cfg: &StoppingConfig) -> bool {
    let Some(n) = energies.len().checked_sub(1) else {
        return false;
    };
    if !tail_off_due(n, cfg) {
        return false;
    }
    let step = energies[n - 1] - energies[n];
    let average = (energies[cfg.n_min] - energies[n]) / (n - cfg.n_min) as f64;
    step < cfg.alpha_e * average
}

/// Lookahead state of the relative criterion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DelayState {
    pub d: usize,
    /// Last HS estimate compared in the growth test.
    pub last_xi: Option<f64>,
}

impl DelayState {
    pub fn new(cfg: &StoppingConfig) -> Self {
        Self {
            d: cfg.d_init,
            last_xi: None,
        }
    }
}

/// Grows the delay at test point `n` while `ξ^d_{n+1} > τ ξ^d_n`.
///
/// Returns `None` when the trace is too short to decide at the current
/// delay; the caller should iterate further and call again.
pub fn delay_update(state: DelayState, energies: &[f64], n: usize, cfg: &StoppingConfig) -> Option<DelayState> {
    let mut s = state;
    loop {
        let xi = |m: usize| 2.0 * (energies[m] - energies[m + s.d]);
        if energies.len() <= n + 1 + s.d {
            return None;
        }
        let (now, next) = (xi(n), xi(n + 1));
        s.last_xi = Some(now);
        if next > cfg.tau * now {
            s.d += cfg.delta_d;
        } else {
            return Some(s);
        }
    }
}

/// Relative energy reduction test between `E^n` and `E^{n+d}`.
pub fn relative_reduction_should_stop(e_n: f64, e_nd: f64, d_n: usize, cfg: &StoppingConfig) -> bool {
    assert!(d_n > 0, "relative criterion needs at least one degree of freedom");
    let gamma_sq = cfg.alpha_gamma / d_n as f64;
    if cfg.abs_variant {
        (e_n - e_nd).abs() <= gamma_sq * e_n.abs()
    } else {
        e_n - e_nd <= -gamma_sq * e_n
    }
}

pub fn default_should_stop(grad_inf_norm: f64, cfg: &StoppingConfig) -> bool {
    grad_inf_norm <= cfg.g_tol
}

/// Stateful [`Stopper`] for one solve on one mesh.
#[derive(Clone, Debug)]
pub struct StoppingRule {
    cfg: StoppingConfig,
    d_n: usize,
    delay: DelayState,
    /// Next iterate the relative criterion will test.
    candidate: usize,
}

impl StoppingRule {
    pub fn new(cfg: StoppingConfig, d_n: usize) -> Result<Self, ConfigError> {
        cfg.validate()?;
        if cfg.kind == Criterion::Relative && d_n == 0 {
            return Err(ConfigError::NoDegreesOfFreedom);
        }
        Ok(Self {
            cfg,
            d_n,
            delay: DelayState::new(&cfg),
            candidate: cfg.n_min + 1,
        })
    }

    pub fn config(&self) -> &StoppingConfig {
        &self.cfg
    }

    /// Current lookahead delay of the relative criterion.
    pub fn delay(&self) -> usize {
        self.delay.d
    }
}

impl Stopper for StoppingRule {
    fn decide(&mut self, trace: &SolverTrace) -> Decision {
        let k = trace.n();
        match self.cfg.kind {
            Criterion::TailOff => {
                if tail_off_should_stop(&trace.energies, &self.cfg) {
                    Decision::Stop(k)
                } else {
                    Decision::Continue
                }
            }
            Criterion::Default => {
                if k >= self.cfg.n_min && default_should_stop(trace.grad_inf[k], &self.cfg) {
                    Decision::Stop(k)
                } else {
                    Decision::Continue
                }
            }
            Criterion::Relative => loop {
                let n = self.candidate;
                let Some(s) = delay_update(self.delay, &trace.energies, n, &self.cfg) else {
                    return Decision::Continue;
                };
                self.delay = s;
                let (e_n, e_nd) = (trace.energies[n], trace.energies[n + s.d]);
                if relative_reduction_should_stop(e_n, e_nd, self.d_n, &self.cfg) {
                    return Decision::Stop(n);
                }
                self.candidate += 1;
            },
        }
    }

    fn min_retained(&self, current: usize) -> usize {
        match self.cfg.kind {
            Criterion::Relative => self.candidate.min(current),
            _ => current,
        }
    }
}
