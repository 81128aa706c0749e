use std::fmt;
use std::str::FromStr;

use super::ConfigError;
use crate::energy::{Diffusion, ExactSolution, Load, Problem, Reaction};
use crate::mesh::Domain;
use crate::stopping::{Criterion, StoppingConfig};

/// The eight benchmark problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProblemId {
    /// `-Δu + u³ = 1` on the L-shape.
    NlCubic,
    /// `-Δu + |u|u = 1` on the L-shape.
    NlAbs,
    /// `-Δu + eᵘ - 1 = 1` on the L-shape.
    NlExp,
    /// `-Δu + u³ = f` on the L-shape with a singular manufactured solution.
    NlSingular,
    /// `-div(diag(1, 1e-2)∇u) + u = 1` on the unit square.
    LinAniso,
    /// `-1e-2 Δu + u = 1` on the unit square.
    LinSmall,
    /// `-div(κ∇u) + u = 1` with piecewise constant `κ` on the unit square.
    LinSubdomains,
    /// `-Δu = 1` on the L-shape.
    LinLshape,
}

/// `(Ω₁, 10)`, `(Ω₂, 0.1)`, `(Ω₃, 0.05)` as `[x0, x1, y0, y1]` rectangles.
pub const SUBDOMAINS: [([f64; 4], f64); 3] = [
    ([0.1, 0.3, 0.1, 0.2], 10.0),
    ([0.4, 0.7, 0.1, 0.3], 0.1),
    ([0.8, 1.0, 0.7, 1.0], 0.05),
];

impl ProblemId {
    pub const ALL: [ProblemId; 8] = [
        ProblemId::NlCubic,
        ProblemId::NlAbs,
        ProblemId::NlExp,
        ProblemId::NlSingular,
        ProblemId::LinAniso,
        ProblemId::LinSmall,
        ProblemId::LinSubdomains,
        ProblemId::LinLshape,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::NlCubic => "nl-cubic",
            ProblemId::NlAbs => "nl-abs",
            ProblemId::NlExp => "nl-exp",
            ProblemId::NlSingular => "nl-singular",
            ProblemId::LinAniso => "lin-aniso",
            ProblemId::LinSmall => "lin-small",
            ProblemId::LinSubdomains => "lin-subdomains",
            ProblemId::LinLshape => "lin-lshape",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ProblemId::NlCubic => "L-shape, A = I, phi(u) = u^3, f = 1",
            ProblemId::NlAbs => "L-shape, A = I, phi(u) = |u|u, f = 1",
            ProblemId::NlExp => "L-shape, A = I, phi(u) = exp(u) - 1, f = 1",
            ProblemId::NlSingular => "L-shape, A = I, phi(u) = u^3, singular manufactured solution",
            ProblemId::LinAniso => "square, A = diag(1, 1e-2), c = 1, f = 1",
            ProblemId::LinSmall => "square, A = 1e-2 I, c = 1, f = 1",
            ProblemId::LinSubdomains => "square, A = kappa I with kappa in {1, 10, 0.1, 0.05}, c = 1, f = 1",
            ProblemId::LinLshape => "L-shape, A = I, c = 0, f = 1",
        }
    }

    pub fn is_linear(self) -> bool {
        matches!(
            self,
            ProblemId::LinAniso | ProblemId::LinSmall | ProblemId::LinSubdomains | ProblemId::LinLshape
        )
    }

    pub fn domain(self) -> Domain {
        match self {
            ProblemId::LinAniso | ProblemId::LinSmall => Domain::Square,
            ProblemId::LinSubdomains => Domain::SquareGrid(10),
            _ => Domain::LShape,
        }
    }

    pub fn problem(self) -> Problem {
        let one = Load::Constant(1.0);
        let id = Diffusion::identity();
        let domain = self.domain();
        match self {
            ProblemId::NlCubic => Problem::new(domain, id, Reaction::Cubic, one),
            ProblemId::NlAbs => Problem::new(domain, id, Reaction::AbsQuadratic, one),
            ProblemId::NlExp => Problem::new(domain, id, Reaction::Exponential, one),
            ProblemId::NlSingular => Problem::new(domain, id, Reaction::Cubic, Load::SingularManufactured)
                .with_exact(ExactSolution::Singular),
            ProblemId::LinAniso => Problem::new(
                domain,
                Diffusion::Constant([[1.0, 0.0], [0.0, 1e-2]]),
                Reaction::Linear(1.0),
                one,
            ),
            ProblemId::LinSmall => Problem::new(domain, Diffusion::isotropic(1e-2), Reaction::Linear(1.0), one),
            ProblemId::LinSubdomains => Problem::new(
                domain,
                Diffusion::Subdomains {
                    background: 1.0,
                    regions: SUBDOMAINS.to_vec(),
                },
                Reaction::Linear(1.0),
                one,
            ),
            ProblemId::LinLshape => Problem::new(domain, id, Reaction::Linear(0.0), one),
        }
    }

    /// Squared energy norm of the exact solution, where a high-accuracy
    /// value is known.
    pub fn reference_value(self) -> Option<f64> {
        match self {
            ProblemId::LinAniso => Some(0.07121857719182778),
            ProblemId::LinSmall => Some(0.6509451171871544),
            ProblemId::LinSubdomains => Some(0.04076358619422494),
            ProblemId::LinLshape => Some(0.214075802220546),
            _ => None,
        }
    }

    /// Whether CG is run with the Jacobi preconditioner.
    pub fn preconditioned(self) -> bool {
        self == ProblemId::LinSubdomains
    }

    pub fn default_seed_sweeps(self) -> usize {
        match self {
            ProblemId::LinSubdomains => 0,
            p if p.is_linear() => 1,
            _ => 3,
        }
    }

    /// Control parameters used for this problem in the reference study.
    pub fn stopping(self, kind: Criterion) -> StoppingConfig {
        let base = StoppingConfig {
            kind,
            abs_variant: !self.is_linear(),
            g_tol: 1e-8,
            ..StoppingConfig::default()
        };
        if self.is_linear() {
            let (n_min, alpha_gamma) = match (self, kind) {
                (ProblemId::LinSmall, Criterion::Relative) => (5, 0.1),
                (ProblemId::LinSubdomains, _) => (5, 0.1),
                (ProblemId::LinLshape, Criterion::Relative) => (10, 0.01),
                _ => (10, 0.1),
            };
            return StoppingConfig {
                alpha_e: 0.1,
                alpha_gamma,
                n_min,
                n_batch: 2,
                d_init: 10,
                delta_d: 10,
                tau: 1.01,
                ..base
            };
        }
        let exp = self == ProblemId::NlExp;
        StoppingConfig {
            alpha_e: 0.01,
            alpha_gamma: if exp { 0.01 } else { 0.1 },
            n_min: 10,
            n_batch: 5,
            d_init: if exp { 50 } else { 10 },
            delta_d: 5,
            tau: if exp { 1.001 } else { 1.01 },
            ..base
        }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemId {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| ConfigError::UnknownProblem(s.to_string()))
    }
}
