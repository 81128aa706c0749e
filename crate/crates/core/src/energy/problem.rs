use std::fmt;
use std::sync::Arc;

use super::manufactured::{manufactured_rhs, singular_gradient, singular_solution};
use super::EnergyError;
use crate::mesh::{Domain, Point};

pub type Tensor = [[f64; 2]; 2];

/// Diffusion coefficient, constant on every element of an admissible mesh.
#[derive(Clone, Debug, PartialEq)]
pub enum Diffusion {
    Constant(Tensor),
    /// `κ(x) I` with `κ` constant on axis-aligned open rectangles
    /// `(x0, x1) x (y0, y1)` and `background` elsewhere.
    Subdomains {
        background: f64,
        regions: Vec<([f64; 4], f64)>,
    },
}

impl Diffusion {
    pub fn identity() -> Self {
        Diffusion::Constant([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn isotropic(k: f64) -> Self {
        Diffusion::Constant([[k, 0.0], [0.0, k]])
    }

    /// Tensor at `p`; meshes are expected to resolve the subdomain
    /// interfaces, so callers pass element centroids.
    pub fn at(&self, p: Point) -> Tensor {
        match self {
            Diffusion::Constant(a) => *a,
            Diffusion::Subdomains { background, regions } => {
                let k = regions
                    .iter()
                    .find(|([x0, x1, y0, y1], _)| p[0] > *x0 && p[0] < *x1 && p[1] > *y0 && p[1] < *y1)
                    .map_or(*background, |(_, k)| *k);
                [[k, 0.0], [0.0, k]]
            }
        }
    }
}

/// Monotone reaction `φ` with potential `Φ` (`Φ' = φ`, `Φ(0) = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Reaction {
    /// `φ(u) = c u`.
    Linear(f64),
    /// `φ(u) = u^3`.
    Cubic,
    /// `φ(u) = |u| u`.
    AbsQuadratic,
    /// `φ(u) = e^u - 1`.
    Exponential,
}

impl Reaction {
    #[inline]
    pub fn phi(self, u: f64) -> f64 {
        match self {
            Reaction::Linear(c) => c * u,
            Reaction::Cubic => u * u * u,
            Reaction::AbsQuadratic => u.abs() * u,
            Reaction::Exponential => u.exp_m1(),
        }
    }

    #[inline]
    pub fn potential(self, u: f64) -> f64 {
        match self {
            Reaction::Linear(c) => 0.5 * c * u * u,
            Reaction::Cubic => 0.25 * u * u * u * u,
            Reaction::AbsQuadratic => u.abs() * u * u / 3.0,
            Reaction::Exponential => u.exp_m1() - u,
        }
    }

    #[inline]
    pub fn dphi(self, u: f64) -> f64 {
        match self {
            Reaction::Linear(c) => c,
            Reaction::Cubic => 3.0 * u * u,
            Reaction::AbsQuadratic => 2.0 * u.abs(),
            Reaction::Exponential => u.exp(),
        }
    }

    pub fn linear_coefficient(self) -> Option<f64> {
        match self {
            Reaction::Linear(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_linear(self) -> bool {
        self.linear_coefficient().is_some()
    }
}

/// Right-hand side `f`.
#[derive(Clone)]
pub enum Load {
    Constant(f64),
    /// Load of the singular manufactured solution with cubic reaction.
    SingularManufactured,
    Function(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Load {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Load::Constant(c) => write!(f, "Constant({c})"),
            Load::SingularManufactured => write!(f, "SingularManufactured"),
            Load::Function(_) => write!(f, "Function(..)"),
        }
    }
}

impl Load {
    pub fn eval(&self, p: Point) -> Result<f64, EnergyError> {
        let v = match self {
            Load::Constant(c) => *c,
            Load::SingularManufactured => manufactured_rhs(p[0], p[1])?,
            Load::Function(f) => f(p[0], p[1]),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EnergyError::NonFiniteLoad { x: p[0], y: p[1] })
        }
    }

    pub fn constant(&self) -> Option<f64> {
        match self {
            Load::Constant(c) => Some(*c),
            _ => None,
        }
    }
}

/// Known exact solutions, for error diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExactSolution {
    Singular,
}

impl ExactSolution {
    pub fn value(self, p: Point) -> f64 {
        match self {
            ExactSolution::Singular => singular_solution(p[0], p[1]),
        }
    }

    pub fn gradient(self, p: Point) -> [f64; 2] {
        match self {
            ExactSolution::Singular => singular_gradient(p[0], p[1]),
        }
    }
}

/// `-div(A ∇u) + φ(u) = f` in the domain, `u = 0` on its boundary.
#[derive(Clone, Debug)]
pub struct Problem {
    pub domain: Domain,
    pub diffusion: Diffusion,
    pub reaction: Reaction,
    pub load: Load,
    pub exact: Option<ExactSolution>,
}

impl Problem {
    pub fn new(domain: Domain, diffusion: Diffusion, reaction: Reaction, load: Load) -> Self {
        Self {
            domain,
            diffusion,
            reaction,
            load,
            exact: None,
        }
    }

    pub fn with_exact(mut self, exact: ExactSolution) -> Self {
        self.exact = Some(exact);
        self
    }

    pub fn is_linear(&self) -> bool {
        self.reaction.is_linear()
    }
}
