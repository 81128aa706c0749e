//! Fully iterative, energy-driven adaptive P1 finite elements.
//!
//! The crate minimizes strictly convex energies of semilinear
//! diffusion-reaction problems on 2-D polygonal domains. Every stage is
//! driven by energy reduction:
//!
//! * [`solver`] runs (nonlinear) conjugate gradients and records the energy
//!   of every iterate,
//! * [`stopping`] turns those energy histories into stopping decisions,
//! * [`adaptivity`] predicts the energy decay each interior edge bisection
//!   would buy and selects edges by Dörfler marking,
//! * [`mesh`] refines by newest-vertex bisection and prolongs iterates,
//! * [`driver`] wires the loop together and hosts the problem catalog.

// NaN-aware `!(x > 0.0)` guards and index loops over small fixed arrays
// are intentional throughout the numerics.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod adaptivity;
pub mod driver;
pub mod energy;
pub mod error;
pub mod mesh;
pub mod solver;
pub mod stopping;

pub use adaptivity::{compute_indicators, doerfler_mark, EdgeIndicator};
pub use driver::{ConvergenceRecord, DriverConfig, ProblemId};
pub use energy::{Discretization, Problem};
pub use error::{Error, Result};
pub use mesh::{CoeffVector, Mesh, P1Space, Prolongation};
pub use solver::{SolverTrace, Stopper};
pub use stopping::{Criterion, StoppingConfig, StoppingRule};
