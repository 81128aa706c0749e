use thiserror::Error;

use crate::driver::ConfigError;
use crate::energy::EnergyError;
use crate::mesh::MeshError;
use crate::solver::SolverError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Top-level error for the adaptive loop.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Energy(#[from] EnergyError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}
