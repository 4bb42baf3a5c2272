use thiserror::Error;

use crate::lie::LieError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Lie(#[from] LieError),

    #[error("representation is not central: relator defect {defect:.3e} exceeds {tolerance:.1e}")]
    NotCentral { defect: f64, tolerance: f64 },

    #[error("cup pairing is degenerate: rank {rank} of {dim}")]
    DegenerateSigma { rank: usize, dim: usize },

    #[error("degree {0} out of range")]
    DegreeOutOfRange(usize),

    #[error("vector is not a cocycle: residual {0:.3e}")]
    NotACocycle(f64),

    #[error("point is not in the slice variety: coboundary residual {0:.3e}")]
    NotInSliceVariety(f64),

    #[error("point is not in the chart: {0}")]
    NotInChart(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
