use thiserror::Error;

/// Errors raised by kernel construction, geometry, assembly, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("truncated-stable kernel with epsilon = 0 has a divergent jump rate; regularize with epsilon > 0")]
    Unregularized,

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("kernel horizon {kernel} does not match partition horizon {partition}")]
    HorizonMismatch { kernel: f64, partition: f64 },

    #[error("total jump rate vanishes at x = {x}; the point is isolated from the admissible region")]
    ZeroRate { x: f64 },

    #[error("the absorbing set is empty; exit moments are infinite")]
    EmptyAbsorbingSet,

    #[error("singular linear system: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    #[error("invalid initial density: {0}")]
    InvalidInitialDensity(String),

    #[error("inverse iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("exit-time moment of order {order} has negative entries (min {min:e})")]
    NonPositive { order: usize, min: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("kernel table: {0}")]
    Table(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad inputs rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidKernel(_)
                | Error::Unregularized
                | Error::InvalidDomain(_)
                | Error::InvalidGrid(_)
                | Error::HorizonMismatch { .. }
                | Error::EmptyAbsorbingSet
                | Error::InvalidInitialDensity(_)
                | Error::InvalidArgument(_)
                | Error::Table(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
