use thiserror::Error;

use crate::propagator::EvolveDiagnostics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("packet tail reaches the grid boundary: {0}")]
    BoundaryContamination(String),

    #[error("window [{lo}, {hi}] lies outside the grid [{y_min}, {y_max}]")]
    WindowOutsideGrid {
        lo: f64,
        hi: f64,
        y_min: f64,
        y_max: f64,
    },

    #[error("state and Hamiltonian live on different grids")]
    GridMismatch,

    #[error("singular tridiagonal system (zero pivot at row {0})")]
    SingularSystem(usize),

    #[error("non-finite amplitude at step {step}")]
    NonFinite { step: u64 },

    #[error("norm {boundary_norm:.3e} within the boundary margin exceeds tolerance {tolerance:.3e}")]
    ReflectionContamination {
        boundary_norm: f64,
        tolerance: f64,
        diagnostics: Box<EvolveDiagnostics>,
    },

    #[error("no transmitted amplitude beyond y = {y_cut} (norm {norm:.3e})")]
    NoTransmission { y_cut: f64, norm: f64 },

    #[error("spin phase undefined: <S_x> = <S_y> = 0")]
    UndefinedPhase,

    #[error("resolution needs {needed} cells, above the cap of {cap}")]
    CellCapExceeded { needed: usize, cap: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable tag used in result tables.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "invalid_grid",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::BoundaryContamination(_) => "initial_tail",
            Error::WindowOutsideGrid { .. } => "window_outside_grid",
            Error::GridMismatch => "grid_mismatch",
            Error::SingularSystem(_) => "singular_system",
            Error::NonFinite { .. } => "non_finite",
            Error::ReflectionContamination { .. } => "boundary",
            Error::NoTransmission { .. } => "no_transmission",
            Error::UndefinedPhase => "undefined_phase",
            Error::CellCapExceeded { .. } => "cell_cap",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}
