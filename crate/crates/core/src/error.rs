use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("fractional order s = {0} is outside (0, 1]")]
    InvalidOrder(f64),

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("no Pohozaev root: {0}")]
    NoRoot(String),

    #[error("operation undefined for the zero field")]
    ZeroField,

    #[error("seed must be real, nonnegative and nonzero")]
    NegativeSeed,

    #[error("no convergence after {iterations} iterations (last residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        /// Residual sampled every 50 iterations.
        residual_history: Vec<f64>,
        /// L2 norm of the iterate, sampled alongside the residual.
        norm_history: Vec<f64>,
    },

    #[error("mass {target} not reachable; scanned (lambda, mass) = {table:?}")]
    MassUnreachable { target: f64, table: Vec<(f64, f64)> },

    #[error("Pohozaev residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    PohozaevResidual { residual: f64, tolerance: f64 },

    #[error("perturbation is not in Q_c: E(v) = {energy_v}, E(u_c) = {energy_uc}, Q(v) = {q_v}")]
    PerturbationNotInQc {
        energy_v: f64,
        energy_uc: f64,
        q_v: f64,
    },

    #[error("cut-off radius {radius} needs 10R < L/2 but L = {box_length}")]
    BoxTooSmall { radius: f64, box_length: f64 },

    #[error("config: {0}")]
    Config(String),

    #[error("snapshot format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::GridMismatch => "GridMismatch",
            Error::InvalidOrder(_) => "InvalidOrder",
            Error::NonFinite(_) => "NonFinite",
            Error::InvalidParams(_) => "InvalidParams",
            Error::NoRoot(_) => "NoRoot",
            Error::ZeroField => "ZeroField",
            Error::NegativeSeed => "NegativeSeed",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::MassUnreachable { .. } => "MassUnreachable",
            Error::PohozaevResidual { .. } => "PohozaevResidual",
            Error::PerturbationNotInQc { .. } => "PerturbationNotInQc",
            Error::BoxTooSmall { .. } => "BoxTooSmall",
            Error::Config(_) => "Config",
            Error::Format(_) => "Format",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }
}
