use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised anywhere in the crate.
///
/// Arm indices carried in error values are 1-based, matching all
/// user-facing I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("entries ({i},{j}) and ({j},{i}) do not sum to one (residual {residual:.3e})")]
    Asymmetric { i: usize, j: usize, residual: f64 },

    #[error("invalid preference matrix: {0}")]
    InvalidMatrix(String),

    #[error("tied preference between arms {i} and {j} (strict gaps required)")]
    TiedPreference { i: usize, j: usize },

    #[error("unknown dataset `{0}`")]
    UnknownDataset(String),

    #[error("no submatrix satisfied the gap filter after {attempts} attempts")]
    ExhaustedRejections { attempts: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("arm {arm} out of range for K = {k}")]
    ArmOutOfRange { arm: usize, k: usize },

    #[error("arm {arm} is not a Copeland winner")]
    NotAWinner { arm: usize },

    #[error("K = {k} exceeds the exact-LP limit K_max = {k_max}")]
    TooLarge { k: usize, k_max: usize },

    #[error("simplex pivot magnitude {pivot:.3e} below stability threshold")]
    NumericalInstability { pivot: f64 },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("simplex exceeded {0} pivots")]
    IterationLimit(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("trace has no checkpoints")]
    EmptyTrace,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TooLarge { .. } => 3,
            Error::Io(_) => 4,
            _ => 2,
        }
    }
}
