use thiserror::Error;

/// Errors produced by the simulator, the code tools and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("qubit index {index} out of range for a {count}-qubit register")]
    TargetOutOfRange { index: usize, count: usize },

    #[error("register of {count} qubits exceeds the limit of {max}")]
    RegisterTooLarge { count: usize, max: usize },

    #[error("a register needs at least one qubit")]
    EmptyRegister,

    #[error("kraus operators are not trace preserving (max deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("operator `{label}` is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { label: String, deviation: f64 },

    #[error("invalid projector set: {0}")]
    InvalidProjectors(String),

    #[error("branch probability {probability:.3e} is too small to condition on")]
    ZeroProbabilityBranch { probability: f64 },

    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("unknown code `{0}`")]
    UnknownCode(String),

    #[error("codewords are not orthonormal (max deviation {deviation:.3e})")]
    NotOrthonormal { deviation: f64 },

    #[error(
        "coupling too strong for slow-noise form at epsilon = {epsilon}: \
         min |gamma| = {gamma_min:.6}, max |delta| = {delta_max:.6}"
    )]
    CouplingTooStrong {
        epsilon: f64,
        gamma_min: f64,
        delta_max: f64,
    },

    #[error("config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad user input rather than by the simulation itself.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig { .. }
                | Error::InvalidParameter { .. }
                | Error::UnknownCode(_)
                | Error::NotOrthonormal { .. }
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
