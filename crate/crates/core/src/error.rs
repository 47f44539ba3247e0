use thiserror::Error;

/// Errors raised by the AMAR library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AmarError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("AR order {p} is smaller than the largest timescale {max_scale}")]
    InvalidOrder { p: usize, max_scale: usize },

    #[error("coefficient vector is not representable as an AMAR model: {0}")]
    NotRepresentable(String),

    #[error("frequency {0} is outside (-1/2, 1/2)")]
    FrequencyDomain(f64),

    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("model is not stationary; pass allow_nonstationary to simulate it anyway")]
    NonStationary,

    #[error("simulated path became non-finite at index {index}")]
    ExplosivePath { index: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("insufficient data: need {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("singular design: {0}")]
    SingularDesign(String),

    #[error("no threshold in the grid yields at most {q_max} timescales; try a grid with larger thresholds")]
    InfeasibleThreshold { q_max: usize },

    #[error("history has {got} observations but the model needs {needed}")]
    InsufficientHistory { needed: usize, got: usize },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
}

impl AmarError {
    /// True for failures caused by numerics (singular designs, explosive paths)
    /// rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            AmarError::SingularDesign(_)
                | AmarError::ExplosivePath { .. }
                | AmarError::NonStationary
                | AmarError::InfeasibleThreshold { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, AmarError>;
