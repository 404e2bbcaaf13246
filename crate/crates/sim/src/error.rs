use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Domain(#[from] adaptive_core::Error),

    #[error("invalid fixture parameters: {0}")]
    InvalidShapeParameters(String),

    #[error("invalid simulation parameters: {0}")]
    InvalidParameters(String),

    #[error("corrupt event log at line {line}: {message}")]
    CorruptLog { line: usize, message: String },

    #[error("service answered {status} {code}: {message}")]
    Remote { status: u16, code: String, message: String },

    #[error("http transport: {0}")]
    Http(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// 2 for typed domain errors, 1 for I/O and transport failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Io(_) | SimError::Http(_) => 1,
            _ => 2,
        }
    }

    pub fn is_no_playable(&self) -> bool {
        match self {
            SimError::Domain(adaptive_core::Error::NoPlayableFeature) => true,
            SimError::Remote { code, .. } => code == "NoPlayableFeature",
            _ => false,
        }
    }
}

impl From<csv::Error> for SimError {
    fn from(e: csv::Error) -> Self {
        SimError::Io(e.into())
    }
}

impl From<reqwest::Error> for SimError {
    fn from(e: reqwest::Error) -> Self {
        SimError::Http(e.to_string())
    }
}
