use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] btdesign_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl CliError {
    /// `2` for bad input, `1` for failures of the computation itself.
    pub fn exit_code(&self) -> u8 {
        use btdesign_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Json(_) => 2,
            CliError::Core(E::ClassificationFailed | E::InconsistentClosedForm(_) | E::Singular) => 1,
            CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Csv(_) | CliError::Pool(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
