use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A column named in the variable specs is absent from the input header.
    #[error("schema error: column `{0}` not found in input")]
    MissingColumn(String),

    #[error("schema error: {0}")]
    Schema(String),

    /// Invalid run configuration or variable spec.
    #[error("config error: {0}")]
    Config(String),

    #[error("anchor error: maximum {max} must exceed minimum {min}")]
    Anchor { min: f64, max: f64 },

    #[error("input error: {0}")]
    Input(String),

    #[error("data error: variable `{variable}` has missing values in rows {rows:?} but its policy forbids missing data")]
    ForbiddenMissing { variable: String, rows: Vec<usize> },

    #[error("data error: {0}")]
    Data(String),

    #[error("degenerate variable `{0}`: {1}")]
    Degenerate(String, String),

    /// Linearly dependent predictors; carries the names of the columns involved.
    #[error("collinearity among columns {0:?}")]
    Collinearity(Vec<String>),

    #[error("insufficient data: {observations} observations for {parameters} parameters")]
    InsufficientData { observations: usize, parameters: usize },

    #[error("unknown variable `{0}`")]
    Lookup(String),

    #[error("bootstrap aborted after {draws} resamples: too many rank-deficient replicates")]
    TooManyRedraws { draws: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for schema/config problems, 2 for data problems,
    /// 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::MissingColumn(_)
            | Error::Schema(_)
            | Error::Config(_)
            | Error::Anchor { .. }
            | Error::Lookup(_)
            | Error::Json(_) => 1,
            Error::Input(_)
            | Error::ForbiddenMissing { .. }
            | Error::Data(_)
            | Error::Io { .. }
            | Error::Csv(_) => 2,
            Error::Degenerate(..)
            | Error::Collinearity(_)
            | Error::InsufficientData { .. }
            | Error::TooManyRedraws { .. } => 3,
        }
    }
}
