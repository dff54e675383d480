use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid scenario or parameter value. `path` names the offending field.
    #[error("{path}: {msg}")]
    Config { path: String, msg: String },

    #[error("failed to parse scenario: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("non-finite value in {0}")]
    Numeric(String),

    #[error("scenario mismatch: {0}")]
    Mismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("failed to serialize summary: {0}")]
    Serialize(#[from] toml::ser::Error),
}

impl Error {
    pub fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
