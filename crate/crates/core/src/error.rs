use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("singular training matrix ({0})")]
    Singular(&'static str),

    /// Scheme 2 combiner `(U1 + U2)/2` is too close to zero to invert.
    #[error("degenerate rank-one estimate: |U1 + U2| = {0:e}")]
    Degenerate(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
