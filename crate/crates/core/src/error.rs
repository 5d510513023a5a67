use std::path::PathBuf;

/// Errors produced by the simulator, the diagnostics and the scenario harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 2..=26")]
    Size(usize),

    #[error("momentum {n} outside window ({lo}, {hi}]")]
    Index { n: i64, lo: i64, hi: i64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("state is in the {found} basis, operation needs the {expected} basis")]
    Basis {
        expected: &'static str,
        found: &'static str,
    },

    #[error("numerical degradation: {0}")]
    Numerical(String),

    #[error("insufficient support: {0}")]
    InsufficientSupport(String),

    #[error("series too short: need at least {needed} points, got {got}")]
    Window { needed: usize, got: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
