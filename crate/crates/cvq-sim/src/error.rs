use thiserror::Error;

/// Errors surfaced by the simulator and its harness.
///
/// `Config` and `Input` mean the user gave us something unusable (bad
/// config file, malformed schedule, infeasible calibration targets);
/// `Runtime` means the run itself failed.
#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Read failure on a user-supplied input file (counts as usage, unlike
    /// I/O failures while writing results).
    pub fn read(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Input(format!("cannot read {}: {source}", path.as_ref().display()))
    }

    /// True for errors caused by user-supplied configuration or input files.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Input(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
