use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported basis: {0}")]
    UnsupportedBasis(String),

    #[error("capacity exceeded: {what} (limit {limit}, requested {requested})")]
    Capacity {
        what: String,
        limit: usize,
        requested: usize,
    },

    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Finite-difference estimates at `step` and `step / 2` disagree.
    #[error("finite-difference step {step:e} did not converge (relative spread {spread:e}); try step {suggested:e}")]
    Step {
        step: f64,
        spread: f64,
        suggested: f64,
    },

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn basis(msg: impl Into<String>) -> Self {
        Error::UnsupportedBasis(msg.into())
    }

    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable tag, used for in-row error markers.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::UnsupportedBasis(_) => "basis",
            Error::Capacity { .. } => "capacity",
            Error::Convergence(_) => "convergence",
            Error::Step { .. } => "step",
            Error::Internal(_) => "internal",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Domain(_) | Error::UnsupportedBasis(_) => 2,
            Error::Capacity { .. } => 3,
            Error::Convergence(_) | Error::Step { .. } => 4,
            Error::Internal(_) | Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
