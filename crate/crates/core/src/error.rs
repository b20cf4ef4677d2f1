use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} outside supported range (|x| <= {bound}): {what}")]
    Range { what: &'static str, value: f64, bound: f64 },

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-integrable overlap: Re(A) = {re_a} < 0")]
    NonIntegrable { re_a: f64 },

    #[error("no convergence: best estimate {estimate:e}, residual {residual:e}")]
    Convergence { estimate: f64, residual: f64 },

    #[error("integration unstable at t = {t}: {reason}; reduce dt")]
    Stability { t: f64, reason: String },

    #[error("trajectory stream {stream_id}: {source}")]
    Stream { stream_id: u64, source: Box<Error> },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Convergence { .. } | Error::Stability { .. } => true,
            Error::Stream { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
