use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain: {0}")]
    Domain(String),
    #[error("frame: {0}")]
    Frame(String),
    #[error("closure: {0}")]
    Closure(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("sampling: {0}")]
    Sampling(String),
    #[error("hyperbolicity: {0}")]
    Hyperbolicity(String),
    #[error("nonreal: {0}")]
    NonReal(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
