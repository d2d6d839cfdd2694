use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller supplied an argument outside the operation's accepted range.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The inputs are well-formed but describe a mathematically undefined object.
    #[error("domain error: {0}")]
    Domain(String),

    /// An explicit node or size cap was exceeded before the operation finished.
    #[error("resource limit exceeded after {nodes} nodes: {what}")]
    Resource { what: String, nodes: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    /// A documented precondition of a constructive routine does not hold.
    #[error("contract violated: {0}")]
    Contract(String),

    /// Internal self-check failed. Never expected; indicates a bug.
    #[error("internal defect: {0}")]
    Defect(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }

    pub(crate) fn resource(what: impl Into<String>, nodes: u64) -> Self {
        Error::Resource {
            what: what.into(),
            nodes,
        }
    }
}
