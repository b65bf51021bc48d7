use thiserror::Error;

/// Failure classes shared by every module of the workbench.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Inputs violate a precondition (size mismatch, out-of-range parameter).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A dense table or exhaustive search would exceed its explicit cap.
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn over_cap<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::ResourceCap(msg.into()))
}
