use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("non-finite entry encountered in {0}")]
    Numeric(&'static str),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a partial isometry: {0}")]
    NotPartialIsometry(String),

    #[error("grid construction failed: {0}")]
    Construction(String),

    #[error("transform failed: {0}")]
    Transform(String),

    #[error("decomposition failed: {0}")]
    Decomposition(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

impl Error {
    pub(crate) fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Dimension {
            op,
            detail: detail.into(),
        }
    }
}
