use thiserror::Error;

/// Errors raised by the library. Mathematical failures are separated from
/// input/format failures so drivers can map them to distinct exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("not a complex: consecutive differentials compose to nonzero at degree {0}")]
    NotComplex(i32),
    #[error("not a chain map: square fails to commute at degree {0}")]
    NotChainMap(i32),
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
    #[error("not a flat: {0}")]
    NotAFlat(String),
    #[error("no dual arrangement: {0}")]
    NoDual(String),
    #[error("not a covering pair: {0} -> {1}")]
    NotCover(usize, usize),
    #[error("invalid face: {0}")]
    InvalidFace(String),
    #[error("not a polarization: {0}")]
    NotPolarization(String),
    #[error("invalid sheaf: {0}")]
    InvalidSheaf(String),
    #[error("sheaves live on different face posets")]
    PosetMismatch,
    #[error("acyclicity failure: {0}")]
    Acyclicity(String),
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for I/O and file-format problems, false for mathematical ones.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Format(_))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
