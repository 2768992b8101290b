use thiserror::Error;

/// Errors reported by every fallible operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid edge: {0}")]
    InvalidEdge(String),

    #[error("word {0:?} is not allowed in the domain shift")]
    ForbiddenWord(Vec<u32>),

    #[error("invalid block code: {0}")]
    InvalidCode(String),

    #[error("code has no inverse attached")]
    NotInvertible,

    #[error("code is not elementary: {0}")]
    NotElementary(String),

    #[error("shift mismatch: {0}")]
    ShiftMismatch(String),

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),

    #[error("coefficient overflow at ({row}, {col}): element {element} has coefficient {count}")]
    CoefficientOverflow { row: usize, col: usize, element: String, count: u64 },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invariance violated: {0}")]
    NotInvariant(String),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("invalid chain: {0}")]
    InvalidChain(String),

    #[error("empty core: {0}")]
    EmptyCore(String),

    #[error("internal invariant failed: {0}")]
    Invariant(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceBound(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
