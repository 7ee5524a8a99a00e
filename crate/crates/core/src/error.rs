use thiserror::Error;

/// Errors produced by the code-design library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("duplicate nonzero entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("entry ({row}, {col}) is outside a {n_rows}x{n_cols} matrix")]
    OutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("invalid UAS configuration: {0}")]
    InvalidConfig(String),

    #[error("modulus {0} is not a prime greater than 2")]
    InvalidModulus(u32),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("relocation assigned to a zero position ({0}, {1})")]
    ZeroPosition(usize, usize),

    #[error("relocation value {value} out of range for modulus {modulus}")]
    RelocationValue { value: u32, modulus: u32 },

    #[error("cycle basis does not match instance: {0}")]
    BasisMismatch(String),

    #[error("column weight mismatch: expected {expected}, found {found:?}")]
    GammaMismatch {
        expected: usize,
        found: Option<usize>,
    },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
