use thiserror::Error;

/// Errors raised by the toolkit. Every variant carries enough context to be
/// reported back to the user without a backtrace.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("invalid group spec: {0}")]
    InvalidGroup(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("memory guard: {points} points exceeds the cap of {cap}")]
    MemoryGuard { points: u64, cap: u64 },

    #[error("word problem undecided after exploring to depth {depth}")]
    Undecided { depth: usize },

    #[error("word problem undecided for {left} against {right} after depth {depth}")]
    UndecidedPair { left: String, right: String, depth: usize },

    #[error("partial enumeration: cap of {cap} elements reached after {reached}")]
    PartialEnumeration { reached: usize, cap: usize },

    #[error("generators do not generate: reached a subgroup of order {reached} in a group of order {order}")]
    NonGenerating { reached: usize, order: usize },

    #[error("inconsistency: {0}")]
    Inconsistent(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("refused: {0}")]
    Refused(String),

    #[error("iteration cap of {0} exceeded")]
    IterationCap(u64),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
