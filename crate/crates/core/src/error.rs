use thiserror::Error;

/// Errors raised by the grid, partition, symbol and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    /// A numeric parameter is outside its admissible range.
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// Two objects that must live on the same torus grid do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A frequency sum left the lattice and would wrap around the torus.
    #[error("aliasing: {0}")]
    Aliasing(String),

    /// An operation was called outside its documented hypotheses.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Dense paths are refused above their size guard.
    #[error("resource guard: {0}")]
    Resource(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::$variant(format!($($arg)+)));
        }
    };
}

pub(crate) use ensure;
