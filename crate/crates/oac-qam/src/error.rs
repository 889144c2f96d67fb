/// Errors produced by constructors and operations on invalid inputs.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A parameter is outside its domain (e.g. `q < 2`, non-positive spacing).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An input symbol lies outside `[0, Q-1]`.
    #[error("symbol {symbol} outside [0, {max}]")]
    SymbolOutOfRange { symbol: u64, max: u64 },

    /// A symbol vector does not have exactly `K` entries.
    #[error("expected {expected} symbols, got {actual}")]
    SymbolCountMismatch { expected: usize, actual: usize },

    /// A received sample has a NaN or infinite component.
    #[error("received sample has a non-finite component")]
    NonFiniteSample,

    /// A root bracket did not straddle a sign change.
    #[error("degenerate configuration: {0}")]
    DegenerateBracket(String),
}

pub type Result<T> = core::result::Result<T, Error>;
