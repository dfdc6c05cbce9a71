use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,
    #[error("empty alphabet")]
    EmptyAlphabet,
    #[error("position {position} outside 1..={n}")]
    PositionOutOfRange { position: u64, n: u64 },
    #[error("invalid weight function: {0}")]
    InvalidWeightFunction(String),
    #[error("weight underflow for symbol {symbol}: model desynchronized")]
    WeightUnderflow { symbol: u8 },
    #[error("symbol {0} is not part of the model")]
    UnknownSymbol(u8),
    #[error("model has no symbols")]
    EmptyModel,
    #[error("truncated bit stream")]
    TruncatedStream,
    #[error("malformed container: {0}")]
    Malformed(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("support mismatch: q is zero where p is positive (symbol {0})")]
    SupportMismatch(u8),
}

impl Error {
    pub(crate) fn malformed(msg: impl Into<String>) -> Self {
        Error::Malformed(msg.into())
    }
}
