use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("subset family mismatch: {left} vs {right}")]
    FamilyMismatch { left: String, right: String },

    #[error("rank {rank} out of range 0..{size}")]
    RankOutOfRange { rank: u64, size: u64 },

    #[error("malformed subset: {0}")]
    MalformedSubset(String),

    #[error("prime {p} divides the denominator {denom}")]
    PrimeDividesDenominator { p: u64, denom: String },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("outside the hypotheses of the closed form: {0}")]
    OutsideHypotheses(String),

    #[error("unknown identity `{0}`")]
    UnknownIdentity(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
