use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("Legendre parameter must avoid 0 and 1")]
    DegenerateLambda,
    #[error("characteristic {0} is not supported (Legendre form needs char != 2, 3)")]
    Characteristic(u32),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("operands live on different curves")]
    CurveMismatch,
    #[error("valuation of the zero function is undefined")]
    ZeroValuation,
    #[error("point is not on the curve: {0}")]
    OffCurve(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("matrix is not invertible over the function field")]
    Singular,
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("invalid bundle descriptor: {0}")]
    Descriptor(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed candidate: {0}")]
    Malformed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certificate replay failed at step {step}: {reason}")]
    Replay { step: usize, reason: String },
    #[error("candidate does not verify: {0}")]
    Unverified(String),
    #[error("inconsistent lattice data: {0}")]
    Lattice(String),
}
