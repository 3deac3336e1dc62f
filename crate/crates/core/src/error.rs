use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("exponent at byte {offset} must be a non-negative integer literal")]
    BadExponent { offset: usize },
    #[error("abs() may not appear in a polynomial; split branches first")]
    AbsNode,
    #[error("sqrt() is only allowed in witness curve expressions")]
    SqrtNode,
    #[error("division is only allowed by a nonzero numeric constant")]
    NonConstantDivisor,
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polynomials do not share a variable list")]
    VariableMismatch,
    #[error("invalid set definition: {0}")]
    InvalidSet(String),
    #[error("projection did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("converged point violates inequality {index}")]
    InequalityViolated { index: usize },
    #[error("empty sample: {0}")]
    EmptySample(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("curve parameter {value} outside domain ({lo}, {hi}]")]
    OutsideDomain { value: f64, lo: f64, hi: f64 },
    #[error("negative radicand {0} in sqrt()")]
    NegativeRadicand(f64),
    #[error("curve point is off the host set (residual {0:e})")]
    OffSet(f64),
    #[error("unknown corpus entry `{0}`")]
    UnknownEntry(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
