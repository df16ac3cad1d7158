use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lambda = {lambda} outside the admissible range (0, {limit})")]
    LambdaOutOfRange { lambda: f64, limit: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("negative time t = {0}")]
    NegativeTime(f64),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("unknown coefficient family `{0}`")]
    UnknownFamily(String),
    #[error("declared Lipschitz bound {declared} falsified by sampled quotient {observed}")]
    BoundViolated { declared: f64, observed: f64 },
    #[error("driver does not match coupling: {0}")]
    DriverMismatch(String),
    #[error("ensembles are not coupled: {0}")]
    CouplingMismatch(String),
    #[error("operator family is not convergent: {0}")]
    FamilyNotConvergent(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
