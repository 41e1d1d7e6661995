use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point lies outside the domain (rho = {rho:e})")]
    OutsideDomain { rho: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),

    #[error("no sample points accepted inside the domain")]
    NoAcceptedPoints,

    #[error("under-determined Gram matrix: {samples} samples for {basis} basis functions")]
    UnderdeterminedGram { samples: usize, basis: usize },

    #[error("all basis modes dropped by the conditioning threshold")]
    AllModesDropped,

    #[error("Reinhardt Gram matrix not diagonal: off-diagonal ratio {ratio:e}")]
    NonDiagonalGram { ratio: f64 },

    #[error("non-positive kernel diagonal K(p,p) = {value:e}")]
    NonPositiveKernel { value: f64 },

    #[error("metric not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    DegenerateMetric { min_eigenvalue: f64 },

    #[error("kernel pole: <z, zeta> = 1")]
    KernelPole,

    #[error("iteration did not converge: {0}")]
    NonConvergence(String),

    #[error("ambiguous nearest boundary point: {0}")]
    AmbiguousBoundaryPoint(String),

    #[error("degenerate gradient of the defining function")]
    DegenerateGradient,

    #[error("zero direction vector")]
    ZeroDirection,

    #[error("denominator too close to zero: {0:e}")]
    SingularRatio(f64),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("group element maps a point out of the domain")]
    GroupEscapesDomain,

    #[error("not a unitary matrix (deviation {0:e})")]
    NotUnitary(f64),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
