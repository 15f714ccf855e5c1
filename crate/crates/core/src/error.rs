use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("bandwidth must be positive, got {0}")]
    NonPositiveBandwidth(f64),
    #[error("need at least {need} observations, got {got}")]
    TooFewObservations { need: usize, got: usize },
    #[error("sample variance is zero")]
    ZeroVariance,
    #[error("data must be strictly positive for the {0} family")]
    NonPositiveData(&'static str),
    #[error("invalid mixture: {0}")]
    InvalidMixture(String),
    #[error("test density case must be in 1..=15, got {0}")]
    UnknownCase(usize),
    #[error("quadrature did not converge (error estimate {0:e})")]
    QuadratureFailed(f64),
    #[error("mise formula domain violated: {0} is not positive")]
    MiseDomain(&'static str),
    #[error("the {0} kernel is not smooth enough for this operation")]
    KernelNotSmooth(&'static str),
    #[error("start density is zero at x = {0}")]
    StartVanishes(f64),
    #[error("degenerate roughness: the estimated roughness is zero")]
    DegenerateRoughness,
    #[error("grid is empty")]
    EmptyGrid,
    #[error("invalid bracket [{0}, {1}]")]
    InvalidBracket(f64, f64),
    #[error("mixture fit degenerated after {0} restarts")]
    EmDegenerate(usize),
    #[error("covariance matrix is singular or not positive definite")]
    SingularCovariance,
    #[error("no local data: kernel mass vanishes at x = {0}")]
    NoLocalData(f64),
    #[error("degenerate design: all covariate values are equal")]
    DegenerateDesign,
    #[error("operation not supported for the {0} start family")]
    UnsupportedFamily(&'static str),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("hermite coefficients up to degree {need} required, have {got}")]
    InsufficientDegree { need: usize, got: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
