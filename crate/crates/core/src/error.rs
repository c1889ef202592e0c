use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("generating function needs at least one coefficient")]
    EmptyCoefficients,
    #[error("coefficient a_{0} is not finite")]
    NonFiniteCoefficient(usize),
    #[error("g(1) = 0, the kernel cannot be normalised")]
    ZeroG1,
    #[error("operator is not positive: a_{index}/g(1) = {ratio} < 0")]
    NotPositive { index: usize, ratio: f64 },
    #[error("tail tolerance {0} must lie in (0, 1)")]
    InvalidEpsilon(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("scale sequence rejected: {}", .0.join("; "))]
    InvalidScale(Vec<String>),
    #[error("growth majorant of f overflows at t = {t_max}")]
    GrowthOverflow { t_max: f64 },
    #[error("f is not finite at t = {t}")]
    NonFiniteSample { t: f64 },
    #[error("grid step {step} exceeds delta/10 for delta = {delta}")]
    GridTooCoarse { step: f64, delta: f64 },
    #[error("sup norms of f, f', f'' unknown for {0}")]
    DerivativesUnknown(String),
    #[error("{0} is not bounded on [0, inf)")]
    Unbounded(String),
    #[error("estimated Lipschitz constant {estimate} exceeds declared M = {m_lip}")]
    NotInLipClass { estimate: f64, m_lip: f64 },
    #[error("x must be positive, got {0}")]
    XNonPositive(f64),
    #[error("{0} grows faster than 1 + x^2")]
    TailUnbounded(String),
    #[error("{0}: f/(1 + x^2) has no finite limit at infinity")]
    NotInCRhoK(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for LabError {
    fn from(err: std::io::Error) -> Self {
        LabError::Io(err.to_string())
    }
}
