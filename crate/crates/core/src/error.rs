use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what} is outside its action set (excess {excess:e})")]
    MembershipViolation { what: &'static str, excess: f64 },
    #[error("response function has no cell covering {point:?}")]
    UncoveredPoint { point: Vec<f64> },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("exact computation supports dimension <= {max}, got {got}")]
    DimensionTooHigh { max: usize, got: usize },
    #[error("no feasible point: {0}")]
    Infeasible(String),
    #[error("inner minimum is unbounded: action set is malformed")]
    InnerMinUnbounded,
    #[error("gradient norm {norm} exceeds declared bound {bound}")]
    GradientBoundExceeded { norm: f64, bound: f64 },
    #[error("loss entry {value} outside [-1, 1]")]
    LossOutOfRange { value: f64 },
    #[error("covering net would have {size} points (cap {cap})")]
    NetTooLarge { size: f64, cap: usize },
    #[error("epoch history is empty")]
    EmptyHistory,
    #[error("{epochs} epochs do not divide horizon {horizon}")]
    ScheduleMismatch { horizon: usize, epochs: usize },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("epoch {0} is incomplete")]
    IncompleteEpoch(usize),
    #[error("adversary horizon {0} exceeded")]
    HorizonExceeded(usize),
    #[error("adversary has no ground truth")]
    NoGroundTruth,
    #[error("hull is empty")]
    EmptyHull,
    #[error("need at least {need} positive points for a rate fit, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("linear program: {0}")]
    Lp(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
