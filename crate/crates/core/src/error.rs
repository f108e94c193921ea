use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("total degree {0} is odd")]
    OddTotalDegree(usize),

    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),

    #[error("every positive weight lies above the degree cap {cap}")]
    EntirelyAboveCap { cap: usize },

    #[error("n = {0} is too small to realize the distribution")]
    TooFewVertices(usize),

    /// A moment of the degree distribution is infinite. `moment` is 1 for
    /// L'(1), 2 for L''(1).
    #[error("moment {moment} diverges for power-law exponent {gamma}")]
    DivergentMoment { moment: u8, gamma: f64 },

    #[error("operation needs a finite-support distribution")]
    InfiniteSupport,

    #[error("first moment L'(1) is zero")]
    ZeroFirstMoment,

    #[error("L''(1) = {l2} <= L'(1) = {l1}: no subcritical-to-supercritical transition in (0,1)")]
    NoTransition { l1: f64, l2: f64 },

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(f64),

    #[error("no simple graph after {attempts} attempts (predicted simplicity probability {predicted:.4e})")]
    AttemptsExhausted { attempts: usize, predicted: f64 },

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("target induced degree sequence has probability zero")]
    Unreachable,

    #[error("bisection bracket not established: {0}")]
    NoBracket(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
