use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the model, simulator, games and analysis routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Structurally invalid instance: unknown or duplicate id, non-prefix
    /// queue deletion, bad anchor, bad weight, flavor violation.
    MalformedInstance(String),
    /// A schedule or algorithm picked an item that is not currently pending.
    InvalidPick { step: usize, what: String },
    /// Operation requires a different instance flavor.
    WrongFlavor { expected: &'static str, got: &'static str },
    /// Input exceeds an enumeration or state-space guard.
    TooLarge(String),
    /// Strategy word is not feasible for the requested configuration.
    Infeasible(String),
    /// Root bracketing failed for the lower-bound system.
    NoSolution(String),
    /// Probability vector is not a distribution.
    BadDistribution(String),
    /// Algorithm cannot report a pick distribution.
    NoDistribution(String),
    /// No pending item meets the collection threshold; signals a violated
    /// monotone-weights precondition.
    NoEligiblePick { step: usize, threshold: f64 },
    /// Invalid generator or experiment configuration.
    BadConfig(String),
    /// Unknown named instance or algorithm.
    UnknownName(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::MalformedInstance(m) => write!(f, "malformed instance: {m}"),
            Error::InvalidPick { step, what } => {
                write!(f, "invalid pick at step {step}: {what}")
            }
            Error::WrongFlavor { expected, got } => {
                write!(f, "wrong flavor: expected {expected}, got {got}")
            }
            Error::TooLarge(m) => write!(f, "input too large: {m}"),
            Error::Infeasible(m) => write!(f, "infeasible strategy: {m}"),
            Error::NoSolution(m) => write!(f, "no solution: {m}"),
            Error::BadDistribution(m) => write!(f, "bad distribution: {m}"),
            Error::NoDistribution(m) => write!(f, "no distribution: {m}"),
            Error::NoEligiblePick { step, threshold } => write!(
                f,
                "no pending item meets threshold {threshold} at step {step}"
            ),
            Error::BadConfig(m) => write!(f, "bad config: {m}"),
            Error::UnknownName(m) => write!(f, "unknown name: {m}"),
        }
    }
}

impl std::error::Error for Error {}
