use alloc::string::String;
use core::fmt;

/// Crate-wide error type.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// `|p4| = infinity` or `p1 + |p4| = 0`; the FBM jump rate at 0 is not defined.
    JumpRateUndefined,
    /// Exhaustive enumeration would exceed the configured leaf budget.
    BudgetExceeded { leaves: u64, budget: u64 },
    /// The residual probability of the built jumping measure is negative;
    /// `min_n` is the smallest n found admissible by doubling search.
    NTooSmall { n: u32, min_n: u32 },
    /// Interval endpoints outside the measure's domain (requires 0 < a <= b).
    InvalidInterval { a: f64, b: f64 },
    /// Argument outside the stated domain of a closed-form evaluation.
    OutOfDomain { what: &'static str },
    /// The 2x2 system for the two-exponential domain function is singular.
    SingularSystem { det: f64 },
    /// Numerical integration against a user density failed to converge.
    QuadratureFailure,
    /// Path shorter than the requested rescaling horizon.
    InsufficientPath { need: usize, have: usize },
    UnknownPreset(String),
    /// A stated precondition does not hold.
    Precondition(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::JumpRateUndefined => write!(f, "jump-rate undefined"),
            Error::BudgetExceeded { leaves, budget } => {
                write!(f, "budget exceeded: {leaves} leaves > {budget}")
            }
            Error::NTooSmall { n, min_n } => {
                write!(f, "n too small: n={n} gives a negative residual, smallest admissible n is {min_n}")
            }
            Error::InvalidInterval { a, b } => write!(f, "invalid interval ({a}, {b}]"),
            Error::OutOfDomain { what } => write!(f, "out of domain: {what}"),
            Error::SingularSystem { det } => write!(f, "singular system (det = {det:e})"),
            Error::QuadratureFailure => write!(f, "quadrature failure"),
            Error::InsufficientPath { need, have } => {
                write!(f, "insufficient path length: need {need}, have {have}")
            }
            Error::UnknownPreset(name) => write!(f, "unknown preset: {name}"),
            Error::Precondition(msg) => write!(f, "precondition violated: {msg}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
