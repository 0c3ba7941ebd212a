use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Errors reported by channel generation, simulation, and estimation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operand shapes are incompatible.
    ShapeMismatch { context: &'static str },
    /// A configuration value violates its invariant.
    InvalidConfig(String),
    /// An estimator was fed an observation of the wrong protocol kind.
    SchemeMisuse { expected: &'static str, got: &'static str },
    /// The stacked measurement system does not determine the unknowns.
    Identifiability(String),
    /// Typical-user columns too small to carry a correlation ratio.
    DegenerateColumns(Vec<usize>),
    /// More unknowns requested than measurements available.
    Underdetermined { unknowns: usize, measurements: usize },
    /// The metric is undefined for this input (e.g. zero reference channel).
    UndefinedMetric(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ShapeMismatch { context } => write!(f, "shape mismatch in {context}"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::SchemeMisuse { expected, got } => {
                write!(f, "schedule misuse: estimator expects {expected}, got {got}")
            }
            Error::Identifiability(msg) => write!(f, "unidentifiable system: {msg}"),
            Error::DegenerateColumns(idx) => {
                write!(f, "degenerate typical-user columns at indices {idx:?}")
            }
            Error::Underdetermined {
                unknowns,
                measurements,
            } => write!(
                f,
                "underdetermined least squares: {unknowns} unknowns from {measurements} measurements"
            ),
            Error::UndefinedMetric(what) => write!(f, "metric undefined: {what}"),
        }
    }
}

impl core::error::Error for Error {}
