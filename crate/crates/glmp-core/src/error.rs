//! Evaluation-time errors.

use alloc::string::String;
use core::fmt;

/// Errors raised while evaluating a model over a measure bundle.
///
/// Structural problems (rule-base holes, cycles, arity violations) are
/// caught earlier, at model validation, and surface as diagnostics there.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// A normalized input fell outside [0, 1].
    OutOfRange { measure: String, value: f64 },
    /// A raw measure value was NaN or infinite.
    NonFinite { measure: String, value: f64 },
    /// A bundle lacks a measure the model requires.
    MissingMeasure {
        student: String,
        task: String,
        measure: String,
    },
    /// All relevance weights of a weighted aggregation are zero.
    AllZeroWeights { mapping: String },
    /// No rule produced any activation (unreachable for complete bases).
    EmptyActivation { mapping: String },
    /// Input arity does not match the mapping definition.
    ArityMismatch {
        mapping: String,
        expected: usize,
        got: usize,
    },
    /// A referenced label or variable is unknown at evaluation time.
    UnknownReference { name: String },
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::OutOfRange { measure, value } => {
                write!(f, "normalized value {value} for measure '{measure}' is outside [0, 1]")
            }
            EvalError::NonFinite { measure, value } => {
                write!(f, "measure '{measure}' has non-finite value {value}")
            }
            EvalError::MissingMeasure {
                student,
                task,
                measure,
            } => write!(
                f,
                "bundle for student '{student}' task '{task}' is missing measure '{measure}'"
            ),
            EvalError::AllZeroWeights { mapping } => {
                write!(f, "all relevance weights of '{mapping}' are zero")
            }
            EvalError::EmptyActivation { mapping } => {
                write!(f, "rule base of '{mapping}' produced no activation")
            }
            EvalError::ArityMismatch {
                mapping,
                expected,
                got,
            } => write!(
                f,
                "'{mapping}' expects {expected} inputs, got {got}"
            ),
            EvalError::UnknownReference { name } => {
                write!(f, "unknown reference '{name}'")
            }
        }
    }
}
