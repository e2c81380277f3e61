//! The model definition language: parser, validator, and canonical
//! serializer.
//!
//! The language is line-oriented and mirrors the sentence form experts use
//! for inference rules:
//!
//! ```text
//! measure reaction_time unit "seconds" range 0 30 invert source audio
//! attribute speed from reaction_time, fluency, speech_speed using rules {
//!   if reaction_time is low and fluency is medium and speech_speed is high then medium;
//!   ...
//! }
//! ```
//!
//! Parsing is total: errors become [`Diagnostic`]s, never panics.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::model::GlmpModel;

mod lexer;
mod parser;
mod resolve;
mod serialize;
mod validate;

pub use serialize::serialize_model;
pub use validate::validate_model;

/// A position range in the source text (1-based line and column).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Span {
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => f.write_str("error"),
            Severity::Warning => f.write_str("warning"),
        }
    }
}

/// A parse or validation finding with a stable code and source span.
///
/// Renders as `code:line:col: severity: message`.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: &'static str,
    pub message: String,
    pub span: Span,
}

impl Diagnostic {
    pub(crate) fn error(code: &'static str, span: Span, message: String) -> Self {
        Self {
            severity: Severity::Error,
            code,
            message,
            span,
        }
    }

    pub(crate) fn warning(code: &'static str, span: Span, message: String) -> Self {
        Self {
            severity: Severity::Warning,
            code,
            message,
            span,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {}: {}",
            self.code, self.span.line, self.span.col, self.severity, self.message
        )
    }
}

/// Diagnostic codes, stable across releases.
pub mod codes {
    /// Syntax error.
    pub const SYNTAX: &str = "E001";
    /// Unknown identifier (variable, input, measure, or label).
    pub const UNKNOWN_IDENT: &str = "E002";
    /// Duplicate definition.
    pub const DUPLICATE: &str = "E003";
    /// Rule base does not cover every label combination.
    pub const RULE_HOLE: &str = "E004";
    /// Aggregation arity violation.
    pub const ARITY: &str = "E005";
    /// Cycle in the perception network.
    pub const CYCLE: &str = "E006";
    /// Input level is not exactly one below the mapping level.
    pub const ORDER: &str = "E007";
    /// The model defines no skill.
    pub const NO_SKILL: &str = "E008";
    /// Membership partition is malformed or not Ruspini.
    pub const PARTITION: &str = "E009";
    /// Unknown placeholder in a text template.
    pub const PLACEHOLDER: &str = "E010";
    /// Weights are negative or sum to zero.
    pub const WEIGHTS: &str = "E011";
    /// A non-top component is never consumed.
    pub const UNUSED: &str = "E012";
    /// Measure normalization range is invalid or degenerate.
    pub const RANGE: &str = "E013";
}

/// A model document plus its origin, for diagnostics.
#[derive(Debug, Clone)]
pub struct ModelSource {
    pub text: String,
    pub origin: Option<String>,
}

impl ModelSource {
    pub fn inline(text: &str) -> Self {
        Self {
            text: text.to_string(),
            origin: None,
        }
    }

    pub fn from_file(text: &str, path: &str) -> Self {
        Self {
            text: text.to_string(),
            origin: Some(path.to_string()),
        }
    }
}

/// Result of parsing: a model when no errors occurred, plus all
/// diagnostics (errors and warnings) ordered by source position.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub model: Option<GlmpModel>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn has_errors(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.severity == Severity::Error)
    }
}

/// Parses, resolves, and validates a model document.
///
/// The returned model is present iff there are no error diagnostics.
pub fn parse_model(src: &ModelSource) -> ParseOutcome {
    // newline-normalize so spans are consistent across platforms
    let text = src.text.replace("\r\n", "\n");
    let (tokens, mut diagnostics) = lexer::tokenize(&text);
    let (raw, parse_diags) = parser::parse(tokens);
    diagnostics.extend(parse_diags);

    let (model, resolve_diags) = resolve::resolve(raw);
    diagnostics.extend(resolve_diags);

    let model = match model {
        Some(m) => {
            diagnostics.extend(validate_model(&m));
            m
        }
        None => {
            diagnostics.sort_by_key(|d| d.span);
            return ParseOutcome {
                model: None,
                diagnostics,
            };
        }
    };

    diagnostics.sort_by_key(|d| d.span);
    let has_errors = diagnostics.iter().any(|d| d.severity == Severity::Error);
    ParseOutcome {
        model: (!has_errors).then_some(model),
        diagnostics,
    }
}
