//! Core engine for hierarchical soft-skill evaluation with linguistic labels.
//!
//! Raw behavioural measures are fuzzified into computational perceptions,
//! aggregated through a network of perception mappings (rule bases for small
//! input sets, weighted averages otherwise), and rendered as five-bin
//! linguistic outcomes (`L`, `L/M`, `M`, `M/H`, `H`).
//!
//! The crate is `no_std` (with `alloc`): evaluation is a pure function of
//! (model, measure bundle) with no IO. File formats, ingestion and the CLI
//! live in the companion `glmp` crate.

#![no_std]
#![warn(unreachable_pub)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dsl;
pub mod engine;
pub mod error;
pub mod model;
pub mod perception;
pub mod report;
pub mod variable;

pub use engine::{evaluate_network, evaluate_rules, evaluate_weighted, fuzzify, EvaluationTrace};
pub use error::EvalError;
pub use model::{GlmpModel, Level, MeasureSpec, PerceptionMapping};
pub use perception::{select_label, ComputationalPerception, LabelOutcome, DEFAULT_TIE_EPSILON};
pub use variable::{LinguisticVariable, MembershipFunction};

/// Tolerance for the `sum(W) == 1` validity-normalization invariant.
pub const NORM_TOLERANCE: f64 = 1e-9;

pub(crate) fn fabs(x: f64) -> f64 {
    if x < 0.0 {
        -x
    } else {
        x
    }
}
