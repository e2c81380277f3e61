//! Computational perceptions and five-bin label selection.

use alloc::string::String;
use alloc::vec::Vec;

use crate::variable::LinguisticVariable;
use crate::{fabs, NORM_TOLERANCE};

/// Default tolerance for emitting a combined adjacent label ("M/H" etc.).
pub const DEFAULT_TIE_EPSILON: f64 = 0.1;

/// The value flowing through the perception network: an ordered label set
/// with a validity degree per label (summing to 1) and a relevance weight
/// per label.
#[derive(Debug, Clone, PartialEq)]
pub struct ComputationalPerception {
    /// Label spellings of the underlying linguistic variable, weakest first.
    pub labels: Vec<String>,
    /// Validity degrees, one per label; renormalized to sum to 1 after
    /// every operation.
    pub validity: Vec<f64>,
    /// Per-label relevance weights (non-negative).
    pub relevance: Vec<f64>,
}

impl ComputationalPerception {
    /// Builds a perception from raw activations, renormalizing them to
    /// sum to 1. Returns `None` when the total activation is zero.
    pub fn from_activations(
        variable: &LinguisticVariable,
        activations: Vec<f64>,
    ) -> Option<Self> {
        debug_assert_eq!(activations.len(), variable.label_count());
        let total: f64 = activations.iter().sum();
        if total <= 0.0 {
            return None;
        }
        Some(Self {
            labels: variable.labels.clone(),
            validity: activations.iter().map(|a| a / total).collect(),
            relevance: variable.relevance.clone(),
        })
    }

    /// One-hot perception for a single label; handy for crisp inputs.
    pub fn crisp(variable: &LinguisticVariable, label_index: usize) -> Self {
        let mut v = alloc::vec![0.0; variable.label_count()];
        v[label_index] = 1.0;
        Self {
            labels: variable.labels.clone(),
            validity: v,
            relevance: variable.relevance.clone(),
        }
    }

    pub fn label_count(&self) -> usize {
        self.labels.len()
    }

    /// Collapses the perception to a scalar score in [0, 1] using evenly
    /// spaced label centroids.
    pub fn centroid_score(&self) -> f64 {
        let n = self.label_count();
        self.validity
            .iter()
            .enumerate()
            .map(|(i, w)| w * (i as f64 / (n - 1) as f64))
            .sum()
    }

    /// True when the validity vector sums to 1 within the global tolerance.
    pub fn is_normalized(&self) -> bool {
        fabs(self.validity.iter().sum::<f64>() - 1.0) < NORM_TOLERANCE
    }
}

/// A rendered label decision: the dominant label, an optional adjacent
/// runner-up within the tie tolerance, and the five-bin display string.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelOutcome {
    pub primary: usize,
    pub secondary: Option<usize>,
    /// Display string on the five-bin scale, e.g. "M" or "M/H".
    pub rendered: String,
    /// Long display form, e.g. "Medium" or "Medium/High".
    pub rendered_long: String,
    pub validity: Vec<f64>,
}

/// Short display form of a label: its first character, uppercased.
fn short(label: &str) -> String {
    label
        .chars()
        .next()
        .map(|c| c.to_ascii_uppercase().into())
        .unwrap_or_default()
}

fn long(label: &str) -> String {
    let mut chars = label.chars();
    match chars.next() {
        Some(c) => {
            let mut s = String::new();
            s.push(c.to_ascii_uppercase());
            s.push_str(chars.as_str());
            s
        }
        None => String::new(),
    }
}

/// Picks the displayed label for a perception.
///
/// The primary label is the argmax of the validity vector (lowest index on
/// exact ties). When the runner-up is adjacent in label order and within
/// `tie_epsilon` of the maximum, a combined label is rendered with the
/// weaker label first.
pub fn select_label(cp: &ComputationalPerception, tie_epsilon: f64) -> LabelOutcome {
    let primary = cp
        .validity
        .iter()
        .enumerate()
        .fold(0usize, |best, (i, w)| {
            if *w > cp.validity[best] {
                i
            } else {
                best
            }
        });
    let secondary = cp
        .validity
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != primary)
        .fold(None::<usize>, |best, (i, w)| match best {
            Some(b) if cp.validity[b] >= *w => Some(b),
            _ => Some(i),
        })
        .filter(|&runner| {
            runner.abs_diff(primary) == 1
                && fabs(cp.validity[primary] - cp.validity[runner]) <= tie_epsilon
        });

    let (rendered, rendered_long) = match secondary {
        Some(s) => {
            let (lo, hi) = if s < primary { (s, primary) } else { (primary, s) };
            (
                alloc::format!("{}/{}", short(&cp.labels[lo]), short(&cp.labels[hi])),
                alloc::format!("{}/{}", long(&cp.labels[lo]), long(&cp.labels[hi])),
            )
        }
        None => (short(&cp.labels[primary]), long(&cp.labels[primary])),
    };

    LabelOutcome {
        primary,
        secondary,
        rendered,
        rendered_long,
        validity: cp.validity.clone(),
    }
}
