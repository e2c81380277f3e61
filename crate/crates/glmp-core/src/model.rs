//! Model structure: measures, perception mappings, and the wired network.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::EvalError;
use crate::variable::LinguisticVariable;

/// Hierarchy level of a perception mapping; doubles as its order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Measure,
    Attribute,
    Dimension,
    Skill,
}

impl Level {
    pub fn order(self) -> u8 {
        match self {
            Level::Measure => 1,
            Level::Attribute => 2,
            Level::Dimension => 3,
            Level::Skill => 4,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            Level::Measure => "measure",
            Level::Attribute => "attribute",
            Level::Dimension => "dimension",
            Level::Skill => "skill",
        }
    }
}

/// Modality the raw measure value originates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Text,
    Audio,
    Video,
}

impl Source {
    pub fn keyword(self) -> &'static str {
        match self {
            Source::Text => "text",
            Source::Audio => "audio",
            Source::Video => "video",
        }
    }
}

/// Ingestion schema for one raw measure: unit, normalization bounds, and
/// direction. `invert` marks measures where larger raw values mean worse
/// (reaction time, crutches, redundancy, vagueness).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub name: String,
    pub unit: String,
    pub lo: f64,
    pub hi: f64,
    pub invert: bool,
    pub source: Source,
}

impl MeasureSpec {
    /// Maps a raw value into [0, 1]: `clamp((raw - lo) / (hi - lo))`,
    /// flipped when `invert` is set. Degenerate bounds (`lo == hi`) map to
    /// the domain center; callers surface that as a warning.
    pub fn normalize(&self, raw: f64) -> Result<(f64, bool), EvalError> {
        if !raw.is_finite() {
            return Err(EvalError::NonFinite {
                measure: self.name.clone(),
                value: raw,
            });
        }
        if self.lo == self.hi {
            return Ok((0.5, true));
        }
        let t = (raw - self.lo) / (self.hi - self.lo);
        let t = t.clamp(0.0, 1.0);
        Ok((if self.invert { 1.0 - t } else { t }, false))
    }
}

/// Raw per-student, per-task measure values. Keys are stored lowercase;
/// student codes are anonymized upstream.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureBundle {
    pub student: String,
    pub task: String,
    pub values: BTreeMap<String, f64>,
}

impl MeasureBundle {
    pub fn new(student: &str, task: &str) -> Self {
        Self {
            student: student.to_string(),
            task: task.to_string(),
            values: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, measure: &str, value: f64) {
        self.values.insert(measure.to_ascii_lowercase(), value);
    }

    pub fn get(&self, measure: &str) -> Option<f64> {
        self.values.get(&measure.to_ascii_lowercase()).copied()
    }
}

/// One inference rule: antecedents are (input index, label index) pairs,
/// at most one per input; omitted inputs act as wildcards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuzzyRule {
    pub antecedents: Vec<(usize, usize)>,
    pub consequent: usize,
}

impl FuzzyRule {
    /// True when the rule matches a crisp label combination.
    pub fn matches(&self, combo: &[usize]) -> bool {
        self.antecedents
            .iter()
            .all(|&(input, label)| combo[input] == label)
    }
}

/// Aggregation strategy of a perception mapping.
#[derive(Debug, Clone, PartialEq)]
pub enum Aggregation {
    /// Order-1: fuzzify a normalized scalar.
    Fuzzify,
    /// Mamdani min/max inference over a complete rule base (<= 3 inputs).
    Rules(Vec<FuzzyRule>),
    /// Centroid-collapse inputs to scalars, average with per-input weights,
    /// refuzzify (> 3 inputs).
    Weighted(Vec<f64>),
}

/// A node of the perception network: inputs, output variable, aggregation
/// strategy, and a text template for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionMapping {
    /// Lowercased identity key.
    pub id: String,
    /// Spelling as declared, used for display.
    pub display: String,
    pub level: Level,
    /// Input keys: the measure name for order-1 mappings, otherwise the
    /// ids of the mappings producing the input perceptions.
    pub inputs: Vec<String>,
    /// Name of the output linguistic variable.
    pub output_variable: String,
    pub aggregation: Aggregation,
    /// Sentence template; `None` falls back to "{component} is {label}.".
    pub template: Option<String>,
}

/// Name of the implicit three-label output variable.
pub const DEFAULT_VARIABLE: &str = "level";

/// The validated perception network realizing one or more skills.
///
/// Construction goes through the DSL parser/validator; the invariants
/// (DAG shape, order consistency, rule-base completeness, aggregation
/// arity) are checked there.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmpModel {
    /// Variables by lowercased name; always contains [`DEFAULT_VARIABLE`].
    pub variables: BTreeMap<String, LinguisticVariable>,
    /// Declaration order of explicitly declared variables.
    pub variable_order: Vec<String>,
    /// Measure specs by lowercased name.
    pub measures: BTreeMap<String, MeasureSpec>,
    /// All perception mappings in declaration order (measures included).
    pub mappings: Vec<PerceptionMapping>,
    /// Ids of top-level (skill) mappings in declaration order.
    pub skills: Vec<String>,
    /// Source spans of definitions, keyed by lowercased name; empty for
    /// models built programmatically.
    pub spans: BTreeMap<String, crate::dsl::Span>,
}

impl GlmpModel {
    pub fn mapping(&self, id: &str) -> Option<&PerceptionMapping> {
        let key = id.to_ascii_lowercase();
        self.mappings.iter().find(|pm| pm.id == key)
    }

    pub fn variable(&self, name: &str) -> Option<&LinguisticVariable> {
        self.variables.get(&name.to_ascii_lowercase())
    }

    pub fn output_variable(&self, pm: &PerceptionMapping) -> &LinguisticVariable {
        self.variables
            .get(&pm.output_variable)
            .expect("validated model references a declared variable")
    }

    /// Structural equality, ignoring source spans.
    pub fn structurally_equal(&self, other: &GlmpModel) -> bool {
        self.variables == other.variables
            && self.variable_order == other.variable_order
            && self.measures == other.measures
            && self.mappings == other.mappings
            && self.skills == other.skills
    }

    /// Ids of mappings reachable from (and including) the given root.
    pub fn reachable(&self, root: &str) -> Vec<String> {
        let mut seen: Vec<String> = Vec::new();
        let mut stack = alloc::vec![root.to_ascii_lowercase()];
        while let Some(id) = stack.pop() {
            if seen.contains(&id) {
                continue;
            }
            if let Some(pm) = self.mapping(&id) {
                if pm.level != Level::Measure {
                    stack.extend(pm.inputs.iter().cloned());
                }
                seen.push(id);
            }
        }
        seen
    }
}

/// Enumerates every label combination for the given per-input label counts.
/// Used both by the completeness validator and by test oracles.
pub fn label_combinations(counts: &[usize]) -> Vec<Vec<usize>> {
    let mut combos = alloc::vec![Vec::new()];
    for &n in counts {
        let mut next = Vec::with_capacity(combos.len() * n);
        for combo in &combos {
            for label in 0..n {
                let mut c = combo.clone();
                c.push(label);
                next.push(c);
            }
        }
        combos = next;
    }
    combos
}

/// Label combinations not matched by any rule; empty means complete.
pub fn missing_combinations(rules: &[FuzzyRule], counts: &[usize]) -> Vec<Vec<usize>> {
    label_combinations(counts)
        .into_iter()
        .filter(|combo| !rules.iter().any(|r| r.matches(combo)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(lo: f64, hi: f64, invert: bool) -> MeasureSpec {
        MeasureSpec {
            name: "m".to_string(),
            unit: "seconds".to_string(),
            lo,
            hi,
            invert,
            source: Source::Audio,
        }
    }

    #[test]
    fn normalize_boundaries() {
        assert_eq!(spec(0.0, 30.0, false).normalize(0.0).unwrap(), (0.0, false));
        assert_eq!(spec(0.0, 30.0, true).normalize(0.0).unwrap(), (1.0, false));
        assert_eq!(spec(0.0, 30.0, false).normalize(30.0).unwrap(), (1.0, false));
    }

    #[test]
    fn normalize_midpoint_ignores_inversion() {
        assert_eq!(spec(0.0, 30.0, false).normalize(15.0).unwrap().0, 0.5);
        assert_eq!(spec(0.0, 30.0, true).normalize(15.0).unwrap().0, 0.5);
    }

    #[test]
    fn inverted_reaction_time_example() {
        // 12 s in (0, 30) inverted: 1 - 12/30
        assert_eq!(spec(0.0, 30.0, true).normalize(12.0).unwrap().0, 0.6);
    }

    #[test]
    fn normalize_clamps_out_of_range() {
        assert_eq!(spec(0.0, 30.0, false).normalize(-300.0).unwrap().0, 0.0);
        assert_eq!(spec(0.0, 30.0, false).normalize(300.0).unwrap().0, 1.0);
    }

    #[test]
    fn degenerate_bounds_map_to_center_with_warning() {
        assert_eq!(spec(5.0, 5.0, false).normalize(5.0).unwrap(), (0.5, true));
    }

    #[test]
    fn non_finite_raw_is_an_error() {
        assert!(spec(0.0, 1.0, false).normalize(f64::NAN).is_err());
        assert!(spec(0.0, 1.0, false).normalize(f64::INFINITY).is_err());
    }

    #[test]
    fn combination_enumeration_counts() {
        assert_eq!(label_combinations(&[3, 3, 3]).len(), 27);
        assert_eq!(label_combinations(&[3]).len(), 3);
        assert_eq!(label_combinations(&[]).len(), 1);
    }

    #[test]
    fn missing_combinations_found() {
        // one wildcard rule on input 0 covers a third of the 9 combos
        let rules = alloc::vec![FuzzyRule {
            antecedents: alloc::vec![(0, 1)],
            consequent: 1,
        }];
        assert_eq!(missing_combinations(&rules, &[3, 3]).len(), 6);
    }
}
