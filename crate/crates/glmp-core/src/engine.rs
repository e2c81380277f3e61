//! Fuzzification, rule inference, weighted aggregation, and network
//! evaluation.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::EvalError;
use crate::model::{Aggregation, FuzzyRule, GlmpModel, Level, MeasureBundle};
use crate::perception::{select_label, ComputationalPerception, LabelOutcome};
use crate::variable::LinguisticVariable;

/// Fuzzifies a normalized scalar into a perception over `variable`.
pub fn fuzzify(
    z_norm: f64,
    variable: &LinguisticVariable,
) -> Result<ComputationalPerception, EvalError> {
    if !(0.0..=1.0).contains(&z_norm) {
        return Err(EvalError::OutOfRange {
            measure: variable.name.clone(),
            value: z_norm,
        });
    }
    let activations: Vec<f64> = variable.membership.iter().map(|m| m.degree(z_norm)).collect();
    ComputationalPerception::from_activations(variable, activations).ok_or(
        // cannot happen for a Ruspini partition; degrees sum to 1
        EvalError::EmptyActivation {
            mapping: variable.name.clone(),
        },
    )
}

/// Raw per-label activations of a rule base: firing strength of a rule is
/// the minimum of its antecedent validities, and each output label takes
/// the maximum firing strength among rules concluding it (Mamdani min/max).
pub fn rule_activations(
    inputs: &[&ComputationalPerception],
    rules: &[FuzzyRule],
    label_count: usize,
) -> Vec<f64> {
    let mut activations = alloc::vec![0.0; label_count];
    for rule in rules {
        let firing = rule
            .antecedents
            .iter()
            .map(|&(input, label)| inputs[input].validity[label])
            .fold(1.0f64, f64::min);
        if firing > activations[rule.consequent] {
            activations[rule.consequent] = firing;
        }
    }
    activations
}

/// Evaluates a complete rule base over at most three input perceptions.
pub fn evaluate_rules(
    inputs: &[&ComputationalPerception],
    rules: &[FuzzyRule],
    out_var: &LinguisticVariable,
) -> Result<ComputationalPerception, EvalError> {
    let activations = rule_activations(inputs, rules, out_var.label_count());
    ComputationalPerception::from_activations(out_var, activations).ok_or(
        EvalError::EmptyActivation {
            mapping: out_var.name.clone(),
        },
    )
}

/// Aggregates input perceptions by collapsing each to its centroid score,
/// taking the relevance-weighted mean, and refuzzifying over `out_var`.
pub fn evaluate_weighted(
    inputs: &[&ComputationalPerception],
    weights: &[f64],
    out_var: &LinguisticVariable,
) -> Result<ComputationalPerception, EvalError> {
    if inputs.len() != weights.len() {
        return Err(EvalError::ArityMismatch {
            mapping: out_var.name.clone(),
            expected: weights.len(),
            got: inputs.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(EvalError::AllZeroWeights {
            mapping: out_var.name.clone(),
        });
    }
    let scalar = inputs
        .iter()
        .zip(weights)
        .map(|(cp, w)| w * cp.centroid_score())
        .sum::<f64>()
        / total;
    // centroid scores live in [0, 1]; guard against rounding spill
    fuzzify(scalar.clamp(0.0, 1.0), out_var)
}

/// One evaluated perception mapping: its inputs, output, and rendered label.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub mapping: String,
    pub display: String,
    pub level: Level,
    pub inputs: Vec<ComputationalPerception>,
    pub output: ComputationalPerception,
    pub outcome: LabelOutcome,
}

/// Full record of one (student, task) evaluation, in topological order
/// (measures, then attributes, dimensions, and skills).
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationTrace {
    pub student: String,
    pub task: String,
    pub steps: Vec<TraceStep>,
    /// Measures whose normalization bounds were degenerate (mapped to 0.5).
    pub warnings: Vec<String>,
}

impl EvaluationTrace {
    pub fn step(&self, mapping: &str) -> Option<&TraceStep> {
        let key = mapping.to_ascii_lowercase();
        self.steps.iter().find(|s| s.mapping == key)
    }
}

/// Evaluates every mapping of a validated model over one bundle.
///
/// Mappings are visited level by level, in declaration order within a
/// level, so the trace ordering is deterministic and inputs are always
/// ready before their consumers.
pub fn evaluate_network(
    model: &GlmpModel,
    bundle: &MeasureBundle,
    tie_epsilon: f64,
) -> Result<EvaluationTrace, EvalError> {
    let mut trace = EvaluationTrace {
        student: bundle.student.clone(),
        task: bundle.task.clone(),
        steps: Vec::with_capacity(model.mappings.len()),
        warnings: Vec::new(),
    };

    for level in [Level::Measure, Level::Attribute, Level::Dimension, Level::Skill] {
        for pm in model.mappings.iter().filter(|pm| pm.level == level) {
            let out_var = model.output_variable(pm);
            let (inputs, output) = match &pm.aggregation {
                Aggregation::Fuzzify => {
                    let measure = &pm.inputs[0];
                    let spec = model
                        .measures
                        .get(measure)
                        .ok_or_else(|| EvalError::UnknownReference {
                            name: measure.clone(),
                        })?;
                    let raw = bundle.get(measure).ok_or_else(|| {
                        EvalError::MissingMeasure {
                            student: bundle.student.clone(),
                            task: bundle.task.clone(),
                            measure: measure.clone(),
                        }
                    })?;
                    let (z, degenerate) = spec.normalize(raw)?;
                    if degenerate {
                        trace.warnings.push(alloc::format!(
                            "measure '{measure}' has degenerate bounds; mapped to 0.5"
                        ));
                    }
                    (Vec::new(), fuzzify(z, out_var)?)
                }
                Aggregation::Rules(rules) => {
                    let cps = gather_inputs(&trace, pm)?;
                    let refs: Vec<&ComputationalPerception> = cps.iter().collect();
                    let out = evaluate_rules(&refs, rules, out_var)?;
                    (cps, out)
                }
                Aggregation::Weighted(weights) => {
                    let cps = gather_inputs(&trace, pm)?;
                    let refs: Vec<&ComputationalPerception> = cps.iter().collect();
                    let out = evaluate_weighted(&refs, weights, out_var)?;
                    (cps, out)
                }
            };
            let outcome = select_label(&output, tie_epsilon);
            trace.steps.push(TraceStep {
                mapping: pm.id.clone(),
                display: pm.display.clone(),
                level: pm.level,
                inputs,
                output,
                outcome,
            });
        }
    }
    Ok(trace)
}

fn gather_inputs(
    trace: &EvaluationTrace,
    pm: &crate::model::PerceptionMapping,
) -> Result<Vec<ComputationalPerception>, EvalError> {
    pm.inputs
        .iter()
        .map(|id| {
            trace
                .step(id)
                .map(|s| s.output.clone())
                .ok_or_else(|| EvalError::UnknownReference { name: id.clone() })
        })
        .collect()
}
