//! Structural validation of a resolved model.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use super::{codes, Diagnostic, Span};
use crate::model::{missing_combinations, Aggregation, GlmpModel, Level, PerceptionMapping};

const RUSPINI_SAMPLES: usize = 201;
const RUSPINI_TOL: f64 = 1e-9;

fn span_of(model: &GlmpModel, id: &str) -> Span {
    model.spans.get(id).copied().unwrap_or_default()
}

/// Checks every model invariant: Ruspini partitions, measure ranges, DAG
/// shape, order consistency, aggregation arity, rule-base completeness,
/// weight positivity, template placeholders, and consumption of every
/// non-top component. Empty error set means the model is evaluable.
pub fn validate_model(model: &GlmpModel) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();

    if model.skills.is_empty() {
        diagnostics.push(Diagnostic::error(
            codes::NO_SKILL,
            Span::default(),
            String::from("no skill defined"),
        ));
    }

    for (name, var) in &model.variables {
        if var.membership.len() != var.labels.len() {
            diagnostics.push(Diagnostic::error(
                codes::PARTITION,
                span_of(model, name),
                alloc::format!("variable '{}' has a membership/label count mismatch", var.name),
            ));
        } else if !var.is_ruspini(RUSPINI_SAMPLES, RUSPINI_TOL) {
            diagnostics.push(Diagnostic::error(
                codes::PARTITION,
                span_of(model, name),
                alloc::format!(
                    "partition of variable '{}' is not Ruspini: membership degrees must sum to 1 over [0, 1]",
                    var.name
                ),
            ));
        }
        let mut dup = BTreeSet::new();
        for label in &var.labels {
            if !dup.insert(label.to_ascii_lowercase()) {
                diagnostics.push(Diagnostic::error(
                    codes::DUPLICATE,
                    span_of(model, name),
                    alloc::format!("variable '{}' repeats label '{}'", var.name, label),
                ));
            }
        }
    }

    for (name, spec) in &model.measures {
        if spec.lo > spec.hi {
            diagnostics.push(Diagnostic::error(
                codes::RANGE,
                span_of(model, name),
                alloc::format!(
                    "measure '{}' range ({}, {}) must have lo < hi",
                    spec.name,
                    spec.lo,
                    spec.hi
                ),
            ));
        } else if spec.lo == spec.hi {
            diagnostics.push(Diagnostic::warning(
                codes::RANGE,
                span_of(model, name),
                alloc::format!(
                    "measure '{}' has degenerate bounds; all values normalize to 0.5",
                    spec.name
                ),
            ));
        }
    }

    let in_cycle = detect_cycles(model, &mut diagnostics);

    for pm in &model.mappings {
        if pm.level == Level::Measure {
            check_template(model, pm, &mut diagnostics);
            continue;
        }
        let span = span_of(model, &pm.id);

        for input in &pm.inputs {
            if in_cycle.contains(&pm.id) || in_cycle.contains(input) {
                continue; // already reported as a cycle
            }
            match model.mapping(input) {
                Some(dep) if dep.level.order() + 1 != pm.level.order() => {
                    diagnostics.push(Diagnostic::error(
                        codes::ORDER,
                        span,
                        alloc::format!(
                            "{} '{}' takes input '{}' of level {}, expected a {}",
                            pm.level.keyword(),
                            pm.display,
                            dep.display,
                            dep.level.keyword(),
                            level_below(pm.level),
                        ),
                    ));
                }
                _ => {}
            }
        }

        match &pm.aggregation {
            Aggregation::Fuzzify => {}
            Aggregation::Rules(rules) => {
                if pm.inputs.len() > 3 {
                    diagnostics.push(Diagnostic::error(
                        codes::ARITY,
                        span,
                        alloc::format!(
                            "'{}' uses rules over {} inputs; rule-based aggregation supports at most three inputs, use weights instead",
                            pm.display,
                            pm.inputs.len()
                        ),
                    ));
                } else if !in_cycle.contains(&pm.id) {
                    let counts: Vec<usize> = pm
                        .inputs
                        .iter()
                        .filter_map(|i| model.mapping(i))
                        .map(|dep| model.output_variable(dep).label_count())
                        .collect();
                    if counts.len() == pm.inputs.len() {
                        let missing = missing_combinations(rules, &counts);
                        if !missing.is_empty() {
                            diagnostics.push(Diagnostic::error(
                                codes::RULE_HOLE,
                                span,
                                describe_holes(model, pm, &missing),
                            ));
                        }
                    }
                }
            }
            Aggregation::Weighted(weights) => {
                if pm.inputs.len() <= 3 {
                    diagnostics.push(Diagnostic::error(
                        codes::ARITY,
                        span,
                        alloc::format!(
                            "'{}' uses weights over {} inputs; aspects of up to three inputs are aggregated with rules",
                            pm.display,
                            pm.inputs.len()
                        ),
                    ));
                }
                if weights.len() != pm.inputs.len() {
                    diagnostics.push(Diagnostic::error(
                        codes::ARITY,
                        span,
                        alloc::format!(
                            "'{}' declares {} weights for {} inputs",
                            pm.display,
                            weights.len(),
                            pm.inputs.len()
                        ),
                    ));
                }
                if weights.iter().any(|w| *w < 0.0) {
                    diagnostics.push(Diagnostic::error(
                        codes::WEIGHTS,
                        span,
                        alloc::format!("'{}' has negative weights", pm.display),
                    ));
                } else if weights.iter().sum::<f64>() <= 0.0 {
                    diagnostics.push(Diagnostic::error(
                        codes::WEIGHTS,
                        span,
                        alloc::format!("'{}' has all-zero weights", pm.display),
                    ));
                }
            }
        }
        check_template(model, pm, &mut diagnostics);
    }

    // every non-top component must feed something
    let consumed: BTreeSet<&String> = model
        .mappings
        .iter()
        .filter(|pm| pm.level != Level::Measure)
        .flat_map(|pm| pm.inputs.iter())
        .collect();
    for pm in &model.mappings {
        if pm.level != Level::Skill && !consumed.contains(&pm.id) {
            diagnostics.push(Diagnostic::error(
                codes::UNUSED,
                span_of(model, &pm.id),
                alloc::format!(
                    "{} '{}' is never consumed by another mapping",
                    pm.level.keyword(),
                    pm.display
                ),
            ));
        }
    }

    diagnostics.sort_by_key(|d| d.span);
    diagnostics
}

fn level_below(level: Level) -> &'static str {
    match level {
        Level::Skill => "dimension",
        Level::Dimension => "attribute",
        _ => "measure",
    }
}

fn describe_holes(model: &GlmpModel, pm: &PerceptionMapping, missing: &[Vec<usize>]) -> String {
    let mut msg = alloc::format!(
        "rule base of '{}' misses {} combination(s):",
        pm.display,
        missing.len()
    );
    for combo in missing.iter().take(5) {
        msg.push(' ');
        let parts: Vec<String> = combo
            .iter()
            .enumerate()
            .map(|(i, &label)| {
                let dep = model.mapping(&pm.inputs[i]).expect("resolved input");
                let var = model.output_variable(dep);
                alloc::format!("{}={}", dep.display, var.labels[label])
            })
            .collect();
        msg.push('[');
        msg.push_str(&parts.join(", "));
        msg.push(']');
    }
    if missing.len() > 5 {
        msg.push_str(" ...");
    }
    msg
}

fn check_template(model: &GlmpModel, pm: &PerceptionMapping, diagnostics: &mut Vec<Diagnostic>) {
    let Some(template) = &pm.template else {
        return;
    };
    for placeholder in crate::report::placeholders(template) {
        if !matches!(placeholder, "component" | "label" | "child:*") {
            diagnostics.push(Diagnostic::error(
                codes::PLACEHOLDER,
                span_of(model, &pm.id),
                alloc::format!(
                    "template of '{}' uses unknown placeholder '{{{placeholder}}}'",
                    pm.display
                ),
            ));
        }
    }
}

/// Depth-first cycle detection over the input graph. Returns the ids
/// involved in cycles so later checks can skip them.
fn detect_cycles(model: &GlmpModel, diagnostics: &mut Vec<Diagnostic>) -> BTreeSet<String> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Visiting,
        Done,
    }
    let mut marks: BTreeMap<String, Mark> = BTreeMap::new();
    let mut in_cycle: BTreeSet<String> = BTreeSet::new();

    fn visit(
        model: &GlmpModel,
        id: &str,
        marks: &mut BTreeMap<String, Mark>,
        in_cycle: &mut BTreeSet<String>,
        stack: &mut Vec<String>,
    ) {
        match marks.get(id) {
            Some(Mark::Done) => return,
            Some(Mark::Visiting) => {
                // everything from the first occurrence on the stack cycles
                let start = stack.iter().position(|s| s == id).unwrap_or(0);
                for s in &stack[start..] {
                    in_cycle.insert(s.clone());
                }
                in_cycle.insert(String::from(id));
                return;
            }
            None => {}
        }
        marks.insert(String::from(id), Mark::Visiting);
        stack.push(String::from(id));
        if let Some(pm) = model.mapping(id) {
            if pm.level != Level::Measure {
                for input in pm.inputs.clone() {
                    visit(model, &input, marks, in_cycle, stack);
                }
            }
        }
        stack.pop();
        marks.insert(String::from(id), Mark::Done);
    }

    let ids: Vec<String> = model.mappings.iter().map(|pm| pm.id.clone()).collect();
    let mut stack = Vec::new();
    for id in ids {
        visit(model, &id, &mut marks, &mut in_cycle, &mut stack);
    }

    for id in &in_cycle {
        let display = model
            .mapping(id)
            .map(|pm| pm.display.clone())
            .unwrap_or_else(|| id.clone());
        diagnostics.push(Diagnostic::error(
            codes::CYCLE,
            span_of(model, id),
            alloc::format!("cycle detected through '{display}'"),
        ));
    }
    in_cycle
}
