//! Canonical serializer. The output format is defined to the byte:
//! serializing any structurally equal model yields identical text, and
//! `parse(serialize(m))` is structurally identical to `m`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::model::{Aggregation, GlmpModel, Level, PerceptionMapping, DEFAULT_VARIABLE};
use crate::variable::LinguisticVariable;

const KEYWORDS: &[&str] = &[
    "variable", "labels", "partition", "measure", "unit", "range", "invert", "source",
    "attribute", "dimension", "skill", "of", "from", "using", "rules", "weights", "if", "is",
    "and", "then", "template", "text", "audio", "video",
];

/// Emits a name, quoting it when it is not a plain identifier.
fn name(out: &mut String, n: &str) {
    let plain = n
        .chars()
        .enumerate()
        .all(|(i, c)| {
            if i == 0 {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_' || c == '-'
            }
        })
        && !n.is_empty()
        && !KEYWORDS.contains(&n.to_ascii_lowercase().as_str());
    if plain {
        out.push_str(n);
    } else {
        quoted(out, n);
    }
}

fn quoted(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
}

fn variable_line(out: &mut String, var: &LinguisticVariable) {
    out.push_str("variable ");
    name(out, &var.name);
    out.push_str(" labels");
    for label in &var.labels {
        out.push(' ');
        name(out, label);
    }
    out.push_str(" partition");
    for m in &var.membership {
        let _ = write!(out, " ({}, {}, {})", m.left, m.peak, m.right);
    }
    out.push('\n');
}

fn of_clause(out: &mut String, pm: &PerceptionMapping) {
    if pm.output_variable != DEFAULT_VARIABLE {
        out.push_str(" of ");
        name(out, &pm.output_variable);
    }
}

fn template_clause(out: &mut String, pm: &PerceptionMapping) {
    if let Some(t) = &pm.template {
        out.push_str(" template ");
        quoted(out, t);
    }
}

/// Renders a validated model in canonical form.
pub fn serialize_model(model: &GlmpModel) -> String {
    let mut out = String::new();

    for key in &model.variable_order {
        if let Some(var) = model.variables.get(key) {
            variable_line(&mut out, var);
        }
    }

    for pm in &model.mappings {
        match pm.level {
            Level::Measure => {
                let spec = model
                    .measures
                    .get(&pm.id)
                    .expect("measure mapping has a spec");
                out.push_str("measure ");
                name(&mut out, &pm.display);
                of_clause(&mut out, pm);
                out.push_str(" unit ");
                quoted(&mut out, &spec.unit);
                let _ = write!(out, " range {} {}", spec.lo, spec.hi);
                if spec.invert {
                    out.push_str(" invert");
                }
                out.push_str(" source ");
                out.push_str(spec.source.keyword());
                template_clause(&mut out, pm);
                out.push('\n');
            }
            level => {
                out.push_str(level.keyword());
                out.push(' ');
                name(&mut out, &pm.display);
                of_clause(&mut out, pm);
                out.push_str(" from ");
                for (i, input) in pm.inputs.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    let display = model
                        .mapping(input)
                        .map(|dep| dep.display.clone())
                        .unwrap_or_else(|| input.clone());
                    name(&mut out, &display);
                }
                match &pm.aggregation {
                    Aggregation::Fuzzify => {}
                    Aggregation::Weighted(weights) => {
                        out.push_str(" using weights (");
                        for (i, w) in weights.iter().enumerate() {
                            if i > 0 {
                                out.push_str(", ");
                            }
                            let _ = write!(out, "{w}");
                        }
                        out.push(')');
                        template_clause(&mut out, pm);
                        out.push('\n');
                        continue;
                    }
                    Aggregation::Rules(rules) => {
                        out.push_str(" using rules {\n");
                        // stable ordering: rules sorted by antecedent labels
                        // per input slot (wildcards last), then consequent
                        let mut sorted: Vec<_> = rules.iter().collect();
                        sorted.sort_by_key(|rule| {
                            let mut slot_labels: Vec<usize> =
                                alloc::vec![usize::MAX; pm.inputs.len()];
                            for &(input, label) in &rule.antecedents {
                                slot_labels[input] = label;
                            }
                            (slot_labels, rule.consequent)
                        });
                        let out_var = model.output_variable(pm);
                        for rule in sorted {
                            out.push_str("  if ");
                            for (i, &(input, label)) in rule.antecedents.iter().enumerate() {
                                if i > 0 {
                                    out.push_str(" and ");
                                }
                                let dep =
                                    model.mapping(&pm.inputs[input]).expect("resolved input");
                                name(&mut out, &dep.display);
                                out.push_str(" is ");
                                name(&mut out, &model.output_variable(dep).labels[label]);
                            }
                            out.push_str(" then ");
                            name(&mut out, &out_var.labels[rule.consequent]);
                            out.push_str(";\n");
                        }
                        out.push('}');
                        template_clause(&mut out, pm);
                        out.push('\n');
                        continue;
                    }
                }
            }
        }
    }
    out
}
