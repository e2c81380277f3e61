//! Name resolution: raw statements to a wired model.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::codes;
use super::parser::{RawAggregation, RawModel, RawStatement, Spanned};
use super::Diagnostic;
use crate::model::{
    Aggregation, FuzzyRule, GlmpModel, Level, MeasureSpec, PerceptionMapping, DEFAULT_VARIABLE,
};
use crate::variable::{LinguisticVariable, MembershipFunction};

fn key(name: &str) -> String {
    name.to_ascii_lowercase()
}

/// Turns a raw parse into a model, reporting unknown identifiers and
/// duplicates. Structural invariants are checked later by the validator.
pub(crate) fn resolve(raw: RawModel) -> (Option<GlmpModel>, Vec<Diagnostic>) {
    let mut diagnostics = Vec::new();
    let mut model = GlmpModel {
        variables: BTreeMap::new(),
        variable_order: Vec::new(),
        measures: BTreeMap::new(),
        mappings: Vec::new(),
        skills: Vec::new(),
        spans: BTreeMap::new(),
    };
    model.variables.insert(
        DEFAULT_VARIABLE.to_string(),
        LinguisticVariable::default_three(DEFAULT_VARIABLE),
    );

    for var in &raw.variables {
        let k = key(&var.name.value);
        if model.variables.contains_key(&k) {
            diagnostics.push(Diagnostic::error(
                codes::DUPLICATE,
                var.name.span,
                alloc::format!("variable '{}' is already defined", var.name.value),
            ));
            continue;
        }
        let labels: Vec<&str> = var.labels.iter().map(|l| l.value.as_str()).collect();
        let mut lv = LinguisticVariable::uniform(&var.name.value, &labels);
        if let Some(triples) = &var.partition {
            if triples.len() != labels.len() {
                diagnostics.push(Diagnostic::error(
                    codes::PARTITION,
                    var.name.span,
                    alloc::format!(
                        "partition has {} functions for {} labels",
                        triples.len(),
                        labels.len()
                    ),
                ));
                continue;
            }
            let mut ok = true;
            let mut membership = Vec::with_capacity(triples.len());
            for &(a, b, c) in triples {
                match MembershipFunction::new(a, b, c) {
                    Some(m) => membership.push(m),
                    None => {
                        diagnostics.push(Diagnostic::error(
                            codes::PARTITION,
                            var.name.span,
                            alloc::format!(
                                "membership parameters ({a}, {b}, {c}) must satisfy 0 <= left <= peak <= right <= 1"
                            ),
                        ));
                        ok = false;
                    }
                }
            }
            if !ok {
                continue;
            }
            lv.membership = membership;
        }
        model.spans.insert(k.clone(), var.name.span);
        model.variable_order.push(k.clone());
        model.variables.insert(k, lv);
    }

    // first pass: register every component name so forward references work
    let mut declared: BTreeMap<String, Level> = BTreeMap::new();
    for stmt in &raw.statements {
        let (name, level) = match stmt {
            RawStatement::Measure(m) => (&m.name, Level::Measure),
            RawStatement::Mapping(m) => (&m.name, m.level),
        };
        let k = key(&name.value);
        if declared.contains_key(&k) {
            diagnostics.push(Diagnostic::error(
                codes::DUPLICATE,
                name.span,
                alloc::format!("'{}' is already defined", name.value),
            ));
        } else {
            declared.insert(k.clone(), level);
            model.spans.insert(k, name.span);
        }
    }

    let lookup_variable = |model: &GlmpModel,
                           diagnostics: &mut Vec<Diagnostic>,
                           var: &Option<Spanned<String>>|
     -> Option<String> {
        match var {
            None => Some(DEFAULT_VARIABLE.to_string()),
            Some(v) => {
                let k = key(&v.value);
                if model.variables.contains_key(&k) {
                    Some(k)
                } else {
                    diagnostics.push(Diagnostic::error(
                        codes::UNKNOWN_IDENT,
                        v.span,
                        alloc::format!("unknown variable '{}'", v.value),
                    ));
                    None
                }
            }
        }
    };

    let mut seen: BTreeMap<String, ()> = BTreeMap::new();
    for stmt in &raw.statements {
        match stmt {
            RawStatement::Measure(m) => {
                let k = key(&m.name.value);
                if seen.contains_key(&k) {
                    continue; // duplicate, already reported
                }
                seen.insert(k.clone(), ());
                let Some(var) = lookup_variable(&model, &mut diagnostics, &m.variable) else {
                    continue;
                };
                model.measures.insert(
                    k.clone(),
                    MeasureSpec {
                        name: m.name.value.clone(),
                        unit: m.unit.clone(),
                        lo: m.lo,
                        hi: m.hi,
                        invert: m.invert,
                        source: m.source,
                    },
                );
                model.mappings.push(PerceptionMapping {
                    id: k.clone(),
                    display: m.name.value.clone(),
                    level: Level::Measure,
                    inputs: alloc::vec![k],
                    output_variable: var,
                    aggregation: Aggregation::Fuzzify,
                    template: m.template.clone(),
                });
            }
            RawStatement::Mapping(m) => {
                let k = key(&m.name.value);
                if seen.contains_key(&k) {
                    continue;
                }
                seen.insert(k.clone(), ());
                let Some(var) = lookup_variable(&model, &mut diagnostics, &m.variable) else {
                    continue;
                };

                let mut inputs = Vec::with_capacity(m.inputs.len());
                let mut input_ok = true;
                for input in &m.inputs {
                    let ik = key(&input.value);
                    if declared.contains_key(&ik) {
                        inputs.push(ik);
                    } else {
                        diagnostics.push(Diagnostic::error(
                            codes::UNKNOWN_IDENT,
                            input.span,
                            alloc::format!("unknown input '{}'", input.value),
                        ));
                        input_ok = false;
                    }
                }
                if !input_ok {
                    continue;
                }

                let aggregation = match &m.aggregation {
                    RawAggregation::Weights(w) => Aggregation::Weighted(w.value.clone()),
                    RawAggregation::Rules(rules) => {
                        match resolve_rules(&model, &raw, &inputs, &var, rules, &mut diagnostics)
                        {
                            Some(r) => Aggregation::Rules(r),
                            None => continue,
                        }
                    }
                };
                model.mappings.push(PerceptionMapping {
                    id: k.clone(),
                    display: m.name.value.clone(),
                    level: m.level,
                    inputs,
                    output_variable: var,
                    aggregation,
                    template: m.template.clone(),
                });
                if m.level == Level::Skill {
                    model.skills.push(k);
                }
            }
        }
    }

    (Some(model), diagnostics)
}

/// Looks up the output variable an input component fuzzifies into, from
/// the raw statements (the component may not be lowered yet).
fn input_variable<'a>(
    model: &'a GlmpModel,
    raw: &RawModel,
    input_key: &str,
) -> Option<&'a LinguisticVariable> {
    let var_name = raw.statements.iter().find_map(|s| {
        let (name, var) = match s {
            RawStatement::Measure(m) => (&m.name, &m.variable),
            RawStatement::Mapping(m) => (&m.name, &m.variable),
        };
        (key(&name.value) == input_key).then(|| {
            var.as_ref()
                .map(|v| key(&v.value))
                .unwrap_or_else(|| DEFAULT_VARIABLE.to_string())
        })
    })?;
    model.variables.get(&var_name)
}

fn resolve_rules(
    model: &GlmpModel,
    raw: &RawModel,
    inputs: &[String],
    out_var: &str,
    rules: &[super::parser::RawRule],
    diagnostics: &mut Vec<Diagnostic>,
) -> Option<Vec<FuzzyRule>> {
    let out_variable = model.variables.get(out_var)?;
    let mut resolved = Vec::with_capacity(rules.len());
    let mut ok = true;
    for rule in rules {
        let mut antecedents = Vec::with_capacity(rule.antecedents.len());
        for (input, label) in &rule.antecedents {
            let ik = key(&input.value);
            let Some(index) = inputs.iter().position(|i| *i == ik) else {
                diagnostics.push(Diagnostic::error(
                    codes::UNKNOWN_IDENT,
                    input.span,
                    alloc::format!(
                        "'{}' is not an input of this mapping",
                        input.value
                    ),
                ));
                ok = false;
                continue;
            };
            if antecedents.iter().any(|&(i, _)| i == index) {
                diagnostics.push(Diagnostic::error(
                    codes::DUPLICATE,
                    input.span,
                    alloc::format!("input '{}' appears twice in one rule", input.value),
                ));
                ok = false;
                continue;
            }
            let Some(var) = input_variable(model, raw, &ik) else {
                ok = false;
                continue;
            };
            let Some(label_index) = var.label_index(&label.value) else {
                diagnostics.push(Diagnostic::error(
                    codes::UNKNOWN_IDENT,
                    label.span,
                    alloc::format!(
                        "variable '{}' has no label '{}'",
                        var.name,
                        label.value
                    ),
                ));
                ok = false;
                continue;
            };
            antecedents.push((index, label_index));
        }
        let Some(consequent) = out_variable.label_index(&rule.consequent.value) else {
            diagnostics.push(Diagnostic::error(
                codes::UNKNOWN_IDENT,
                rule.consequent.span,
                alloc::format!(
                    "variable '{}' has no label '{}'",
                    out_variable.name,
                    rule.consequent.value
                ),
            ));
            ok = false;
            continue;
        };
        antecedents.sort_by_key(|&(i, _)| i);
        resolved.push(FuzzyRule {
            antecedents,
            consequent,
        });
    }
    // canonical order: by antecedent labels per input slot (wildcards
    // last), then consequent; matches the serializer
    resolved.sort_by_key(|rule| {
        let mut slot_labels: Vec<usize> = alloc::vec![usize::MAX; inputs.len()];
        for &(input, label) in &rule.antecedents {
            slot_labels[input] = label;
        }
        (slot_labels, rule.consequent)
    });
    ok.then_some(resolved)
}
