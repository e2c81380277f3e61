//! Pre-reports and deterministic text rendering.
//!
//! The pre-report mirrors the perception hierarchy with one rendered label
//! per node. Text rendering substitutes PM templates; it never invents a
//! label that is not in the pre-report, and an optional jargon blocklist
//! is enforced on the output.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use crate::engine::EvaluationTrace;
use crate::model::{GlmpModel, Level};
use crate::perception::LabelOutcome;

/// Default sentence used when a mapping declares no template.
pub const DEFAULT_TEMPLATE: &str = "{component} is {label}.";

/// Terms that must not appear in rendered reports; overridable.
pub const DEFAULT_BLOCKLIST: &[&str] = &[
    "fuzzy",
    "fuzzification",
    "membership",
    "validity",
    "aggregation",
    "perception mapping",
    "rule base",
    "centroid",
];

/// One node of the hierarchical pre-report.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportNode {
    /// Lowercased mapping id, used for template lookup.
    pub id: String,
    /// Human-readable component name.
    pub name: String,
    pub level: Level,
    pub outcome: LabelOutcome,
    pub children: Vec<ReportNode>,
}

impl ReportNode {
    pub fn count(&self) -> usize {
        1 + self.children.iter().map(ReportNode::count).sum::<usize>()
    }

    /// Position on the five-bin scale: 0 = L, 1 = L/M, 2 = M, 3 = M/H,
    /// 4 = H (for three-label variables; scales with label count).
    pub fn bin(&self) -> usize {
        match self.outcome.secondary {
            Some(s) => 2 * self.outcome.primary.min(s) + 1,
            None => 2 * self.outcome.primary,
        }
    }
}

/// The structured per-level label tree for one (student, task), one root
/// per evaluated skill.
#[derive(Debug, Clone, PartialEq)]
pub struct PreReport {
    pub student: String,
    pub task: String,
    pub skills: Vec<ReportNode>,
}

/// Builds the pre-report from a completed trace: one node per perception
/// mapping reachable from each skill, children in declaration order.
pub fn build_prereport(model: &GlmpModel, trace: &EvaluationTrace) -> PreReport {
    fn node(model: &GlmpModel, trace: &EvaluationTrace, id: &str) -> ReportNode {
        let pm = model.mapping(id).expect("validated model");
        let step = trace.step(id).expect("complete trace");
        let children = if pm.level == Level::Measure {
            Vec::new()
        } else {
            pm.inputs
                .iter()
                .map(|input| node(model, trace, input))
                .collect()
        };
        ReportNode {
            id: pm.id.clone(),
            name: humanize(&pm.display),
            level: pm.level,
            outcome: step.outcome.clone(),
            children,
        }
    }

    PreReport {
        student: trace.student.clone(),
        task: trace.task.clone(),
        skills: model
            .skills
            .iter()
            .map(|skill| node(model, trace, skill))
            .collect(),
    }
}

/// "reaction_time" -> "Reaction time".
pub fn humanize(name: &str) -> String {
    let spaced = name.replace('_', " ");
    let mut chars = spaced.chars();
    match chars.next() {
        Some(c) => {
            let mut s = String::new();
            s.push(c.to_ascii_uppercase());
            s.push_str(chars.as_str());
            s
        }
        None => spaced,
    }
}

/// Placeholder names appearing in a template, in order.
pub fn placeholders(template: &str) -> Vec<&str> {
    let mut found = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) => {
                found.push(&after[..close]);
                rest = &after[close + 1..];
            }
            None => break,
        }
    }
    found
}

/// Rendered natural-language report for one (student, task).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDocument {
    pub student: String,
    pub task: String,
    pub sections: Vec<SkillSection>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkillSection {
    pub skill: String,
    /// Rendered five-bin label of the skill.
    pub label: String,
    pub summary: String,
    /// "Name (Label)" entries with labels at Medium/High or above.
    pub strengths: Vec<String>,
    /// Entries at Low/Medium or below.
    pub improvements: Vec<String>,
    /// One rendered sentence per dimension.
    pub explanations: Vec<String>,
}

/// Rendering failures. Unknown placeholders are caught at model
/// validation; only the jargon blocklist can fail here.
#[derive(Debug, Clone, PartialEq)]
pub enum ReportError {
    JargonTerm { term: String, sentence: String },
}

impl core::fmt::Display for ReportError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ReportError::JargonTerm { term, sentence } => write!(
                f,
                "rendered text contains blocklisted term '{term}' in: {sentence}"
            ),
        }
    }
}

fn template_for(model: &GlmpModel, id: &str) -> String {
    model
        .mapping(id)
        .and_then(|pm| pm.template.clone())
        .unwrap_or_else(|| DEFAULT_TEMPLATE.to_string())
}

/// Merges consecutive children with identical labels into one clause:
/// "Reaction time is Low; Fluency and Speech speed are Medium".
fn child_clause(children: &[ReportNode]) -> String {
    let mut groups: Vec<(Vec<&str>, &str)> = Vec::new();
    for child in children {
        match groups.last_mut() {
            Some((names, label)) if *label == child.outcome.rendered_long => {
                names.push(&child.name);
            }
            _ => groups.push((alloc::vec![child.name.as_str()], &child.outcome.rendered_long)),
        }
    }
    let mut out = String::new();
    for (i, (names, label)) in groups.iter().enumerate() {
        if i > 0 {
            out.push_str("; ");
        }
        match names.len() {
            1 => {
                let _ = write!(out, "{} is {label}", names[0]);
            }
            n => {
                for (j, name) in names.iter().enumerate() {
                    if j > 0 {
                        out.push_str(if j + 1 == n { " and " } else { ", " });
                    }
                    out.push_str(name);
                }
                let _ = write!(out, " are {label}");
            }
        }
    }
    out
}

fn render_node(templates: &dyn Fn(&str, Level) -> String, node: &ReportNode) -> String {
    let template = templates(&node.id, node.level);
    let mut out = String::new();
    let mut rest = template.as_str();
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        match after.find('}') {
            Some(close) => {
                match &after[..close] {
                    "component" => out.push_str(&node.name),
                    "label" => out.push_str(&node.outcome.rendered_long),
                    "child:*" => out.push_str(&child_clause(&node.children)),
                    other => {
                        // unreachable after validation; keep the raw text
                        let _ = write!(out, "{{{other}}}");
                    }
                }
                rest = &after[close + 1..];
            }
            None => {
                out.push_str(&rest[open..]);
                rest = "";
            }
        }
    }
    out.push_str(rest);
    out
}

fn collect_extremes(
    node: &ReportNode,
    high_bin: usize,
    strengths: &mut Vec<String>,
    improvements: &mut Vec<String>,
) {
    if node.level != Level::Skill {
        let entry = alloc::format!("{} ({})", node.name, node.outcome.rendered_long);
        if node.bin() >= high_bin {
            strengths.push(entry);
        } else if node.bin() <= 1 {
            improvements.push(entry);
        }
    }
    for child in &node.children {
        collect_extremes(child, high_bin, strengths, improvements);
    }
}

/// Renders the deterministic report document from a pre-report using the
/// model's templates. `blocklist` defaults to [`DEFAULT_BLOCKLIST`].
pub fn render_text(
    model: &GlmpModel,
    pre: &PreReport,
    blocklist: Option<&[&str]>,
) -> Result<ReportDocument, ReportError> {
    render_with_templates(pre, &|id, _| template_for(model, id), blocklist)
}

/// Like [`render_text`], but templates come from a lookup instead of a
/// model, so a pre-report can be rendered on its own (the serialized tree
/// does not carry templates).
pub fn render_with_templates(
    pre: &PreReport,
    templates: &dyn Fn(&str, Level) -> String,
    blocklist: Option<&[&str]>,
) -> Result<ReportDocument, ReportError> {
    let blocklist = blocklist.unwrap_or(DEFAULT_BLOCKLIST);
    let mut sections = Vec::with_capacity(pre.skills.len());
    for skill in &pre.skills {
        let summary = render_node(templates, skill);
        let mut strengths = Vec::new();
        let mut improvements = Vec::new();
        // M/H for three labels; one bin below the top in general
        let high_bin = 2 * (skill.outcome.validity.len() - 1) - 1;
        collect_extremes(skill, high_bin, &mut strengths, &mut improvements);
        let explanations: Vec<String> = skill
            .children
            .iter()
            .filter(|c| c.level == Level::Dimension)
            .map(|c| render_node(templates, c))
            .collect();
        let section = SkillSection {
            skill: skill.name.clone(),
            label: skill.outcome.rendered.clone(),
            summary,
            strengths,
            improvements,
            explanations,
        };
        for sentence in core::iter::once(&section.summary).chain(&section.explanations) {
            let lower = sentence.to_ascii_lowercase();
            if let Some(term) = blocklist.iter().find(|t| lower.contains(&t.to_ascii_lowercase())) {
                return Err(ReportError::JargonTerm {
                    term: term.to_string(),
                    sentence: sentence.clone(),
                });
            }
        }
        sections.push(section);
    }
    Ok(ReportDocument {
        student: pre.student.clone(),
        task: pre.task.clone(),
        sections,
    })
}

impl ReportDocument {
    /// Markdown rendering; byte-deterministic for a given document.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# Soft skill report: student {}, task {}\n",
            self.student, self.task
        );
        for section in &self.sections {
            let _ = writeln!(out, "## {} — {}\n", section.skill, section.label);
            let _ = writeln!(out, "{}\n", section.summary);
            if !section.explanations.is_empty() {
                for e in &section.explanations {
                    let _ = writeln!(out, "- {e}");
                }
                out.push('\n');
            }
            let _ = writeln!(out, "**Strengths**\n");
            if section.strengths.is_empty() {
                let _ = writeln!(out, "- none identified");
            } else {
                for s in &section.strengths {
                    let _ = writeln!(out, "- {s}");
                }
            }
            let _ = writeln!(out, "\n**Areas for improvement**\n");
            if section.improvements.is_empty() {
                let _ = writeln!(out, "- none identified");
            } else {
                for s in &section.improvements {
                    let _ = writeln!(out, "- {s}");
                }
            }
            out.push('\n');
        }
        out
    }
}

fn json_escape(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
}

fn node_json(out: &mut String, node: &ReportNode) {
    out.push_str("{\"name\":\"");
    json_escape(out, &node.name);
    out.push_str("\",\"level\":\"");
    out.push_str(node.level.keyword());
    out.push_str("\",\"label\":\"");
    json_escape(out, &node.outcome.rendered);
    out.push_str("\",\"label_long\":\"");
    json_escape(out, &node.outcome.rendered_long);
    out.push_str("\",\"validity\":[");
    for (i, w) in node.outcome.validity.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{w}");
    }
    out.push_str("],\"children\":[");
    for (i, child) in node.children.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        node_json(out, child);
    }
    out.push_str("]}");
}

/// Stable JSON rendering of a pre-report: fixed key order, shortest float
/// formatting, no whitespace. Identical trees yield identical bytes.
pub fn prereport_json(pre: &PreReport) -> String {
    let mut out = String::new();
    out.push_str("{\"student\":\"");
    json_escape(&mut out, &pre.student);
    out.push_str("\",\"task\":\"");
    json_escape(&mut out, &pre.task);
    out.push_str("\",\"skills\":[");
    for (i, skill) in pre.skills.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        node_json(&mut out, skill);
    }
    out.push_str("]}\n");
    out
}

/// Builds the self-contained LLM prompt package text. The system never
/// calls a model itself; the file is the boundary.
pub fn prompt_package(pre: &PreReport, doc: &ReportDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "You are an educational assistant. Write a clear, encouraging\n\
         narrative report for the student evaluation below. Use every label\n\
         exactly as given; do not invent scores or labels. Avoid technical\n\
         jargon. Address the student's strengths first, then areas for\n\
         improvement, with one short paragraph per skill.\n"
    );
    for section in &doc.sections {
        let _ = writeln!(out, "## Skill: {} — {}", section.skill, section.label);
        if section.strengths.is_empty() {
            let _ = writeln!(out, "Strengths: no high-performing areas");
        } else {
            let _ = writeln!(out, "Strengths: {}", section.strengths.join("; "));
        }
        if section.improvements.is_empty() {
            let _ = writeln!(out, "Areas for improvement: none identified");
        } else {
            let _ = writeln!(
                out,
                "Areas for improvement: {}",
                section.improvements.join("; ")
            );
        }
        out.push('\n');
    }
    let _ = writeln!(out, "Structured evaluation data (JSON):");
    out.push_str(&prereport_json(pre));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perception::LabelOutcome;

    fn outcome(primary: usize, rendered: &str, long: &str) -> LabelOutcome {
        let mut validity = alloc::vec![0.0; 3];
        validity[primary] = 1.0;
        LabelOutcome {
            primary,
            secondary: None,
            rendered: rendered.to_string(),
            rendered_long: long.to_string(),
            validity,
        }
    }

    fn leaf(name: &str, primary: usize, rendered: &str, long: &str) -> ReportNode {
        ReportNode {
            id: name.to_ascii_lowercase().replace(' ', "_"),
            name: name.to_string(),
            level: Level::Measure,
            outcome: outcome(primary, rendered, long),
            children: Vec::new(),
        }
    }

    #[test]
    fn placeholders_found_in_order() {
        assert_eq!(
            placeholders("{component} is {label}. {child:*}"),
            ["component", "label", "child:*"]
        );
        assert!(placeholders("no braces").is_empty());
    }

    #[test]
    fn humanize_replaces_underscores() {
        assert_eq!(humanize("reaction_time"), "Reaction time");
        assert_eq!(humanize("speed"), "Speed");
    }

    #[test]
    fn identical_consecutive_labels_merge() {
        let children = [
            leaf("Fluency", 1, "M", "Medium"),
            leaf("Gaze", 1, "M", "Medium"),
            leaf("Mood", 1, "M", "Medium"),
        ];
        assert_eq!(child_clause(&children), "Fluency, Gaze and Mood are Medium");
    }

    #[test]
    fn differing_labels_stay_separate() {
        let children = [
            leaf("Reaction time", 0, "L", "Low"),
            leaf("Fluency", 1, "M", "Medium"),
            leaf("Speech speed", 1, "M", "Medium"),
        ];
        assert_eq!(
            child_clause(&children),
            "Reaction time is Low; Fluency and Speech speed are Medium"
        );
    }

    #[test]
    fn bin_scale_matches_five_bins() {
        let mut node = leaf("x", 0, "L", "Low");
        assert_eq!(node.bin(), 0);
        node.outcome.primary = 2;
        node.outcome.secondary = Some(1);
        assert_eq!(node.bin(), 3); // M/H
        node.outcome.secondary = None;
        assert_eq!(node.bin(), 4); // H
    }

    #[test]
    fn prereport_json_is_deterministic() {
        let pre = PreReport {
            student: "A1".to_string(),
            task: "T1".to_string(),
            skills: alloc::vec![leaf("Skill", 2, "H", "High")],
        };
        assert_eq!(prereport_json(&pre), prereport_json(&pre));
        assert!(prereport_json(&pre).contains("\"label\":\"H\""));
    }
}
