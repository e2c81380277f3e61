//! Reading serialized pre-reports back and writing output files.

use std::path::Path;

use glmp_core::model::Level;
use glmp_core::perception::LabelOutcome;
use glmp_core::report::{PreReport, ReportDocument, ReportError, ReportNode};
use serde::Deserialize;

#[derive(Deserialize)]
struct NodeDoc {
    name: String,
    level: String,
    label: String,
    label_long: String,
    validity: Vec<f64>,
    children: Vec<NodeDoc>,
}

#[derive(Deserialize)]
struct PreReportDoc {
    student: String,
    task: String,
    skills: Vec<NodeDoc>,
}

fn parse_level(s: &str) -> Result<Level, String> {
    match s {
        "measure" => Ok(Level::Measure),
        "attribute" => Ok(Level::Attribute),
        "dimension" => Ok(Level::Dimension),
        "skill" => Ok(Level::Skill),
        other => Err(format!("unknown level '{other}'")),
    }
}

fn rebuild_node(doc: NodeDoc) -> Result<ReportNode, String> {
    if doc.validity.is_empty() {
        return Err(format!("node '{}' has an empty validity vector", doc.name));
    }
    let primary = doc
        .validity
        .iter()
        .enumerate()
        .max_by(|(ai, aw), (bi, bw)| aw.partial_cmp(bw).unwrap().then(bi.cmp(ai)))
        .map(|(i, _)| i)
        .unwrap();
    // a combined label pairs the primary with an adjacent runner-up; pick
    // the adjacent neighbor with the larger validity degree
    let secondary = if doc.label.contains('/') {
        let below = primary.checked_sub(1).map(|i| (i, doc.validity[i]));
        let above = doc.validity.get(primary + 1).map(|&w| (primary + 1, w));
        match (below, above) {
            (Some((bi, bw)), Some((_, aw))) if bw >= aw => Some(bi),
            (_, Some((ai, _))) => Some(ai),
            (Some((bi, _)), None) => Some(bi),
            (None, None) => None,
        }
    } else {
        None
    };
    let level = parse_level(&doc.level)?;
    let children = doc
        .children
        .into_iter()
        .map(rebuild_node)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReportNode {
        id: doc.name.to_ascii_lowercase().replace(' ', "_"),
        name: doc.name,
        level,
        outcome: LabelOutcome {
            primary,
            secondary,
            rendered: doc.label,
            rendered_long: doc.label_long,
            validity: doc.validity,
        },
        children,
    })
}

/// Parses a serialized pre-report (the JSON emitted by `eval`) back into
/// the structured tree.
pub fn parse_prereport(text: &str) -> Result<PreReport, String> {
    let doc: PreReportDoc = serde_json::from_str(text).map_err(|e| e.to_string())?;
    Ok(PreReport {
        student: doc.student,
        task: doc.task,
        skills: doc
            .skills
            .into_iter()
            .map(rebuild_node)
            .collect::<Result<Vec<_>, _>>()?,
    })
}

/// Renders a report document from a pre-report alone. The serialized tree
/// carries no templates, so dimensions get a child-clause template and
/// everything else the plain default.
pub fn render_standalone(pre: &PreReport) -> Result<ReportDocument, ReportError> {
    glmp_core::report::render_with_templates(
        pre,
        &|_, level| {
            if level == Level::Dimension {
                "{component} is {label}: {child:*}.".to_string()
            } else {
                glmp_core::report::DEFAULT_TEMPLATE.to_string()
            }
        },
        None,
    )
}

/// Writes a file atomically: the content lands in a temporary file in the
/// target directory and is renamed over the destination.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    use std::io::Write;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
