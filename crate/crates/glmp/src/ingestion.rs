//! Loading measure bundles from JSON and CSV files.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use glmp_core::model::MeasureBundle;
use glmp_core::GlmpModel;
use serde::Deserialize;

/// Ingestion failure. `Io` maps to exit code 3, everything else to 2.
#[derive(Debug)]
pub enum IngestError {
    Io { path: String, source: std::io::Error },
    Format { path: String, message: String },
}

impl fmt::Display for IngestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IngestError::Io { path, source } => write!(f, "{path}: {source}"),
            IngestError::Format { path, message } => write!(f, "{path}: {message}"),
        }
    }
}

impl std::error::Error for IngestError {}

#[derive(Deserialize)]
struct JsonDocument {
    students: Vec<JsonBundle>,
}

#[derive(Deserialize)]
struct JsonBundle {
    code: String,
    task: String,
    values: std::collections::BTreeMap<String, f64>,
}

fn format_error(path: &Path, message: String) -> IngestError {
    IngestError::Format {
        path: path.display().to_string(),
        message,
    }
}

fn check_duplicates(path: &Path, bundles: &[MeasureBundle]) -> Result<(), IngestError> {
    let mut seen = BTreeSet::new();
    for b in bundles {
        if !seen.insert((b.student.clone(), b.task.clone())) {
            return Err(format_error(
                path,
                format!("duplicate bundle for student '{}' task '{}'", b.student, b.task),
            ));
        }
    }
    Ok(())
}

fn load_json(path: &Path, text: &str) -> Result<Vec<MeasureBundle>, IngestError> {
    let doc: JsonDocument =
        serde_json::from_str(text).map_err(|e| format_error(path, e.to_string()))?;
    let mut bundles = Vec::with_capacity(doc.students.len());
    for entry in doc.students {
        let mut bundle = MeasureBundle::new(&entry.code, &entry.task);
        for (name, value) in &entry.values {
            if !value.is_finite() {
                return Err(format_error(
                    path,
                    format!(
                        "non-finite value for measure '{name}' (student '{}', task '{}')",
                        entry.code, entry.task
                    ),
                ));
            }
            bundle.set(name, *value);
        }
        bundles.push(bundle);
    }
    check_duplicates(path, &bundles)?;
    Ok(bundles)
}

fn load_csv(path: &Path, text: &str) -> Result<Vec<MeasureBundle>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| format_error(path, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    if headers.len() < 3
        || !headers[0].eq_ignore_ascii_case("student")
        || !headers[1].eq_ignore_ascii_case("task")
    {
        return Err(format_error(
            path,
            "expected header: student,task,<measure names...>".to_string(),
        ));
    }
    let mut bundles = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2; // header is line 1
        let record = record.map_err(|e| format_error(path, e.to_string()))?;
        if record.len() != headers.len() {
            return Err(format_error(
                path,
                format!(
                    "row {row}: expected {} fields, found {}",
                    headers.len(),
                    record.len()
                ),
            ));
        }
        let mut bundle = MeasureBundle::new(&record[0], &record[1]);
        for (col, name) in headers.iter().enumerate().skip(2) {
            let cell = &record[col];
            let value: f64 = cell.parse().map_err(|_| {
                format_error(
                    path,
                    format!("row {row}, column '{name}': '{cell}' is not a number"),
                )
            })?;
            if !value.is_finite() {
                return Err(format_error(
                    path,
                    format!("row {row}, column '{name}': non-finite value"),
                ));
            }
            bundle.set(name, value);
        }
        bundles.push(bundle);
    }
    check_duplicates(path, &bundles)?;
    Ok(bundles)
}

/// Loads measure bundles from a `.json` or `.csv` file, dispatching on the
/// file extension.
pub fn load_bundles(path: &Path) -> Result<Vec<MeasureBundle>, IngestError> {
    let text = std::fs::read_to_string(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    match path.extension().and_then(|e| e.to_str()) {
        Some(ext) if ext.eq_ignore_ascii_case("json") => load_json(path, &text),
        Some(ext) if ext.eq_ignore_ascii_case("csv") => load_csv(path, &text),
        _ => Err(format_error(
            path,
            "unsupported input format; expected a .json or .csv file".to_string(),
        )),
    }
}

/// Measure names present in the bundles but absent from the model. These
/// are reported as warnings and ignored during evaluation.
pub fn unknown_measures(model: &GlmpModel, bundles: &[MeasureBundle]) -> Vec<String> {
    let mut unknown = BTreeSet::new();
    for bundle in bundles {
        for name in bundle.values.keys() {
            if !model.measures.contains_key(name) {
                unknown.insert(name.clone());
            }
        }
    }
    unknown.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(ext: &str, contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::Builder::new().suffix(ext).tempfile().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn loads_json_bundles() {
        let f = write_temp(
            ".json",
            r#"{"students":[{"code":"A1","task":"T1","values":{"Mood":0.5}}]}"#,
        );
        let bundles = load_bundles(f.path()).unwrap();
        assert_eq!(bundles.len(), 1);
        assert_eq!(bundles[0].student, "A1");
        // keys are lowercased on ingest
        assert_eq!(bundles[0].get("mood"), Some(0.5));
    }

    #[test]
    fn loads_csv_bundles() {
        let f = write_temp(".csv", "student,task,mood,gaze\nA1,T1,0.5,0.25\nA2,T1,0.1,0.9\n");
        let bundles = load_bundles(f.path()).unwrap();
        assert_eq!(bundles.len(), 2);
        assert_eq!(bundles[1].get("gaze"), Some(0.9));
    }

    #[test]
    fn csv_reports_bad_cell_with_row_and_column() {
        let f = write_temp(".csv", "student,task,mood\nA1,T1,oops\n");
        let err = load_bundles(f.path()).unwrap_err().to_string();
        assert!(err.contains("row 2"), "{err}");
        assert!(err.contains("mood"), "{err}");
        assert!(err.contains("oops"), "{err}");
    }

    #[test]
    fn duplicate_student_task_is_rejected() {
        let f = write_temp(".csv", "student,task,mood\nA1,T1,0.5\nA1,T1,0.6\n");
        let err = load_bundles(f.path()).unwrap_err().to_string();
        assert!(err.contains("duplicate"), "{err}");
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = load_bundles(Path::new("/nonexistent/input.json")).unwrap_err();
        assert!(matches!(err, IngestError::Io { .. }));
    }

    #[test]
    fn non_finite_json_value_is_rejected() {
        // JSON itself cannot spell infinity, but a huge exponent overflows.
        let f = write_temp(
            ".json",
            r#"{"students":[{"code":"A1","task":"T1","values":{"mood":1e999}}]}"#,
        );
        let err = load_bundles(f.path()).unwrap_err().to_string();
        assert!(err.contains("non-finite") || err.contains("number"), "{err}");
    }
}
