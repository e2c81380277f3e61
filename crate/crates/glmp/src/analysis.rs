//! Pearson correlation of evaluated labels against instructor ratings.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

/// Statistics failure.
#[derive(Debug, Clone, PartialEq)]
pub enum StatError {
    LengthMismatch { xs: usize, ys: usize },
    TooFewSamples { n: usize },
    /// One series is constant, so the correlation is undefined.
    ConstantSeries,
}

impl fmt::Display for StatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatError::LengthMismatch { xs, ys } => {
                write!(f, "series lengths differ: {xs} vs {ys}")
            }
            StatError::TooFewSamples { n } => {
                write!(f, "need at least 3 paired samples, found {n}")
            }
            StatError::ConstantSeries => {
                write!(f, "correlation is undefined for a constant series")
            }
        }
    }
}

impl std::error::Error for StatError {}

/// Sample Pearson correlation coefficient of two equal-length series.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64, StatError> {
    if xs.len() != ys.len() {
        return Err(StatError::LengthMismatch {
            xs: xs.len(),
            ys: ys.len(),
        });
    }
    let n = xs.len();
    if n < 3 {
        return Err(StatError::TooFewSamples { n });
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatError::ConstantSeries);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Maps rendered five-bin labels ("L" .. "H") to numeric scores.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelScoreMapping {
    scores: BTreeMap<String, f64>,
}

/// The five display bins, weakest first.
pub const FIVE_BINS: [&str; 5] = ["L", "L/M", "M", "M/H", "H"];

impl Default for LabelScoreMapping {
    /// Equidistant default: L=1, L/M=2, M=3, M/H=4, H=5.
    fn default() -> Self {
        let scores = FIVE_BINS
            .iter()
            .enumerate()
            .map(|(i, l)| (l.to_string(), (i + 1) as f64))
            .collect();
        Self { scores }
    }
}

impl LabelScoreMapping {
    /// Loads a mapping from a `label,score` CSV. Every five-bin label must
    /// be present and the scores must be strictly increasing from L to H.
    pub fn from_csv(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("{}: {e}", path.display()))?;
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut scores = BTreeMap::new();
        for record in reader.records() {
            let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
            if record.len() != 2 {
                return Err(format!("{}: expected two fields per row", path.display()));
            }
            let label = record[0].to_string();
            let score: f64 = record[1]
                .parse()
                .map_err(|_| format!("{}: '{}' is not a number", path.display(), &record[1]))?;
            if scores.insert(label.clone(), score).is_some() {
                return Err(format!("{}: duplicate label '{label}'", path.display()));
            }
        }
        let mapping = Self { scores };
        let mut prev = f64::NEG_INFINITY;
        for bin in FIVE_BINS {
            let score = mapping
                .score(bin)
                .ok_or_else(|| format!("{}: missing label '{bin}'", path.display()))?;
            if score <= prev {
                return Err(format!(
                    "{}: scores must be strictly increasing from L to H",
                    path.display()
                ));
            }
            prev = score;
        }
        Ok(mapping)
    }

    pub fn score(&self, label: &str) -> Option<f64> {
        self.scores.get(label).copied()
    }
}

/// One evaluated label row: `group,student,task,skill,label`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelRow {
    pub group: String,
    pub student: String,
    pub task: String,
    pub skill: String,
    pub label: String,
}

/// Reads the long-format labels CSV (`group,student,task,skill,label`).
pub fn load_labels(path: &Path) -> Result<Vec<LabelRow>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| format!("{}: {e}", path.display()))?
        .clone();
    let expect = ["group", "student", "task", "skill", "label"];
    if headers.len() != 5 || headers.iter().zip(expect).any(|(h, e)| !h.eq_ignore_ascii_case(e)) {
        return Err(format!(
            "{}: expected header: group,student,task,skill,label",
            path.display()
        ));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        rows.push(LabelRow {
            group: record[0].to_string(),
            student: record[1].to_string(),
            task: record[2].to_string(),
            skill: record[3].to_string(),
            label: record[4].to_string(),
        });
    }
    Ok(rows)
}

/// Instructor ratings keyed by (group, student, task).
pub type Ratings = BTreeMap<(String, String, String), f64>;

/// Reads the ratings CSV (`group,student,task,grade`).
pub fn load_ratings(path: &Path) -> Result<Ratings, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader
        .headers()
        .map_err(|e| format!("{}: {e}", path.display()))?
        .clone();
    let expect = ["group", "student", "task", "grade"];
    if headers.len() != 4 || headers.iter().zip(expect).any(|(h, e)| !h.eq_ignore_ascii_case(e)) {
        return Err(format!(
            "{}: expected header: group,student,task,grade",
            path.display()
        ));
    }
    let mut ratings = Ratings::new();
    for record in reader.records() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let grade: f64 = record[3]
            .parse()
            .map_err(|_| format!("{}: '{}' is not a number", path.display(), &record[3]))?;
        let key = (
            record[0].to_string(),
            record[1].to_string(),
            record[2].to_string(),
        );
        if ratings.insert(key.clone(), grade).is_some() {
            return Err(format!(
                "{}: duplicate rating for ({}, {}, {})",
                path.display(),
                key.0,
                key.1,
                key.2
            ));
        }
    }
    Ok(ratings)
}

/// One output row of the correlation table.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub group: String,
    pub task: String,
    pub skill: String,
    pub n: usize,
    /// `Err` carries the reason the coefficient is undefined.
    pub r: Result<f64, StatError>,
}

/// Correlates evaluated labels with ratings per (group, task, skill).
///
/// Students without a matching rating are skipped and reported in the
/// returned warnings. Unknown labels are an error.
pub fn correlate(
    labels: &[LabelRow],
    ratings: &Ratings,
    mapping: &LabelScoreMapping,
) -> Result<(Vec<CorrelationRow>, Vec<String>), String> {
    let mut cells: BTreeMap<(String, String, String), (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    let mut warnings = Vec::new();
    let mut skipped: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for row in labels {
        let score = mapping
            .score(&row.label)
            .ok_or_else(|| format!("unknown label '{}' for skill '{}'", row.label, row.skill))?;
        let rating_key = (row.group.clone(), row.student.clone(), row.task.clone());
        let Some(&grade) = ratings.get(&rating_key) else {
            skipped
                .entry((row.group.clone(), row.task.clone()))
                .or_default()
                .push(row.student.clone());
            continue;
        };
        let cell = cells
            .entry((row.group.clone(), row.task.clone(), row.skill.clone()))
            .or_default();
        cell.0.push(score);
        cell.1.push(grade);
    }
    for ((group, task), mut students) in skipped {
        students.sort();
        students.dedup();
        warnings.push(format!(
            "{group} {task}: no rating for {}; excluded from correlation",
            students.join(", ")
        ));
    }
    let rows = cells
        .into_iter()
        .map(|((group, task, skill), (xs, ys))| CorrelationRow {
            group,
            task,
            skill,
            n: xs.len(),
            r: pearson(&xs, &ys),
        })
        .collect();
    Ok((rows, warnings))
}

/// Renders the correlation table as CSV (`group,task,skill,n,r`), with
/// `n/a` for undefined coefficients. Byte-deterministic.
pub fn correlation_csv(rows: &[CorrelationRow]) -> String {
    let mut out = String::from("group,task,skill,n,r\n");
    for row in rows {
        let r = match &row.r {
            Ok(v) => format!("{v:.4}"),
            Err(_) => "n/a".to_string(),
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            row.group, row.task, row.skill, row.n, r
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_matches_hand_computation() {
        // perfectly linear
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [2.0, 4.0, 6.0, 8.0];
        assert!((pearson(&xs, &ys).unwrap() - 1.0).abs() < 1e-12);
        // sign flip
        let ys_neg = [8.0, 6.0, 4.0, 2.0];
        assert!((pearson(&xs, &ys_neg).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn pearson_brute_force_oracle() {
        // frozen from an independent computation over the published
        // communication labels (M=3 etc.) and grades of one group/task
        let xs = [1.0, 3.0, 3.0, 1.0, 3.0, 1.0, 3.0, 3.0, 1.0, 3.0];
        let ys = [85.0, 83.0, 86.0, 83.0, 87.0, 82.0, 86.0, 85.0, 85.0, 88.0];
        let r = pearson(&xs, &ys).unwrap();
        assert!((r - 0.5705).abs() < 5e-5, "r = {r}");
    }

    #[test]
    fn constant_series_is_undefined_not_nan() {
        let xs = [1.0, 1.0, 1.0];
        let ys = [1.0, 2.0, 3.0];
        assert_eq!(pearson(&xs, &ys), Err(StatError::ConstantSeries));
    }

    #[test]
    fn too_few_samples_is_an_error() {
        assert_eq!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(StatError::TooFewSamples { n: 2 })
        );
    }

    #[test]
    fn default_mapping_is_equidistant() {
        let m = LabelScoreMapping::default();
        assert_eq!(m.score("L"), Some(1.0));
        assert_eq!(m.score("L/M"), Some(2.0));
        assert_eq!(m.score("H"), Some(5.0));
        assert_eq!(m.score("X"), None);
    }

    #[test]
    fn correlate_groups_and_skips_missing_ratings() {
        let labels: Vec<LabelRow> = [
            ("A1", "M"),
            ("A2", "H"),
            ("A3", "L"),
            ("A4", "M/H"),
        ]
        .iter()
        .map(|(s, l)| LabelRow {
            group: "G".into(),
            student: (*s).into(),
            task: "T1".into(),
            skill: "sk".into(),
            label: (*l).into(),
        })
        .collect();
        let mut ratings = Ratings::new();
        for (s, g) in [("A1", 80.0), ("A2", 90.0), ("A3", 70.0)] {
            ratings.insert(("G".into(), s.into(), "T1".into()), g);
        }
        let (rows, warnings) =
            correlate(&labels, &ratings, &LabelScoreMapping::default()).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].n, 3);
        assert!((rows[0].r.clone().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("A4"));
    }

    #[test]
    fn correlation_csv_is_stable() {
        let rows = vec![CorrelationRow {
            group: "G".into(),
            task: "T1".into(),
            skill: "sk".into(),
            n: 3,
            r: Ok(0.57049),
        }];
        assert_eq!(correlation_csv(&rows), "group,task,skill,n,r\nG,T1,sk,3,0.5705\n");
    }
}
