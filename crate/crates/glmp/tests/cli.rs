//! End-to-end checks of the `glmp` binary: exit codes, outputs, and
//! failure isolation.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn glmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glmp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn path_str(p: &Path) -> String {
    p.to_str().unwrap().to_string()
}

#[test]
fn validate_exit_codes_follow_the_contract() {
    let ok = glmp(&["validate", "-m", &path_str(&fixtures().join("softskills.glmp"))]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stderr(&ok).is_empty(), "{}", stderr(&ok));

    let hole = glmp(&["validate", "-m", &path_str(&fixtures().join("broken/rule_hole.glmp"))]);
    assert_eq!(code(&hole), 2);
    assert!(stderr(&hole).contains("E004"), "{}", stderr(&hole));

    let missing = glmp(&["validate", "-m", "/nonexistent/model.glmp"]);
    assert_eq!(code(&missing), 3);
}

#[test]
fn eval_writes_one_prereport_per_bundle() {
    let dir = tempfile::tempdir().unwrap();
    let out = glmp(&[
        "eval",
        "-m",
        &path_str(&fixtures().join("decision_making.glmp")),
        "-i",
        &path_str(&fixtures().join("demo_measures.json")),
        "-o",
        &path_str(dir.path()),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(String::from_utf8_lossy(&out.stdout).contains("evaluated 1 bundles"));
    assert!(dir.path().join("A1_T1.prereport.json").is_file());
}

#[test]
fn eval_continues_past_corrupt_bundles_and_exits_two() {
    // ten bundles; one misses the "mood" measure entirely
    let mut students = Vec::new();
    for i in 1..=10 {
        let values = if i == 4 {
            r#"{"gaze":0.5,"vagueness":2,"redundancy":3,"reaction_time":5,"fluency":10,"speech_speed":4}"#
        } else {
            r#"{"mood":0.5,"gaze":0.5,"vagueness":2,"redundancy":3,"reaction_time":5,"fluency":10,"speech_speed":4}"#
        };
        students.push(format!(r#"{{"code":"S{i}","task":"T1","values":{values}}}"#));
    }
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("bundles.json");
    std::fs::write(&input, format!(r#"{{"students":[{}]}}"#, students.join(","))).unwrap();
    let outdir = dir.path().join("out");
    let out = glmp(&[
        "eval",
        "-m",
        &path_str(&fixtures().join("decision_making.glmp")),
        "-i",
        &path_str(&input),
        "-o",
        &path_str(&outdir),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).contains("S4"), "{}", stderr(&out));
    let written = std::fs::read_dir(&outdir).unwrap().count();
    assert_eq!(written, 9);
    assert!(String::from_utf8_lossy(&out.stdout).contains("evaluated 9 bundles"));
}

#[test]
fn eval_results_are_independent_of_job_count() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir4 = tempfile::tempdir().unwrap();
    for (dir, jobs) in [(&dir1, "1"), (&dir4, "4")] {
        let out = glmp(&[
            "eval",
            "-m",
            &path_str(&fixtures().join("softskills.glmp")),
            "-i",
            &path_str(&fixtures().join("cohort_measures.json")),
            "-o",
            &path_str(dir.path()),
            "--jobs",
            jobs,
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let mut names: Vec<_> = std::fs::read_dir(dir1.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 147);
    for name in names {
        let a = std::fs::read(dir1.path().join(&name)).unwrap();
        let b = std::fs::read(dir4.path().join(&name)).unwrap();
        assert_eq!(a, b, "{name:?} differs between job counts");
    }
}

#[test]
fn report_renders_files_and_rejects_empty_trees() {
    let dir = tempfile::tempdir().unwrap();
    glmp(&[
        "eval",
        "-m",
        &path_str(&fixtures().join("decision_making.glmp")),
        "-i",
        &path_str(&fixtures().join("demo_measures.json")),
        "-o",
        &path_str(dir.path()),
    ]);
    let out = glmp(&["report", "-i", &path_str(dir.path()), "--prompt"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = dir.path().join("A1_T1.report.md");
    let prompt = dir.path().join("A1_T1.prompt.txt");
    assert!(report.is_file());
    assert!(prompt.is_file());
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("Decision making"), "{text}");

    // an empty skills array is a schema-level failure
    let empty = dir.path().join("empty.prereport.json");
    std::fs::write(&empty, r#"{"student":"X","task":"T1","skills":[]}"#).unwrap();
    let out = glmp(&["report", "-i", &path_str(&empty)]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn correlate_handles_perfect_and_constant_columns() {
    let dir = tempfile::tempdir().unwrap();
    let labels = dir.path().join("labels.csv");
    let ratings = dir.path().join("ratings.csv");
    std::fs::write(
        &labels,
        "group,student,task,skill,label\n\
         G,S1,T1,sk,L\nG,S2,T1,sk,M\nG,S3,T1,sk,H\n\
         G,S1,T1,flat,M\nG,S2,T1,flat,M\nG,S3,T1,flat,M\n",
    )
    .unwrap();
    std::fs::write(
        &ratings,
        "group,student,task,grade\nG,S1,T1,1\nG,S2,T1,3\nG,S3,T1,5\n",
    )
    .unwrap();
    let out_csv = dir.path().join("corr.csv");
    let out = glmp(&[
        "correlate",
        "--labels",
        &path_str(&labels),
        "--ratings",
        &path_str(&ratings),
        "-o",
        &path_str(&out_csv),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert!(text.contains("G,T1,sk,3,1.0000"), "{text}");
    assert!(text.contains("G,T1,flat,3,n/a"), "{text}");
    assert!(stderr(&out).contains("constant"), "{}", stderr(&out));
}

#[test]
fn fixture_paths_resolve_through_the_environment_variable() {
    let out = Command::new(env!("CARGO_BIN_EXE_glmp"))
        .args(["validate", "-m", "softskills.glmp"])
        .env("GLMP_FIXTURES", fixtures())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn outputs_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let model = path_str(&fixtures().join("decision_making.glmp"));
    let input = path_str(&fixtures().join("demo_measures.json"));
    let outdir = path_str(dir.path());
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        glmp(&["eval", "-m", &model, "-i", &input, "-o", &outdir]);
        glmp(&["report", "-i", &outdir, "--prompt"]);
        let mut snapshot = Vec::new();
        for name in ["A1_T1.prereport.json", "A1_T1.report.md", "A1_T1.prompt.txt"] {
            snapshot.push(std::fs::read(dir.path().join(name)).unwrap());
        }
        snapshots.push(snapshot);
    }
    assert_eq!(snapshots[0], snapshots[1]);
}
