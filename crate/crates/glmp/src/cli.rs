//! Batch command-line front end: validate, eval, report, correlate.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use glmp_core::dsl::{parse_model, ModelSource};
use glmp_core::report::{build_prereport, prereport_json, prompt_package};
use glmp_core::{evaluate_network, GlmpModel, DEFAULT_TIE_EPSILON};
use rayon::prelude::*;

use crate::analysis::{correlate, correlation_csv, load_labels, load_ratings, LabelScoreMapping};
use crate::ingestion::{load_bundles, unknown_measures, IngestError};
use crate::reporting::{parse_prereport, render_standalone, write_atomic};

const EXIT_OK: u8 = 0;
/// Validation or domain failure.
const EXIT_FAIL: u8 = 2;
/// I/O or environment failure.
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(
    name = "glmp",
    version,
    about = "Hierarchical soft-skill evaluation: validate models, evaluate \
             measure bundles, render reports, correlate with ratings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model definition and print diagnostics
    Validate(ValidateArgs),
    /// Evaluate measure bundles and write one pre-report per (student, task)
    Eval(EvalArgs),
    /// Render reports from pre-report files
    Report(ReportArgs),
    /// Correlate evaluated labels with instructor ratings
    Correlate(CorrelateArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Model definition file
    #[arg(short, long, value_name = "FILE")]
    model: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Model definition file
    #[arg(short, long, value_name = "FILE")]
    model: PathBuf,
    /// Measure bundles (.json or .csv)
    #[arg(short, long, value_name = "FILE")]
    input: PathBuf,
    /// Output directory (created if absent)
    #[arg(short, long, value_name = "DIR")]
    output: PathBuf,
    /// Tolerance for rendering a combined label (e.g. "L/M")
    #[arg(long, default_value_t = DEFAULT_TIE_EPSILON)]
    tie_epsilon: f64,
    /// Number of worker threads (default: all cores)
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ReportArgs {
    /// A pre-report file or a directory of *.prereport.json files
    #[arg(short, long, value_name = "PATH")]
    input: PathBuf,
    /// Also emit a prompt package (*.prompt.txt) per report
    #[arg(long)]
    prompt: bool,
}

#[derive(Args)]
struct CorrelateArgs {
    /// Evaluated labels CSV: group,student,task,skill,label
    #[arg(long, value_name = "FILE")]
    labels: PathBuf,
    /// Instructor ratings CSV: group,student,task,grade
    #[arg(long, value_name = "FILE")]
    ratings: PathBuf,
    /// Label-to-score mapping CSV: label,score (default: L=1 .. H=5)
    #[arg(long, value_name = "FILE")]
    mapping: Option<PathBuf>,
    /// Output CSV: group,task,skill,n,r
    #[arg(short, long, value_name = "FILE")]
    output: PathBuf,
}

/// Resolves a path, falling back to `$GLMP_FIXTURES/<path>` when the path
/// does not exist as given.
fn resolve(path: &Path) -> PathBuf {
    if path.exists() {
        return path.to_path_buf();
    }
    if let Ok(base) = std::env::var("GLMP_FIXTURES") {
        let candidate = Path::new(&base).join(path);
        if candidate.exists() {
            return candidate;
        }
    }
    path.to_path_buf()
}

fn load_model(path: &Path) -> Result<GlmpModel, u8> {
    let path = resolve(path);
    let text = match std::fs::read_to_string(&path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: {}: {e}", path.display());
            return Err(EXIT_IO);
        }
    };
    let outcome = parse_model(&ModelSource::from_file(&text, &path.display().to_string()));
    for d in &outcome.diagnostics {
        eprintln!("{d}");
    }
    match outcome.model {
        Some(model) => Ok(model),
        None => Err(EXIT_FAIL),
    }
}

fn cmd_validate(args: &ValidateArgs) -> u8 {
    match load_model(&args.model) {
        Ok(_) => EXIT_OK,
        Err(code) => code,
    }
}

fn cmd_eval(args: &EvalArgs) -> u8 {
    let model = match load_model(&args.model) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let bundles = match load_bundles(&resolve(&args.input)) {
        Ok(b) => b,
        Err(e @ IngestError::Io { .. }) => {
            eprintln!("error: {e}");
            return EXIT_IO;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    for name in unknown_measures(&model, &bundles) {
        eprintln!("warning: measure '{name}' is not in the model and is ignored");
    }
    if let Err(e) = std::fs::create_dir_all(&args.output) {
        eprintln!("error: {}: {e}", args.output.display());
        return EXIT_IO;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.unwrap_or(0))
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_IO;
        }
    };

    // each bundle is independent; results are collected in input order so
    // logs and failures are deterministic regardless of thread count
    let results: Vec<Result<String, String>> = pool.install(|| {
        bundles
            .par_iter()
            .map(|bundle| {
                let trace = evaluate_network(&model, bundle, args.tie_epsilon)
                    .map_err(|e| format!("{} {}: {e}", bundle.student, bundle.task))?;
                for w in &trace.warnings {
                    eprintln!("warning: {} {}: {w}", bundle.student, bundle.task);
                }
                let pre = build_prereport(&model, &trace);
                let file = args
                    .output
                    .join(format!("{}_{}.prereport.json", bundle.student, bundle.task));
                write_atomic(&file, &prereport_json(&pre))
                    .map_err(|e| format!("{}: {e}", file.display()))?;
                Ok(file.display().to_string())
            })
            .collect()
    });

    let mut written = 0usize;
    let mut failed = 0usize;
    for result in &results {
        match result {
            Ok(_) => written += 1,
            Err(message) => {
                failed += 1;
                eprintln!("error: {message}");
            }
        }
    }
    println!("evaluated {written} bundles");
    if failed > 0 {
        eprintln!("{failed} bundle(s) failed");
        EXIT_FAIL
    } else {
        EXIT_OK
    }
}

fn report_one(path: &Path, prompt: bool) -> Result<(), (u8, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_IO, format!("{}: {e}", path.display())))?;
    let pre = parse_prereport(&text)
        .map_err(|e| (EXIT_FAIL, format!("{}: {e}", path.display())))?;
    if pre.skills.is_empty() {
        return Err((
            EXIT_FAIL,
            format!("{}: pre-report contains no skills", path.display()),
        ));
    }
    let doc = render_standalone(&pre)
        .map_err(|e| (EXIT_FAIL, format!("{}: {e}", path.display())))?;
    let stem = path
        .to_str()
        .map(|s| s.strip_suffix(".prereport.json").unwrap_or(s).to_string())
        .unwrap_or_else(|| path.display().to_string());
    let report_path = PathBuf::from(format!("{stem}.report.md"));
    write_atomic(&report_path, &doc.to_markdown())
        .map_err(|e| (EXIT_IO, format!("{}: {e}", report_path.display())))?;
    if prompt {
        let prompt_path = PathBuf::from(format!("{stem}.prompt.txt"));
        write_atomic(&prompt_path, &prompt_package(&pre, &doc))
            .map_err(|e| (EXIT_IO, format!("{}: {e}", prompt_path.display())))?;
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> u8 {
    let input = resolve(&args.input);
    let targets: Vec<PathBuf> = if input.is_dir() {
        let entries = match std::fs::read_dir(&input) {
            Ok(entries) => entries,
            Err(e) => {
                eprintln!("error: {}: {e}", input.display());
                return EXIT_IO;
            }
        };
        let mut files: Vec<PathBuf> = entries
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| {
                p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.ends_with(".prereport.json"))
            })
            .collect();
        files.sort();
        if files.is_empty() {
            eprintln!("error: {}: no *.prereport.json files found", input.display());
            return EXIT_FAIL;
        }
        files
    } else {
        vec![input]
    };

    let mut worst = EXIT_OK;
    let mut rendered = 0usize;
    for path in &targets {
        match report_one(path, args.prompt) {
            Ok(()) => rendered += 1,
            Err((code, message)) => {
                eprintln!("error: {message}");
                worst = worst.max(code);
            }
        }
    }
    println!("rendered {rendered} report(s)");
    worst
}

fn cmd_correlate(args: &CorrelateArgs) -> u8 {
    let io_or_fail = |e: &str| {
        // distinguish unreadable files from malformed content
        if e.contains("No such file") || e.contains("Permission denied") {
            EXIT_IO
        } else {
            EXIT_FAIL
        }
    };
    let labels = match load_labels(&resolve(&args.labels)) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return io_or_fail(&e);
        }
    };
    let ratings = match load_ratings(&resolve(&args.ratings)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return io_or_fail(&e);
        }
    };
    let mapping = match &args.mapping {
        Some(path) => match LabelScoreMapping::from_csv(&resolve(path)) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("error: {e}");
                return io_or_fail(&e);
            }
        },
        None => LabelScoreMapping::default(),
    };
    let (rows, warnings) = match correlate(&labels, &ratings, &mapping) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAIL;
        }
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    for row in &rows {
        if let Err(reason) = &row.r {
            eprintln!(
                "warning: {} {} {}: r is n/a ({reason})",
                row.group, row.task, row.skill
            );
        }
    }
    if let Err(e) = write_atomic(&args.output, &correlation_csv(&rows)) {
        eprintln!("error: {}: {e}", args.output.display());
        return EXIT_IO;
    }
    println!("correlated {} cell(s)", rows.len());
    EXIT_OK
}

/// Parses arguments from the environment and runs the selected command.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Report(args) => cmd_report(args),
        Command::Correlate(args) => cmd_correlate(args),
    };
    ExitCode::from(code)
}
