//! `dilatelab`: batch front-end that reads tuple documents and prints JSON
//! run reports.

mod document;
mod pipelines;
mod report;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Parser, Subcommand, ValueEnum};
use dilatelab::dilation_data::{Conditions, Space};
use dilatelab::fixtures;
use dilatelab::linalg::Tolerance;
use dilatelab::random::DEFAULT_SEED;

use document::{parse_document, TupleDocument};
use pipelines::Options;
use report::{ErrorKind, ReportError, RunReport};

#[derive(Parser, Debug)]
#[command(name = "dilatelab", version, about = "Isometric dilations of commuting contraction tuples")]
struct Cli {
    /// Suppress the human-readable summary on stderr.
    #[arg(long, short, global = true)]
    quiet: bool,
    /// Worker threads for multi-file batches.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Absolute tolerance; overrides the document's own.
    #[arg(long, global = true, env = "DILATELAB_ATOL")]
    atol: Option<f64>,
    /// Seed for randomized checks.
    #[arg(long, global = true, env = "DILATELAB_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SpaceArg {
    /// The defect space of T.
    DefectOfT,
    /// The defect space of T*.
    DefectOfTAdjoint,
}

impl From<SpaceArg> for Space {
    fn from(s: SpaceArg) -> Self {
        match s {
            SpaceArg::DefectOfT => Space::DefectOfT,
            SpaceArg::DefectOfTAdjoint => Space::DefectOfTAdjoint,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConditionsArg {
    Main,
    Coromain,
    Pure,
    Bdf,
}

impl From<ConditionsArg> for Conditions {
    fn from(c: ConditionsArg) -> Self {
        match c {
            ConditionsArg::Main => Conditions::Main,
            ConditionsArg::Coromain => Conditions::Coromain,
            ConditionsArg::Pure => Conditions::Pure,
            ConditionsArg::Bdf => Conditions::Bdf,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that the document parses and holds commuting contractions.
    Validate { files: Vec<PathBuf> },
    /// Extract candidate unitaries and projections and check them.
    Extract {
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "defect-of-t")]
        space: SpaceArg,
    },
    /// Check a condition family against supplied or extracted data.
    Verify {
        files: Vec<PathBuf>,
        #[arg(long, value_enum)]
        space: Option<SpaceArg>,
        #[arg(long, value_enum)]
        conditions: Option<ConditionsArg>,
    },
    /// Build the dilations and check them on finitely supported vectors.
    Dilate {
        files: Vec<PathBuf>,
        /// Largest total degree of the dilation identity.
        #[arg(long, default_value_t = 5)]
        degree: usize,
    },
    /// Check the functional model of a tuple with C.0 product.
    Model {
        files: Vec<PathBuf>,
        /// Truncation degree; chosen from the decay of T*^N when omitted.
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Classify against both condition sets and the positivity classes.
    Classify { files: Vec<PathBuf> },
    /// Run a built-in example.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(fixtures::IDS))]
        id: String,
        /// Print the example's tuple document instead of running it.
        #[arg(long)]
        emit_document: bool,
    },
    /// Generate a tuple compressed from random diagonal model data, seeded
    /// by `--seed`.
    Gen {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read_input(path: &Path) -> Result<String, ReportError> {
    let mut text = String::new();
    let res = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| ReportError {
        kind: ErrorKind::Input,
        message: format!("cannot read {}: {e}", path.display()),
        pointer: None,
    })?;
    Ok(text)
}

fn run_file(path: &Path, cmd: &Command, opts: &Options) -> RunReport {
    let pipeline = match cmd {
        Command::Validate { .. } => "validate",
        Command::Extract { .. } => "extract",
        Command::Verify { .. } => "verify",
        Command::Dilate { .. } => "dilate",
        Command::Model { .. } => "model",
        Command::Classify { .. } => "classify",
        Command::Demo { .. } | Command::Gen { .. } => unreachable!("not file-based"),
    };
    let mut report = RunReport::new(path.display().to_string(), pipeline, opts.seed);
    let doc = match read_input(path).and_then(|t| parse_document(&t).map_err(ReportError::from)) {
        Ok(d) => d,
        Err(e) => return report.with_error(e),
    };
    report.input_name = doc.name.clone();
    match run_doc(&doc, cmd, opts, &mut report) {
        Ok(()) => report.finish(),
        Err(e) => report.with_error(e),
    }
}

fn run_doc(doc: &TupleDocument, cmd: &Command, opts: &Options, report: &mut RunReport) -> Result<(), ReportError> {
    let tol = opts.tolerance(doc)?;
    match cmd {
        Command::Validate { .. } => pipelines::validate(doc, opts, tol, report),
        Command::Extract { space, .. } => pipelines::extract(doc, (*space).into(), tol, report),
        Command::Verify { space, conditions, .. } => {
            pipelines::verify_doc(doc, space.map(Into::into), conditions.map(Into::into), tol, report)
        }
        Command::Dilate { degree, .. } => pipelines::dilate(doc, *degree, opts, tol, report),
        Command::Model { trunc, .. } => pipelines::model(doc, *trunc, opts, tol, report),
        Command::Classify { .. } => pipelines::classify_doc(doc, tol, report),
        Command::Demo { .. } | Command::Gen { .. } => unreachable!("not file-based"),
    }
}

/// Runs every file, in parallel when `jobs > 1`; reports keep input order.
fn run_batch(files: &[PathBuf], cmd: &Command, opts: &Options, jobs: usize) -> Vec<RunReport> {
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<RunReport>> = vec![None; files.len()];
    let results = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, files.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                let r = run_file(path, cmd, opts);
                results.lock().expect("no worker panics")[i] = Some(r);
            });
        }
    });
    slots.into_iter().map(|r| r.expect("every slot filled")).collect()
}

fn summarize(r: &RunReport) {
    let status = match &r.error {
        Some(e) => format!("error ({:?}): {}", e.kind, e.message).to_lowercase(),
        None => format!("{:?}", r.verdict).to_lowercase(),
    };
    eprintln!(
        "{}: {} {} (max residual {:.3e})",
        r.input_name,
        r.pipeline,
        status,
        r.max_residual()
    );
}

fn emit_json(value: &impl serde::Serialize, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options {
        atol: cli.atol,
        seed: cli.seed,
    };
    if let Some(a) = opts.atol {
        if Tolerance::new(a).is_err() {
            eprintln!("invalid tolerance {a}");
            return ExitCode::from(2);
        }
    }

    let reports = match &cli.command {
        Command::Demo { id, emit_document } => {
            let fx = fixtures::by_id(id).expect("id checked by the parser");
            if *emit_document {
                return match emit_json(&pipelines::fixture_document(&fx), None) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(_) => ExitCode::from(3),
                };
            }
            let mut report = RunReport::new(fx.id, "demo", opts.seed);
            let tol = opts.atol.map_or(Ok(fx.tol), Tolerance::new);
            let res = tol.map_err(ReportError::from).and_then(|t| pipelines::demo(&fx, t, &mut report));
            vec![match res {
                Ok(()) => report.finish(),
                Err(e) => report.with_error(e),
            }]
        }
        Command::Gen {
            rank,
            n,
            degree,
            out,
        } => {
            let tol = Tolerance::new(opts.atol.unwrap_or(Tolerance::DEFAULT_ATOL)).expect("checked above");
            return match pipelines::generate(*rank, *n, *degree, opts.seed, tol) {
                Ok(doc) => match emit_json(&doc, out.as_deref()) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => {
                        eprintln!("cannot write output: {e}");
                        ExitCode::from(2)
                    }
                },
                Err(e) => {
                    eprintln!("{}", e.message);
                    ExitCode::from(2)
                }
            };
        }
        Command::Validate { files }
        | Command::Extract { files, .. }
        | Command::Verify { files, .. }
        | Command::Dilate { files, .. }
        | Command::Model { files, .. }
        | Command::Classify { files } => {
            let files = if files.is_empty() { vec![PathBuf::from("-")] } else { files.clone() };
            run_batch(&files, &cli.command, &opts, cli.jobs)
        }
    };

    if !cli.quiet {
        reports.iter().for_each(summarize);
    }
    let written = if reports.len() == 1 {
        emit_json(&reports[0], None)
    } else {
        emit_json(&reports, None)
    };
    if written.is_err() {
        return ExitCode::from(3);
    }
    let code = reports.iter().map(RunReport::exit_code).max().unwrap_or(0);
    ExitCode::from(code)
}
