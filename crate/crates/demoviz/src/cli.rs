//! `demoviz` command line.
//!
//! Exit codes: 0 success, 1 rejected by the engine (validation failure,
//! nothing to suggest, not expressible), 2 unreadable or malformed input.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use demoviz_core::json::to_canonical_string;
use demoviz_core::{ChartSpec, Compiler, SchemaSet};

use crate::api::{self, ApiError, TargetChoice};

#[derive(Debug, Parser)]
#[command(
    name = "demoviz",
    version,
    about = "Interaction design by demonstration"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Suggest selections and applications for a recorded demonstration.
    Suggest {
        #[arg(long)]
        chart: String,
        #[arg(long)]
        trace: String,
    },
    /// Compile a chart and its interactions to Vega-Lite or Vega.
    Compile {
        #[arg(long)]
        chart: String,
        #[arg(long)]
        interactions: String,
        #[arg(long, default_value = "auto")]
        target: TargetChoice,
        /// Print only the target document instead of the full result.
        #[arg(long)]
        document_only: bool,
    },
    /// Suggest query widgets for a data field.
    Widgets {
        #[arg(long)]
        chart: String,
        #[arg(long)]
        field: String,
        #[arg(long)]
        dataset: Option<String>,
    },
    /// Check a chart, and optionally an interaction document against it.
    Validate {
        #[arg(long)]
        chart: String,
        #[arg(long)]
        interactions: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(e: &ApiError) -> Self {
        let mut stderr = format!("error: {e}\n");
        if !e.details.is_null() {
            stderr.push_str(&to_canonical_string(&e.details));
        }
        Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr,
        }
    }
}

/// Reads `path`, or `stdin` when the path is `-`. At most one input may come
/// from stdin.
struct Inputs<R> {
    stdin: Option<R>,
}

impl<R: Read> Inputs<R> {
    fn read(&mut self, path: &str) -> Result<String, ApiError> {
        if path == "-" {
            let mut stdin = self
                .stdin
                .take()
                .ok_or_else(|| ApiError::malformed("only one input can be read from stdin"))?;
            let mut text = String::new();
            stdin
                .read_to_string(&mut text)
                .map_err(|e| io_error("stdin", &e))?;
            return Ok(text);
        }
        std::fs::read_to_string(path).map_err(|e| io_error(path, &e))
    }

    fn chart(&mut self, path: &str) -> Result<ChartSpec, ApiError> {
        let text = self.read(path)?;
        let base = if path == "-" {
            PathBuf::from(".")
        } else {
            Path::new(path)
                .parent()
                .map(Path::to_path_buf)
                .unwrap_or_default()
        };
        api::chart_from_str(&text, Some(&base))
    }
}

fn io_error(path: &str, e: &std::io::Error) -> ApiError {
    ApiError::new(
        api::ErrorKind::Malformed,
        "IoError",
        format!("failed to read {path}: {e}"),
    )
}

/// Runs one invocation. `argv[0]` is the program name.
pub fn run<I, S, R>(argv: I, stdin: R) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
    R: Read,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    let mut inputs = Inputs { stdin: Some(stdin) };
    match execute(cli.command, &mut inputs) {
        Ok(outcome) => outcome,
        Err(e) => Outcome::error(&e),
    }
}

fn execute<R: Read>(command: Command, inputs: &mut Inputs<R>) -> Result<Outcome, ApiError> {
    match command {
        Command::Suggest { chart, trace } => {
            let chart = inputs.chart(&chart)?;
            let trace = api::trace_from_str(&inputs.read(&trace)?)?;
            let set = api::suggest(&chart, &trace)?;
            Ok(Outcome::ok(set.to_json()))
        }
        Command::Compile {
            chart,
            interactions,
            target,
            document_only,
        } => {
            let chart = inputs.chart(&chart)?;
            let doc = api::interactions_from_str(&inputs.read(&interactions)?)?;
            let schemas = SchemaSet::from_env().map_err(|e| {
                ApiError::new(
                    api::ErrorKind::Malformed,
                    "SchemaUnavailable",
                    e.to_string(),
                )
            })?;
            let compiler = Compiler::new(Arc::clone(&schemas));
            let compiled = api::compile(&compiler, &chart, &doc, target)?;
            let stdout = if document_only {
                compiled.spec.document_json()
            } else {
                compiled.spec.to_json()
            };
            Ok(Outcome {
                code: 0,
                stdout,
                stderr: compiled.fallback_note.unwrap_or_default(),
            })
        }
        Command::Widgets {
            chart,
            field,
            dataset,
        } => {
            let chart = inputs.chart(&chart)?;
            let set = api::widgets(&chart, dataset.as_deref(), &field)?;
            Ok(Outcome::ok(set.to_json()))
        }
        Command::Validate {
            chart,
            interactions,
        } => {
            let chart = inputs.chart(&chart)?;
            let doc = match interactions {
                Some(path) => Some(api::interactions_from_str(&inputs.read(&path)?)?),
                None => None,
            };
            let report = api::validate(&chart, doc.as_ref());
            Ok(Outcome {
                code: if report.is_valid() { 0 } else { 1 },
                stdout: to_canonical_string(&report),
                stderr: if report.is_valid() {
                    String::new()
                } else {
                    report.to_string()
                },
            })
        }
    }
}
