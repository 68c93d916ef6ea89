//! Request decoding and engine calls shared by the CLI and the HTTP service.
//!
//! Both front ends serialize results with
//! [`demoviz_core::json::to_canonical_string`], so the same inputs give the
//! same bytes whichever way they arrive.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use demoviz_core::chart::ChartError;
use demoviz_core::compiler::{is_expressible_vegalite, CompileError};
use demoviz_core::heuristics::SuggestError;
use demoviz_core::interaction::DocumentError;
use demoviz_core::trace::{parse_trace, TraceError};
use demoviz_core::{
    classify, load_chart, suggest_widgets, ChartSpec, CompiledSpec, Compiler, InputEvent,
    InteractionDocument, SuggestionSet, Target, ValidationReport, WidgetSuggestionSet,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input could not be read or decoded.
    Malformed,
    /// The input decoded but the engine rejected it.
    Unprocessable,
    /// A Vega-Lite compilation was asked for and something blocks it.
    NotExpressible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub kind: ErrorKind,
    pub code: String,
    pub message: String,
    pub details: Value,
}

impl ApiError {
    pub fn new(kind: ErrorKind, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            kind,
            code: code.to_string(),
            message: message.into(),
            details: Value::Null,
        }
    }

    pub fn with_details(mut self, details: Value) -> Self {
        self.details = details;
        self
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        ApiError::new(ErrorKind::Malformed, "MalformedInput", message)
    }

    pub fn status(&self) -> u16 {
        match self.kind {
            ErrorKind::Malformed => 400,
            ErrorKind::NotExpressible => 409,
            ErrorKind::Unprocessable => 422,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Malformed => 2,
            _ => 1,
        }
    }

    /// `{code, message, details}`, canonically serialized.
    pub fn body(&self) -> String {
        demoviz_core::json::to_canonical_string(&json!({
            "code": self.code,
            "message": self.message,
            "details": self.details,
        }))
    }
}

impl fmt::Display for ApiError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

impl std::error::Error for ApiError {}

impl From<ChartError> for ApiError {
    fn from(e: ChartError) -> Self {
        let kind = match e {
            ChartError::Parse(_) | ChartError::Io { .. } => ErrorKind::Malformed,
            _ => ErrorKind::Unprocessable,
        };
        let code = match e {
            ChartError::Parse(_) => "MalformedChart",
            ChartError::Io { .. } => "IoError",
            ChartError::EmptyChart => "EmptyChart",
            ChartError::Reference { .. } => "DanglingReference",
            ChartError::EmptyColumn(_) => "EmptyColumn",
            ChartError::UnknownView(_) => "UnknownView",
            ChartError::Invalid(_) => "InvalidChart",
        };
        ApiError::new(kind, code, e.to_string())
    }
}

impl From<TraceError> for ApiError {
    fn from(e: TraceError) -> Self {
        let (kind, code) = match e {
            TraceError::Parse(_) => (ErrorKind::Malformed, "MalformedTrace"),
            TraceError::EmptyTrace => (ErrorKind::Unprocessable, "EmptyTrace"),
            TraceError::UnbalancedTrace(_) => (ErrorKind::Unprocessable, "UnbalancedTrace"),
            TraceError::NonMonotonic { .. } => (ErrorKind::Unprocessable, "NonMonotonicTrace"),
            TraceError::MixedViews(..) => (ErrorKind::Unprocessable, "MixedViews"),
            TraceError::ZeroDisplacement => (ErrorKind::Unprocessable, "ZeroDisplacement"),
        };
        ApiError::new(kind, code, e.to_string())
    }
}

impl From<SuggestError> for ApiError {
    fn from(e: SuggestError) -> Self {
        ApiError::new(ErrorKind::Unprocessable, e.code(), e.to_string())
    }
}

impl From<DocumentError> for ApiError {
    fn from(e: DocumentError) -> Self {
        ApiError::new(ErrorKind::Malformed, "MalformedInteractions", e.to_string())
    }
}

impl From<CompileError> for ApiError {
    fn from(e: CompileError) -> Self {
        let message = e.to_string();
        match e {
            CompileError::NotExpressible(report) => {
                ApiError::new(ErrorKind::NotExpressible, "NotExpressible", message)
                    .with_details(demoviz_core::json::to_canonical_value(&report))
            }
            CompileError::Invalid(report) => invalid(report),
            other => ApiError::new(ErrorKind::Unprocessable, other.code(), message),
        }
    }
}

fn invalid(report: ValidationReport) -> ApiError {
    ApiError::new(
        ErrorKind::Unprocessable,
        "ValidationFailed",
        "interactions do not validate against the chart",
    )
    .with_details(demoviz_core::json::to_canonical_value(&report))
}

/// Compilation target as requested by a caller; `auto` prefers Vega-Lite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum TargetChoice {
    #[serde(rename = "vega-lite")]
    VegaLite,
    #[serde(rename = "vega")]
    Vega,
    #[default]
    #[serde(rename = "auto")]
    Auto,
}

impl FromStr for TargetChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(TargetChoice::Auto),
            other => other.parse::<Target>().map(|t| match t {
                Target::VegaLite => TargetChoice::VegaLite,
                Target::Vega => TargetChoice::Vega,
            }),
        }
    }
}

/// Loads a chart document. Url datasets resolve against `base_dir` when given
/// and are rejected otherwise.
pub fn chart_from_str(text: &str, base_dir: Option<&Path>) -> Result<ChartSpec, ApiError> {
    Ok(load_chart(text, base_dir)?)
}

pub fn chart_from_value(value: &Value) -> Result<ChartSpec, ApiError> {
    chart_from_str(&value.to_string(), None)
}

pub fn trace_from_str(text: &str) -> Result<Vec<InputEvent>, ApiError> {
    Ok(parse_trace(text)?)
}

pub fn interactions_from_str(text: &str) -> Result<InteractionDocument, ApiError> {
    Ok(InteractionDocument::parse(text)?)
}

pub fn interactions_from_value(value: &Value) -> Result<InteractionDocument, ApiError> {
    Ok(InteractionDocument::from_value(value.clone())?)
}

/// Suggestions for the last demonstration in a trace.
pub fn suggest(chart: &ChartSpec, trace: &[InputEvent]) -> Result<SuggestionSet, ApiError> {
    let demos = classify(trace)?;
    let demo = demos.last().expect("classify never returns an empty list");
    Ok(demoviz_core::suggest(chart, demo)?)
}

pub fn widgets(
    chart: &ChartSpec,
    dataset: Option<&str>,
    field: &str,
) -> Result<WidgetSuggestionSet, ApiError> {
    Ok(suggest_widgets(chart, dataset, field)?)
}

/// Validates an interaction document, or just the chart when there is none.
pub fn validate(chart: &ChartSpec, interactions: Option<&InteractionDocument>) -> ValidationReport {
    match interactions {
        Some(doc) => match doc.resolve(chart) {
            Ok(_) => ValidationReport::default(),
            Err(report) => report,
        },
        None => ValidationReport::default(),
    }
}

pub struct Compiled {
    pub spec: CompiledSpec,
    /// Set when `auto` fell back to Vega, naming what blocked Vega-Lite.
    pub fallback_note: Option<String>,
}

pub fn compile(
    compiler: &Compiler,
    chart: &ChartSpec,
    interactions: &InteractionDocument,
    target: TargetChoice,
) -> Result<Compiled, ApiError> {
    let defs = interactions.resolve(chart).map_err(invalid)?;
    let (spec, fallback_note) = match target {
        TargetChoice::VegaLite => (compiler.compile(chart, &defs, Target::VegaLite)?, None),
        TargetChoice::Vega => (compiler.compile(chart, &defs, Target::Vega)?, None),
        TargetChoice::Auto => {
            let report = is_expressible_vegalite(chart, &defs);
            let note = (!report.is_empty()).then(|| {
                format!("note: not expressible in Vega-Lite, emitting Vega instead\n{report}")
            });
            (compiler.compile_auto(chart, &defs)?, note)
        }
    };
    Ok(Compiled {
        spec,
        fallback_note,
    })
}

/// `GET /api/health` body.
pub fn health(compiler: &Compiler) -> Value {
    json!({
        "status": "ok",
        "version": demoviz_core::FORMAT_VERSION,
        "engine": env!("CARGO_PKG_VERSION"),
        "schemas": compiler.schemas().fingerprints(),
    })
}
