//! Lowering of interaction designs into Vega-Lite (v4) and Vega (v5).
//!
//! Vega-Lite output is only produced when every feature in use has a
//! Vega-Lite counterpart; [`is_expressible_vegalite`] lists what blocks it.
//! Vega output is always available. Every document is checked against the
//! pinned schema before it is returned.

mod common;
mod schema;
mod vega;
mod vegalite;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chart::ChartSpec;
use crate::interaction::{
    ApplicationKind, Comparator, InteractionDef, SelectionKind, ValidationReport,
};

pub use schema::{SchemaError, SchemaSet, SCHEMA_DIR_ENV, VEGA_FILE, VEGA_LITE_FILE};
pub use vega::lower_selection;

pub const VEGA_LITE_SCHEMA_URL: &str = "https://vega.github.io/schema/vega-lite/v4.json";
pub const VEGA_SCHEMA_URL: &str = "https://vega.github.io/schema/vega/v5.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    #[serde(rename = "vega-lite")]
    VegaLite,
    #[serde(rename = "vega")]
    Vega,
}

impl Target {
    pub fn as_str(self) -> &'static str {
        match self {
            Target::VegaLite => "vega-lite",
            Target::Vega => "vega",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "vega-lite" => Ok(Target::VegaLite),
            "vega" => Ok(Target::Vega),
            other => Err(format!(
                "unknown target `{other}` (expected vega-lite or vega)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BlockerCode {
    /// A signal drives a mark property directly.
    SignalBinding,
    /// A query widget compares with something other than `==`.
    InequalityComparator,
    /// An application has no Vega-Lite selection counterpart.
    UnsupportedApplication,
}

impl fmt::Display for BlockerCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Blocker {
    pub code: BlockerCode,
    pub reference: String,
    pub message: String,
}

/// Features that keep a design out of Vega-Lite; empty means expressible.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ExpressibilityReport {
    pub blockers: Vec<Blocker>,
}

impl ExpressibilityReport {
    pub fn is_empty(&self) -> bool {
        self.blockers.is_empty()
    }

    pub fn has(&self, code: BlockerCode) -> bool {
        self.blockers.iter().any(|b| b.code == code)
    }
}

impl fmt::Display for ExpressibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blockers {
            writeln!(f, "{} at `{}`: {}", b.code, b.reference, b.message)?;
        }
        Ok(())
    }
}

/// Lists the features of `interactions` that Vega-Lite cannot express.
///
/// The chart is consulted only to map pan & zoom scales onto brushed axes.
pub fn is_expressible_vegalite(
    chart: &ChartSpec,
    interactions: &[InteractionDef],
) -> ExpressibilityReport {
    let mut blockers = Vec::new();
    let mut block = |code, reference: &str, message: String| {
        blockers.push(Blocker {
            code,
            reference: reference.to_string(),
            message,
        })
    };
    for def in interactions {
        match def {
            InteractionDef::Selection(s) => {
                for b in &s.bindings {
                    block(
                        BlockerCode::SignalBinding,
                        &b.signal,
                        format!(
                            "signal `{}` is bound to {:?} of mark `{}`",
                            b.signal, b.property, b.mark
                        ),
                    );
                }
                for app in &s.applications {
                    match &app.kind {
                        ApplicationKind::PanZoom { scales } => {
                            let projected = match &s.selection.kind {
                                SelectionKind::Interval { encodings } => encodings.clone(),
                                SelectionKind::Point { .. } => Vec::new(),
                            };
                            let view = chart.view(&s.selection.source_view);
                            let covered = scales.len() == projected.len()
                                && scales.iter().all(|r| {
                                    r.view == s.selection.source_view
                                        && projected.iter().any(|axis| {
                                            view.and_then(|v| v.scale_for(axis.channel()))
                                                .is_some_and(|sc| sc.id == r.scale)
                                        })
                                });
                            if !covered {
                                block(
                                    BlockerCode::UnsupportedApplication,
                                    &app.id,
                                    "pan & zoom must bind exactly the scales of the brushed axes"
                                        .to_string(),
                                );
                            }
                        }
                        ApplicationKind::Filter {
                            self_filter: true, ..
                        } => block(
                            BlockerCode::UnsupportedApplication,
                            &app.id,
                            "a selection cannot filter its own view".to_string(),
                        ),
                        _ => {}
                    }
                }
            }
            InteractionDef::Widget(w) => {
                if w.comparator != Comparator::Eq {
                    block(
                        BlockerCode::InequalityComparator,
                        &w.id,
                        format!("widget compares with `{}`", w.comparator.symbol()),
                    );
                }
            }
        }
    }
    ExpressibilityReport { blockers }
}

/// Which design element a group of generated signals belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterKind {
    Selection,
    Application,
    Widget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignalCluster {
    pub owner: String,
    pub kind: ClusterKind,
    pub signals: Vec<String>,
}

/// Where an application took effect in the output document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApplicationSite {
    pub application: String,
    /// JSON pointer of the clause, transform or scale domain.
    pub pointer: String,
}

/// A compiled document and what kept it from being Vega-Lite, if anything.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompiledSpec {
    pub version: u32,
    pub target: Target,
    pub expressibility: ExpressibilityReport,
    pub document: Value,
    #[serde(skip)]
    pub clusters: Vec<SignalCluster>,
    #[serde(skip)]
    pub sites: Vec<ApplicationSite>,
}

impl CompiledSpec {
    pub fn to_json(&self) -> String {
        crate::json::to_canonical_string(self)
    }

    /// The target document alone, canonically serialized.
    pub fn document_json(&self) -> String {
        crate::json::to_canonical_string(&self.document)
    }

    /// Names of every signal declared at the top level of a Vega document.
    pub fn signal_names(&self) -> Vec<String> {
        self.document
            .get("signals")
            .and_then(Value::as_array)
            .map(|s| {
                s.iter()
                    .filter_map(|d| d.get("name").and_then(Value::as_str).map(str::to_string))
                    .collect()
            })
            .unwrap_or_default()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CompileError {
    #[error("not expressible in Vega-Lite:\n{0}")]
    NotExpressible(ExpressibilityReport),
    #[error("interactions do not validate against the chart:\n{0}")]
    Invalid(ValidationReport),
    #[error("generated {target} document violates its schema: {}", errors.join("; "))]
    Schema { target: Target, errors: Vec<String> },
    #[error(transparent)]
    SchemaSet(#[from] SchemaError),
    #[error("internal compiler error: {0}")]
    Internal(String),
}

impl CompileError {
    pub fn code(&self) -> &'static str {
        match self {
            CompileError::NotExpressible(_) => "NotExpressible",
            CompileError::Invalid(_) => "ValidationFailed",
            CompileError::Schema { .. } => "SchemaViolation",
            CompileError::SchemaSet(_) => "SchemaUnavailable",
            CompileError::Internal(_) => "CompileError",
        }
    }
}

/// Compiles charts and interactions, checking output against [`SchemaSet`].
#[derive(Debug, Clone)]
pub struct Compiler {
    schemas: Arc<SchemaSet>,
}

impl Default for Compiler {
    fn default() -> Self {
        Compiler::new(SchemaSet::embedded())
    }
}

impl Compiler {
    pub fn new(schemas: Arc<SchemaSet>) -> Self {
        Compiler { schemas }
    }

    pub fn schemas(&self) -> &SchemaSet {
        &self.schemas
    }

    pub fn compile(
        &self,
        chart: &ChartSpec,
        interactions: &[InteractionDef],
        target: Target,
    ) -> Result<CompiledSpec, CompileError> {
        match target {
            Target::VegaLite => self.compile_vegalite(chart, interactions),
            Target::Vega => self.compile_vega(chart, interactions),
        }
    }

    /// Prefers Vega-Lite and falls back to Vega when something blocks it.
    pub fn compile_auto(
        &self,
        chart: &ChartSpec,
        interactions: &[InteractionDef],
    ) -> Result<CompiledSpec, CompileError> {
        if is_expressible_vegalite(chart, interactions).is_empty() {
            self.compile_vegalite(chart, interactions)
        } else {
            self.compile_vega(chart, interactions)
        }
    }

    pub fn compile_vegalite(
        &self,
        chart: &ChartSpec,
        interactions: &[InteractionDef],
    ) -> Result<CompiledSpec, CompileError> {
        check_valid(chart, interactions)?;
        let report = is_expressible_vegalite(chart, interactions);
        if !report.is_empty() {
            return Err(CompileError::NotExpressible(report));
        }
        let out = vegalite::compile(chart, interactions)?;
        self.finish(Target::VegaLite, out, report)
    }

    pub fn compile_vega(
        &self,
        chart: &ChartSpec,
        interactions: &[InteractionDef],
    ) -> Result<CompiledSpec, CompileError> {
        check_valid(chart, interactions)?;
        let report = is_expressible_vegalite(chart, interactions);
        let out = vega::compile(chart, interactions)?;
        self.finish(Target::Vega, out, report)
    }

    fn finish(
        &self,
        target: Target,
        out: common::Output,
        expressibility: ExpressibilityReport,
    ) -> Result<CompiledSpec, CompileError> {
        self.schemas
            .validate(target, &out.document)
            .map_err(|errors| CompileError::Schema { target, errors })?;
        Ok(CompiledSpec {
            version: crate::FORMAT_VERSION,
            target,
            expressibility,
            document: out.document,
            clusters: out.clusters,
            sites: out.sites,
        })
    }
}

fn check_valid(chart: &ChartSpec, interactions: &[InteractionDef]) -> Result<(), CompileError> {
    let doc = crate::interaction::InteractionDocument::from_defs(interactions);
    doc.resolve(chart)
        .map(|_| ())
        .map_err(CompileError::Invalid)
}
