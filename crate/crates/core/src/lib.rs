//! Interaction design by demonstration.
//!
//! The crate interprets recorded input-event demonstrations over a static,
//! declarative chart, enumerates the interactive behaviours those
//! demonstrations could mean, and lowers accepted interaction designs into
//! Vega-Lite (v4) or Vega (v5) documents.
//!
//! The pipeline is split into the following modules:
//!
//! - [`chart`]: the static chart model, data ingestion and view profiling.
//! - [`trace`]: input-event traces and their classification into drags,
//!   click chunks and hovers.
//! - [`interaction`]: selections, applications, query widgets, signals and
//!   their validation against a chart.
//! - [`heuristics`]: the four-phase suggestion system and widget suggestions.
//! - [`compiler`]: Vega-Lite and Vega code generation plus schema checks.

pub mod chart;
pub mod compiler;
pub mod heuristics;
pub mod interaction;
pub mod json;
pub mod trace;
pub mod value;

/// Version stamped into every document this crate reads or writes.
pub const FORMAT_VERSION: u32 = 1;

pub use chart::{load_chart, load_chart_file, save_chart, ChartError, ChartSpec, ViewProfile};
pub use compiler::{CompileError, CompiledSpec, Compiler, SchemaSet, Target};
pub use heuristics::{suggest, suggest_widgets, SuggestionSet, WidgetSuggestionSet};
pub use interaction::{InteractionDef, InteractionDocument, ValidationReport};
pub use trace::{classify, Demonstration, InputEvent};
