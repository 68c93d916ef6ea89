//! Suggestion heuristics.
//!
//! Phase 1 turns a demonstration into selection candidates, phase 2 lists the
//! applications that make sense for the demonstrated view, phase 3 exposes
//! the default candidate's signals and phase 4 picks defaults from the
//! demonstration's geometry and click count. Widgets are suggested from the
//! measure type of the bound field.

mod phases;
mod widgets;
pub(crate) use widgets::distinct_values;

use serde::Serialize;

use crate::chart::{profile_view, ChartSpec};
use crate::interaction::{Application, Selection, SignalDescriptor};
use crate::trace::Demonstration;

pub use phases::{
    enumerate_application_suggestions, enumerate_selection_suggestions,
    enumerate_signal_suggestions, infer_defaults, AXIS_CONSTRAINT_DEG,
};
pub use widgets::{suggest_widgets, WidgetSuggestionSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SuggestError {
    #[error("no valid selection for this demonstration on view `{view}`: {reason}")]
    NoValidSelection { view: String, reason: String },
    #[error("unknown view `{0}`")]
    UnknownView(String),
    #[error("unknown field `{0}`")]
    UnknownField(String),
}

impl SuggestError {
    pub fn code(&self) -> &'static str {
        match self {
            SuggestError::NoValidSelection { .. } => "NoValidSelection",
            SuggestError::UnknownView(_) => "UnknownView",
            SuggestError::UnknownField(_) => "UnknownField",
        }
    }
}

/// Candidates for one demonstration, default selection first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuggestionSet {
    pub version: u32,
    pub selections: Vec<Selection>,
    pub applications: Vec<Application>,
    /// Signals of the default selection.
    pub signals: Vec<SignalDescriptor>,
    pub default_selection: usize,
    /// Field a projected point selection should use unless the user picks another.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub default_projection: Option<String>,
    pub demonstration: Demonstration,
}

impl SuggestionSet {
    pub fn default(&self) -> &Selection {
        &self.selections[self.default_selection]
    }

    pub fn to_json(&self) -> String {
        crate::json::to_canonical_string(self)
    }
}

/// Runs all four phases for one demonstration.
pub fn suggest(chart: &ChartSpec, demo: &Demonstration) -> Result<SuggestionSet, SuggestError> {
    let profile = profile_view(chart, &demo.view_id)
        .map_err(|_| SuggestError::UnknownView(demo.view_id.clone()))?;
    let selections = enumerate_selection_suggestions(&profile, demo)?;
    let applications = enumerate_application_suggestions(chart, &profile, &selections);
    let candidates = SuggestionSet {
        version: crate::FORMAT_VERSION,
        selections,
        applications,
        signals: Vec::new(),
        default_selection: 0,
        default_projection: None,
        demonstration: demo.clone(),
    };
    let mut set = infer_defaults(candidates, demo, &profile);
    set.signals = enumerate_signal_suggestions(set.default(), chart);
    Ok(set)
}
