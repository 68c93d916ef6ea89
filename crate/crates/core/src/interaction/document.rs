//! Interaction file format (version 1).
//!
//! Every element is a flat, id-referenced record. Applications name their
//! selection (or widget) by id and bindings name a signal, so a document reads
//! as a set of tables rather than a tree.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{
    enumerate_signals, validate_interaction, Application, InteractionDef, IssueCode, QueryWidget,
    Selection, SelectionInteraction, SignalBinding, ValidationReport,
};
use crate::chart::ChartSpec;
use crate::json::to_canonical_string;
use crate::FORMAT_VERSION;

#[derive(Debug, thiserror::Error)]
#[error("malformed interaction document: {0}")]
pub struct DocumentError(pub String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteractionDocument {
    pub version: u32,
    #[serde(default)]
    pub selections: Vec<Selection>,
    #[serde(default)]
    pub applications: Vec<Application>,
    #[serde(default)]
    pub widgets: Vec<QueryWidget>,
    #[serde(default)]
    pub bindings: Vec<SignalBinding>,
}

impl Default for InteractionDocument {
    fn default() -> Self {
        InteractionDocument {
            version: FORMAT_VERSION,
            selections: Vec::new(),
            applications: Vec::new(),
            widgets: Vec::new(),
            bindings: Vec::new(),
        }
    }
}

impl InteractionDocument {
    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let doc: InteractionDocument =
            serde_json::from_str(text).map_err(|e| DocumentError(e.to_string()))?;
        if doc.version != FORMAT_VERSION {
            return Err(DocumentError(format!(
                "unsupported interaction format version {} (expected {FORMAT_VERSION})",
                doc.version
            )));
        }
        Ok(doc)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self, DocumentError> {
        Self::parse(&value.to_string())
    }

    /// Flattens definitions back into the file layout.
    pub fn from_defs(defs: &[InteractionDef]) -> Self {
        let mut doc = InteractionDocument::default();
        for def in defs {
            match def {
                InteractionDef::Selection(s) => {
                    doc.selections.push(s.selection.clone());
                    doc.applications.extend(s.applications.iter().cloned());
                    doc.bindings.extend(s.bindings.iter().cloned());
                }
                InteractionDef::Widget(w) => {
                    doc.applications.extend(w.applications.iter().cloned());
                    doc.widgets.push(QueryWidget {
                        applications: Vec::new(),
                        ..w.clone()
                    });
                }
            }
        }
        doc
    }

    pub fn to_json(&self) -> String {
        to_canonical_string(self)
    }

    /// Groups the flat records into definitions, reporting records that do
    /// not attach to anything or ids that collide. Each definition is not yet
    /// validated on its own.
    pub fn group(&self, chart: &ChartSpec) -> (Vec<InteractionDef>, ValidationReport) {
        let mut report = ValidationReport::default();
        let mut ids = HashSet::new();
        for id in self
            .selections
            .iter()
            .map(|s| &s.id)
            .chain(self.widgets.iter().map(|w| &w.id))
        {
            if !ids.insert(id.as_str()) {
                report.push(
                    IssueCode::DuplicateId,
                    id,
                    "id used by more than one selection or widget",
                );
            }
        }
        let mut app_ids = HashSet::new();
        let inline = self.widgets.iter().flat_map(|w| w.applications.iter());
        for app in self.applications.iter().chain(inline) {
            if !app_ids.insert(app.id.as_str()) {
                report.push(IssueCode::DuplicateId, &app.id, "application id used twice");
            }
            if !ids.contains(app.selection.as_str()) {
                report.push(
                    IssueCode::DanglingReference,
                    &app.id,
                    format!("selection or widget `{}` does not exist", app.selection),
                );
            }
        }

        let mut owner_of: HashMap<String, &str> = HashMap::new();
        for sel in &self.selections {
            for sig in enumerate_signals(sel, chart) {
                if let Some(prev) = owner_of.insert(sig.name.clone(), &sel.id) {
                    if prev != sel.id {
                        report.push(
                            IssueCode::DuplicateId,
                            &sig.name,
                            format!("signal name produced by both `{prev}` and `{}`", sel.id),
                        );
                    }
                }
            }
        }
        for b in &self.bindings {
            if !owner_of.contains_key(&b.signal) {
                report.push(
                    IssueCode::DanglingReference,
                    &b.signal,
                    format!("no selection exposes signal `{}`", b.signal),
                );
            }
        }

        let mut defs = Vec::new();
        for sel in &self.selections {
            defs.push(InteractionDef::Selection(SelectionInteraction {
                selection: sel.clone(),
                applications: self
                    .applications
                    .iter()
                    .filter(|a| a.selection == sel.id)
                    .cloned()
                    .collect(),
                bindings: self
                    .bindings
                    .iter()
                    .filter(|b| owner_of.get(&b.signal).is_some_and(|o| *o == sel.id))
                    .cloned()
                    .collect(),
            }));
        }
        for w in &self.widgets {
            let mut widget = w.clone();
            widget.applications.extend(
                self.applications
                    .iter()
                    .filter(|a| a.selection == w.id)
                    .cloned(),
            );
            defs.push(InteractionDef::Widget(widget));
        }
        (defs, report)
    }

    /// Groups and fully validates the document against a chart.
    pub fn resolve(&self, chart: &ChartSpec) -> Result<Vec<InteractionDef>, ValidationReport> {
        let (defs, mut report) = self.group(chart);
        for def in &defs {
            report.merge(validate_interaction(chart, def));
        }
        if report.is_valid() {
            Ok(defs)
        } else {
            Err(report)
        }
    }
}
