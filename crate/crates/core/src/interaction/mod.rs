//! Abstract interaction primitives.
//!
//! An interaction design is a set of selections plus first-class
//! applications that say how each selection drives the chart, optional
//! signal bindings onto mark properties, and query widgets. Applications are
//! standalone records that reference their selection and target by id, so a
//! selection's every effect can be listed from one place.

mod document;
mod signals;
mod validate;
mod widget;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chart::Channel;

pub use document::{DocumentError, InteractionDocument};
pub use signals::enumerate_signals;
pub use validate::{validate_interaction, Issue, IssueCode, ValidationReport};
pub use widget::{widget_predicate, PredicateError, WidgetValue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    pub fn channel(self) -> Channel {
        match self {
            Axis::X => Channel::X,
            Axis::Y => Channel::Y,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventSource {
    Click,
    Hover,
    Drag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cardinality {
    Single,
    Multi,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SelectionKind {
    /// Discrete selection of data points; `fields` non-empty means projected.
    Point {
        cardinality: Cardinality,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        fields: Vec<String>,
    },
    /// Brush over one or both spatial axes.
    Interval { encodings: Vec<Axis> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Selection {
    pub id: String,
    #[serde(rename = "view")]
    pub source_view: String,
    #[serde(rename = "on")]
    pub event_source: EventSource,
    #[serde(flatten)]
    pub kind: SelectionKind,
}

impl Selection {
    pub fn interval(id: &str, view: &str, encodings: &[Axis]) -> Self {
        Selection {
            id: id.to_string(),
            source_view: view.to_string(),
            event_source: EventSource::Drag,
            kind: SelectionKind::Interval {
                encodings: encodings.to_vec(),
            },
        }
    }

    pub fn point(
        id: &str,
        view: &str,
        on: EventSource,
        cardinality: Cardinality,
        fields: &[&str],
    ) -> Self {
        Selection {
            id: id.to_string(),
            source_view: view.to_string(),
            event_source: on,
            kind: SelectionKind::Point {
                cardinality,
                fields: fields.iter().map(|f| f.to_string()).collect(),
            },
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self.kind, SelectionKind::Interval { .. })
    }

    pub fn projected_axes(&self) -> &[Axis] {
        match &self.kind {
            SelectionKind::Interval { encodings } => encodings,
            SelectionKind::Point { .. } => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScaleRef {
    pub view: String,
    pub scale: String,
}

impl ScaleRef {
    pub fn new(view: &str, scale: &str) -> Self {
        ScaleRef {
            view: view.to_string(),
            scale: scale.to_string(),
        }
    }
}

impl fmt::Display for ScaleRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.view, self.scale)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ApplicationKind {
    /// `selected_value: None` keeps the mark's own encoding for selected items.
    ConditionalEncoding {
        mark: String,
        channel: Channel,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        selected_value: Option<Value>,
        default_value: Value,
    },
    Filter {
        view: String,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        self_filter: bool,
    },
    PanZoom {
        scales: Vec<ScaleRef>,
    },
    ScaleDomain {
        scale: ScaleRef,
    },
}

impl ApplicationKind {
    pub fn name(&self) -> &'static str {
        match self {
            ApplicationKind::ConditionalEncoding { .. } => "conditional_encoding",
            ApplicationKind::Filter { .. } => "filter",
            ApplicationKind::PanZoom { .. } => "pan_zoom",
            ApplicationKind::ScaleDomain { .. } => "scale_domain",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Application {
    pub id: String,
    /// Id of the driving selection or query widget.
    pub selection: String,
    #[serde(flatten)]
    pub kind: ApplicationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WidgetKind {
    Radio,
    Select,
    Range,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "between")]
    Between,
}

impl Comparator {
    pub const ALL: [Comparator; 7] = [
        Comparator::Eq,
        Comparator::Ne,
        Comparator::Lt,
        Comparator::Le,
        Comparator::Gt,
        Comparator::Ge,
        Comparator::Between,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "==",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
            Comparator::Between => "between",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, Comparator::Eq | Comparator::Ne)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRef {
    pub dataset: String,
    pub field: String,
}

/// Values a widget offers: an option list or a numeric extent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WidgetDomain {
    Options { options: Vec<Value> },
    Extent { min: f64, max: f64, step: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryWidget {
    pub id: String,
    pub field: FieldRef,
    #[serde(rename = "widget")]
    pub widget_kind: WidgetKind,
    pub comparator: Comparator,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<WidgetDomain>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub applications: Vec<Application>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalSpace {
    Pixel,
    Data,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalRole {
    Start,
    End,
    Value,
    MouseX,
    MouseY,
}

/// A named dynamic variable a selection decomposes into.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignalDescriptor {
    pub name: String,
    pub space: SignalSpace,
    pub role: SignalRole,
    /// Id of the owning selection.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BindProperty {
    X,
    Y,
    Text,
    Size,
    Opacity,
}

impl BindProperty {
    pub fn channel(self) -> Channel {
        match self {
            BindProperty::X => Channel::X,
            BindProperty::Y => Channel::Y,
            BindProperty::Text => Channel::Text,
            BindProperty::Size => Channel::Size,
            BindProperty::Opacity => Channel::Opacity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalBinding {
    pub signal: String,
    pub mark: String,
    pub property: BindProperty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionInteraction {
    pub selection: Selection,
    pub applications: Vec<Application>,
    pub bindings: Vec<SignalBinding>,
}

/// One accepted interaction design: a selection with its effects, or a widget.
#[derive(Debug, Clone, PartialEq)]
pub enum InteractionDef {
    Selection(SelectionInteraction),
    Widget(QueryWidget),
}

impl InteractionDef {
    pub fn id(&self) -> &str {
        match self {
            InteractionDef::Selection(s) => &s.selection.id,
            InteractionDef::Widget(w) => &w.id,
        }
    }

    pub fn applications(&self) -> &[Application] {
        match self {
            InteractionDef::Selection(s) => &s.applications,
            InteractionDef::Widget(w) => &w.applications,
        }
    }
}

/// Ids end up inside generated expressions, so they must be plain identifiers.
pub(crate) fn is_identifier(id: &str) -> bool {
    let mut chars = id.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn selection_wire_format() {
        let s: Selection = serde_json::from_value(json!({
            "id": "brush", "view": "scatter", "on": "drag", "type": "interval", "encodings": ["x"]
        }))
        .unwrap();
        assert_eq!(s, Selection::interval("brush", "scatter", &[Axis::X]));
        let p = Selection::point(
            "pick",
            "hist",
            EventSource::Click,
            Cardinality::Multi,
            &["weather"],
        );
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(
            v,
            json!({"id": "pick", "view": "hist", "on": "click", "type": "point",
                   "cardinality": "multi", "fields": ["weather"]})
        );
    }

    #[test]
    fn application_wire_format() {
        let a: Application = serde_json::from_value(json!({
            "id": "c", "selection": "brush", "type": "conditional_encoding",
            "mark": "points", "channel": "color", "default_value": "lightgray"
        }))
        .unwrap();
        assert!(matches!(
            a.kind,
            ApplicationKind::ConditionalEncoding {
                selected_value: None,
                ..
            }
        ));
        let c: Comparator = serde_json::from_value(json!("<=")).unwrap();
        assert_eq!(c, Comparator::Le);
    }

    #[test]
    fn identifiers() {
        assert!(is_identifier("brush_1"));
        assert!(!is_identifier("1brush"));
        assert!(!is_identifier("br-ush"));
        assert!(!is_identifier(""));
    }
}
