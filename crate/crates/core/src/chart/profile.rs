use std::collections::BTreeSet;

use serde::Serialize;

use super::{Channel, ChartError, ChartSpec, FieldDef, MarkType, ViewDef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisKind {
    None,
    Discrete,
    Continuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxisProfile {
    pub kind: AxisKind,
    pub aggregate: bool,
    pub scale: Option<String>,
    /// Raw domain field; `None` for aggregates and missing scales.
    pub field: Option<String>,
}

impl AxisProfile {
    /// Whether an interval may be projected onto this axis.
    pub fn brushable(&self) -> bool {
        self.kind != AxisKind::None && !self.aggregate
    }

    /// Brushable with a continuous scale.
    pub fn continuous(&self) -> bool {
        self.kind == AxisKind::Continuous && !self.aggregate
    }
}

/// The view properties the suggestion heuristics look at.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ViewProfile {
    pub view: String,
    pub mark_types: BTreeSet<MarkType>,
    pub x: AxisProfile,
    pub y: AxisProfile,
    /// Raw fields bound to channels, mark by mark in channel order.
    pub encoded_fields: Vec<(Channel, FieldDef)>,
    /// Other views whose marks read one of this view's datasets.
    pub shared_data_views: Vec<String>,
    /// Fields of one datum as drawn in this view. Aggregated views expose the
    /// group-by fields followed by the aggregate outputs.
    pub datum_fields: Vec<String>,
}

impl ViewProfile {
    /// Distinct encoded field names in declaration order.
    pub fn distinct_encoded_fields(&self) -> Vec<&FieldDef> {
        let mut out: Vec<&FieldDef> = Vec::new();
        for (_, f) in &self.encoded_fields {
            if !out.iter().any(|o| o.name == f.name) {
                out.push(f);
            }
        }
        out
    }
}

pub fn profile_view(chart: &ChartSpec, view_id: &str) -> Result<ViewProfile, ChartError> {
    let view = chart
        .view(view_id)
        .ok_or_else(|| ChartError::UnknownView(view_id.to_string()))?;

    let axis = |channel: Channel| match view.scale_for(channel) {
        None => AxisProfile {
            kind: AxisKind::None,
            aggregate: false,
            scale: None,
            field: None,
        },
        Some(s) => AxisProfile {
            kind: if s.is_continuous() {
                AxisKind::Continuous
            } else {
                AxisKind::Discrete
            },
            aggregate: s.aggregate.is_some(),
            scale: Some(s.id.clone()),
            field: if s.aggregate.is_some() {
                None
            } else {
                s.field.clone()
            },
        },
    };

    let mut encoded_fields = Vec::new();
    for mark in &view.marks {
        for (channel, enc) in &mark.encodings {
            if let Some(field) = chart.encoded_field(view, mark, enc) {
                encoded_fields.push((*channel, field));
            }
        }
    }

    let own: Vec<&str> = view.datasets();
    let shared_data_views = chart
        .views
        .iter()
        .filter(|v| v.id != view.id)
        .filter(|v| v.datasets().iter().any(|d| own.contains(d)))
        .map(|v| v.id.clone())
        .collect();

    let mut profile = ViewProfile {
        view: view.id.clone(),
        mark_types: view.marks.iter().map(|m| m.mark_type).collect(),
        x: axis(Channel::X),
        y: axis(Channel::Y),
        encoded_fields,
        shared_data_views,
        datum_fields: Vec::new(),
    };
    profile.datum_fields = datum_fields(chart, view, &profile);
    Ok(profile)
}

fn datum_fields(chart: &ChartSpec, view: &ViewDef, profile: &ViewProfile) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut push = |name: &str| {
        if !out.iter().any(|o| o == name) {
            out.push(name.to_string());
        }
    };
    if view.is_aggregated() {
        for f in profile.distinct_encoded_fields() {
            push(&f.name);
        }
        for s in view.scales.iter().filter(|s| s.aggregate.is_some()) {
            if let Some(name) = s.output_field() {
                push(&name);
            }
        }
    } else {
        for ds in view.datasets() {
            if let Some(table) = chart.dataset(ds) {
                for f in &table.fields {
                    push(&f.name);
                }
            }
        }
    }
    out
}
