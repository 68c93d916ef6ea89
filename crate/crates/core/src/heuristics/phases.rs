use serde_json::{json, Value};

use super::{SuggestError, SuggestionSet};
use crate::chart::{Channel, ChartSpec, MarkDef, MarkType, ViewDef, ViewProfile};
use crate::interaction::{
    enumerate_signals, Application, ApplicationKind, Axis, Cardinality, EventSource, ScaleRef,
    Selection, SelectionKind, SignalDescriptor,
};
use crate::trace::{Demonstration, Gesture};

/// A drag within this many degrees of an axis is constrained to that axis.
pub const AXIS_CONSTRAINT_DEG: f64 = 30.0;

const DEFAULT_PROJECTION_PRIORITY: [Channel; 4] = [
    Channel::Color,
    Channel::Size,
    Channel::Opacity,
    Channel::Shape,
];

fn selection_id(on: EventSource) -> &'static str {
    match on {
        EventSource::Drag => "brush",
        EventSource::Click => "select",
        EventSource::Hover => "hover",
    }
}

fn event_source(demo: &Demonstration) -> EventSource {
    match demo.gesture {
        Gesture::Drag { .. } => EventSource::Drag,
        Gesture::ClickChunk { .. } => EventSource::Click,
        Gesture::Hover { .. } => EventSource::Hover,
    }
}

/// Phase 1: selection candidates in rule-table order.
pub fn enumerate_selection_suggestions(
    profile: &ViewProfile,
    demo: &Demonstration,
) -> Result<Vec<Selection>, SuggestError> {
    let on = event_source(demo);
    let id = selection_id(on);
    let view = &profile.view;
    let mut out = Vec::new();

    if on == EventSource::Drag {
        let per_datum = profile.mark_types.iter().any(|m| m.is_discrete());
        let (x, y) = (profile.x.brushable(), profile.y.brushable());
        if per_datum && profile.x.continuous() && profile.y.continuous() {
            out.push(Selection::interval(id, view, &[Axis::X, Axis::Y]));
        }
        if x {
            out.push(Selection::interval(id, view, &[Axis::X]));
        }
        if per_datum && y {
            out.push(Selection::interval(id, view, &[Axis::Y]));
        }
        if out.is_empty() {
            return Err(SuggestError::NoValidSelection {
                view: view.clone(),
                reason: "no non-aggregate spatial axis to brush".into(),
            });
        }
    } else {
        if profile.datum_fields.is_empty() {
            return Err(SuggestError::NoValidSelection {
                view: view.clone(),
                reason: "no data-backed marks to select".into(),
            });
        }
        out.push(Selection::point(id, view, on, Cardinality::Single, &[]));
        out.push(Selection::point(id, view, on, Cardinality::Multi, &[]));
        for f in profile.distinct_encoded_fields() {
            out.push(Selection::point(
                id,
                view,
                on,
                Cardinality::Single,
                &[&f.name],
            ));
        }
    }
    Ok(out)
}

fn data_marks(view: &ViewDef) -> impl Iterator<Item = &MarkDef> {
    view.marks.iter().filter(|m| m.dataset.is_some())
}

fn conditional(
    id: String,
    selection: &str,
    mark: &str,
    channel: Channel,
    default_value: Value,
) -> Application {
    Application {
        id,
        selection: selection.to_string(),
        kind: ApplicationKind::ConditionalEncoding {
            mark: mark.to_string(),
            channel,
            selected_value: None,
            default_value,
        },
    }
}

/// Phase 2: applications for the demonstrated view, in rule-table order.
///
/// Conditional color and opacity for every per-datum mark, plus size for
/// symbols; pan & zoom over the view's continuous spatial scales when the
/// candidates are intervals; a filter and a color link for each view sharing
/// data with this one.
pub fn enumerate_application_suggestions(
    chart: &ChartSpec,
    profile: &ViewProfile,
    selections: &[Selection],
) -> Vec<Application> {
    let Some(first) = selections.first() else {
        return Vec::new();
    };
    let Some(view) = chart.view(&profile.view) else {
        return Vec::new();
    };
    let sel = first.id.as_str();
    let mut out = Vec::new();

    for mark in data_marks(view).filter(|m| m.mark_type.is_discrete()) {
        out.push(conditional(
            format!("{sel}_color_{}", mark.id),
            sel,
            &mark.id,
            Channel::Color,
            json!("lightgray"),
        ));
        out.push(conditional(
            format!("{sel}_opacity_{}", mark.id),
            sel,
            &mark.id,
            Channel::Opacity,
            json!(0.3),
        ));
        if mark.mark_type == MarkType::Symbol {
            out.push(conditional(
                format!("{sel}_size_{}", mark.id),
                sel,
                &mark.id,
                Channel::Size,
                json!(16),
            ));
        }
    }

    if first.is_interval() {
        let scales: Vec<ScaleRef> = [&profile.x, &profile.y]
            .into_iter()
            .filter(|a| a.continuous())
            .filter_map(|a| a.scale.as_deref())
            .map(|s| ScaleRef::new(&view.id, s))
            .collect();
        if !scales.is_empty() {
            out.push(Application {
                id: format!("{sel}_panzoom"),
                selection: sel.to_string(),
                kind: ApplicationKind::PanZoom { scales },
            });
        }
    }

    let own = view.datasets();
    for other in profile
        .shared_data_views
        .iter()
        .filter_map(|v| chart.view(v))
    {
        out.push(Application {
            id: format!("{sel}_filter_{}", other.id),
            selection: sel.to_string(),
            kind: ApplicationKind::Filter {
                view: other.id.clone(),
                self_filter: false,
            },
        });
        let linked = data_marks(other)
            .filter(|m| m.mark_type.is_discrete())
            .filter(|m| m.dataset.as_deref().is_some_and(|d| own.contains(&d)));
        for mark in linked {
            out.push(conditional(
                format!("{sel}_link_{}", mark.id),
                sel,
                &mark.id,
                Channel::Color,
                json!("lightgray"),
            ));
        }
    }
    out
}

/// Phase 3: the signals a selection candidate exposes.
pub fn enumerate_signal_suggestions(
    selection: &Selection,
    chart: &ChartSpec,
) -> Vec<SignalDescriptor> {
    enumerate_signals(selection, chart)
}

/// Phase 4: moves the inferred default to the front.
///
/// Drags within [`AXIS_CONSTRAINT_DEG`] of horizontal default to an x brush,
/// within it of vertical to a y brush (both bounds inclusive), otherwise to
/// the unconstrained brush. A click chunk of two or more defaults to a multi
/// selection. When the geometric default was ruled out in phase 1, the first
/// candidate stands.
pub fn infer_defaults(
    mut set: SuggestionSet,
    demo: &Demonstration,
    profile: &ViewProfile,
) -> SuggestionSet {
    let position = match &demo.gesture {
        Gesture::Drag {
            trajectory_angle, ..
        } => {
            let axes: &[Axis] = if *trajectory_angle <= AXIS_CONSTRAINT_DEG {
                &[Axis::X]
            } else if *trajectory_angle >= 90.0 - AXIS_CONSTRAINT_DEG {
                &[Axis::Y]
            } else {
                &[Axis::X, Axis::Y]
            };
            set.selections
                .iter()
                .position(|s| s.projected_axes() == axes)
        }
        Gesture::ClickChunk { count, .. } => {
            let cardinality = if *count >= 2 {
                Cardinality::Multi
            } else {
                Cardinality::Single
            };
            set.selections.iter().position(|s| {
                matches!(&s.kind, SelectionKind::Point { cardinality: c, fields } if *c == cardinality && fields.is_empty())
            })
        }
        Gesture::Hover { .. } => None,
    };
    if let Some(pos) = position {
        let chosen = set.selections.remove(pos);
        set.selections.insert(0, chosen);
    }
    set.default_selection = 0;

    if !set.default().is_interval() {
        set.default_projection = DEFAULT_PROJECTION_PRIORITY.iter().find_map(|c| {
            profile
                .encoded_fields
                .iter()
                .find(|(ch, _)| ch == c)
                .map(|(_, f)| f.name.clone())
        });
    }
    set
}
