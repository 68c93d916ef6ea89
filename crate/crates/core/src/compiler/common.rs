use std::collections::HashSet;

use serde_json::{json, Value};

use super::{ApplicationSite, SignalCluster};
use crate::chart::{Channel, ChartSpec, Encoding, MarkDef, MeasureType, ScaleDef, ViewDef};
use crate::interaction::{
    Application, ApplicationKind, InteractionDef, QueryWidget, SelectionInteraction,
};

/// Vertical gap between stacked views, leaving room for the x axis.
pub const VIEW_GAP: u32 = 60;

pub struct Output {
    pub document: Value,
    pub clusters: Vec<SignalCluster>,
    pub sites: Vec<ApplicationSite>,
}

/// Hands out names unique within one namespace of the output document.
#[derive(Default)]
pub struct Namer {
    taken: HashSet<String>,
}

impl Namer {
    pub fn claim(&mut self, base: &str) -> String {
        if self.taken.insert(base.to_string()) {
            return base.to_string();
        }
        let mut n = 2;
        loop {
            let candidate = format!("{base}_{n}");
            if self.taken.insert(candidate.clone()) {
                return candidate;
            }
            n += 1;
        }
    }
}

/// Top-left corner of each view when views are stacked vertically.
pub fn view_offsets(chart: &ChartSpec) -> Vec<(String, u32)> {
    let mut y = 0;
    chart
        .views
        .iter()
        .map(|v| {
            let at = y;
            y += v.height + VIEW_GAP;
            (v.id.clone(), at)
        })
        .collect()
}

pub fn selections(defs: &[InteractionDef]) -> impl Iterator<Item = &SelectionInteraction> {
    defs.iter().filter_map(|d| match d {
        InteractionDef::Selection(s) => Some(s),
        InteractionDef::Widget(_) => None,
    })
}

pub fn widgets(defs: &[InteractionDef]) -> impl Iterator<Item = &QueryWidget> {
    defs.iter().filter_map(|d| match d {
        InteractionDef::Widget(w) => Some(w),
        InteractionDef::Selection(_) => None,
    })
}

pub fn applications(defs: &[InteractionDef]) -> impl Iterator<Item = &Application> {
    defs.iter().flat_map(|d| d.applications().iter())
}

/// Conditional-encoding applications aimed at one mark channel, in order.
pub fn conditionals<'a>(
    defs: &'a [InteractionDef],
    mark: &str,
    channel: Channel,
) -> Vec<&'a Application> {
    applications(defs)
        .filter(|a| {
            matches!(&a.kind, ApplicationKind::ConditionalEncoding { mark: m, channel: c, .. }
                if m == mark && *c == channel)
        })
        .collect()
}

/// Filters whose target is `view`, in order.
pub fn filters_on<'a>(defs: &'a [InteractionDef], view: &str) -> Vec<&'a Application> {
    applications(defs)
        .filter(|a| matches!(&a.kind, ApplicationKind::Filter { view: v, .. } if v == view))
        .collect()
}

/// Value a conditionally encoded channel shows for selected items when the
/// mark has no encoding of its own.
pub fn channel_fallback(channel: Channel) -> Value {
    match channel {
        Channel::Color => json!("#4c78a8"),
        Channel::Opacity => json!(1),
        Channel::Size => json!(64),
        _ => Value::Null,
    }
}

/// The field a scaled encoding reads once the view is aggregated.
/// A field name as a Vega field reference; dots and brackets would otherwise
/// be read as nested access.
pub fn field_ref(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for c in name.chars() {
        if matches!(c, '\\' | '.' | '[' | ']') {
            out.push('\\');
        }
        out.push(c);
    }
    out
}

pub fn scaled_field(scale: &ScaleDef, field: &Option<String>) -> Option<String> {
    if scale.aggregate.is_some() {
        scale.output_field()
    } else {
        field.clone().or_else(|| scale.field.clone())
    }
}

/// Measure type used for an encoding in the generated document.
pub fn encoding_type(chart: &ChartSpec, scale: &ScaleDef, field: Option<&str>) -> MeasureType {
    if scale.aggregate.is_some() {
        return MeasureType::Quantitative;
    }
    let declared = field
        .and_then(|f| chart.measure_type(&scale.dataset, f))
        .unwrap_or(MeasureType::Nominal);
    match (scale.is_continuous(), declared) {
        (true, t) if t.is_continuous() => t,
        (true, _) => MeasureType::Quantitative,
        (false, MeasureType::Nominal) => MeasureType::Nominal,
        (false, _) => MeasureType::Ordinal,
    }
}

/// Whether a scale reads a temporal field.
pub fn is_temporal(chart: &ChartSpec, scale: &ScaleDef) -> bool {
    scale.aggregate.is_none()
        && scale
            .field
            .as_deref()
            .and_then(|f| chart.measure_type(&scale.dataset, f))
            == Some(MeasureType::Temporal)
}

pub fn has_discrete_axis(view: &ViewDef, mark: &MarkDef) -> bool {
    [Channel::X, Channel::Y]
        .into_iter()
        .any(|c| match mark.encodings.get(&c) {
            Some(Encoding::Scaled { scale, .. }) => {
                view.scale(scale).is_some_and(|s| !s.is_continuous())
            }
            _ => false,
        })
}

/// JSON-pointer escaping of one path segment.
pub fn pointer_segment(segment: &str) -> String {
    segment.replace('~', "~0").replace('/', "~1")
}

/// Options for a choice widget declared without a domain.
pub fn widget_options(chart: &ChartSpec, widget: &QueryWidget) -> Vec<Value> {
    chart
        .dataset(&widget.field.dataset)
        .and_then(|t| {
            t.field(&widget.field.field)
                .map(|f| crate::heuristics::distinct_values(t, f))
        })
        .unwrap_or_default()
}
