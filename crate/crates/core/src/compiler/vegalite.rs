use serde_json::{json, Map, Value};

use super::common::{self, Output};
use super::{ApplicationSite, CompileError, VEGA_LITE_SCHEMA_URL};
use crate::chart::{Channel, ChartSpec, Encoding, MarkDef, MarkType, ViewDef};
use crate::interaction::{
    Application, ApplicationKind, Cardinality, EventSource, InteractionDef, QueryWidget,
    SelectionInteraction, SelectionKind, WidgetDomain, WidgetKind,
};

pub(super) fn compile(chart: &ChartSpec, defs: &[InteractionDef]) -> Result<Output, CompileError> {
    let mut sites = Vec::new();
    let mut datasets = Map::new();
    for table in &chart.datasets {
        let rows = table.rows.iter().cloned().map(Value::Object).collect();
        datasets.insert(table.id.clone(), Value::Array(rows));
    }

    let single = chart.views.len() == 1;
    let mut views = Vec::with_capacity(chart.views.len());
    for (i, view) in chart.views.iter().enumerate() {
        let prefix = if single {
            String::new()
        } else {
            format!("/vconcat/{i}")
        };
        views.push(view_spec(chart, defs, view, &prefix, &mut sites)?);
    }

    let mut doc = Map::new();
    doc.insert("$schema".into(), json!(VEGA_LITE_SCHEMA_URL));
    doc.insert("datasets".into(), Value::Object(datasets));
    if single {
        let Value::Object(view) = views.pop().expect("one view") else {
            unreachable!("view specs are objects")
        };
        doc.extend(view);
    } else {
        doc.insert("vconcat".into(), Value::Array(views));
    }
    Ok(Output {
        document: Value::Object(doc),
        clusters: Vec::new(),
        sites,
    })
}

fn view_spec(
    chart: &ChartSpec,
    defs: &[InteractionDef],
    view: &ViewDef,
    prefix: &str,
    sites: &mut Vec<ApplicationSite>,
) -> Result<Value, CompileError> {
    let layered = view.marks.len() != 1;
    let unit_prefix = |j: usize| {
        if layered {
            format!("{prefix}/layer/{j}")
        } else {
            prefix.to_string()
        }
    };
    // Selections and widgets live in the first data-backed unit of a view.
    let host = view.marks.iter().position(|m| m.dataset.is_some());
    let view_selections: Vec<&SelectionInteraction> = common::selections(defs)
        .filter(|s| s.selection.source_view == view.id)
        .collect();
    let view_widgets: Vec<&QueryWidget> = common::widgets(defs)
        .filter(|w| widget_host(chart, w) == Some(view.id.as_str()))
        .collect();
    if host.is_none() && (!view_selections.is_empty() || !view_widgets.is_empty()) {
        return Err(CompileError::Internal(format!(
            "view `{}` has no data-backed mark to host selections",
            view.id
        )));
    }
    let filters = common::filters_on(defs, &view.id);

    let mut units = Vec::with_capacity(view.marks.len());
    for (j, mark) in view.marks.iter().enumerate() {
        let at = unit_prefix(j);
        let mut unit = Map::new();
        unit.insert("mark".into(), json!(mark_type(view, mark)));
        unit.insert(
            "data".into(),
            match &mark.dataset {
                Some(ds) => json!({ "name": ds }),
                None => json!({ "values": [{}] }),
            },
        );
        unit.insert(
            "encoding".into(),
            Value::Object(encoding(chart, defs, view, mark, &at, sites)),
        );

        if host == Some(j) {
            let mut sel = Map::new();
            for s in &view_selections {
                sel.insert(s.selection.id.clone(), selection_def(s));
                for app in &s.applications {
                    if matches!(app.kind, ApplicationKind::PanZoom { .. }) {
                        sites.push(site(app, format!("{at}/selection/{}/bind", s.selection.id)));
                    }
                }
            }
            for w in &view_widgets {
                sel.insert(w.id.clone(), widget_def(w));
            }
            if !sel.is_empty() {
                unit.insert("selection".into(), Value::Object(sel));
            }
        }

        if mark.dataset.is_some() && !filters.is_empty() {
            let mut transforms = Vec::new();
            for (k, app) in filters.iter().enumerate() {
                transforms.push(json!({ "filter": { "selection": app.selection } }));
                sites.push(site(app, format!("{at}/transform/{k}")));
            }
            unit.insert("transform".into(), Value::Array(transforms));
        }
        units.push(Value::Object(unit));
    }

    let mut spec = Map::new();
    spec.insert("width".into(), json!(view.width));
    spec.insert("height".into(), json!(view.height));
    if layered {
        spec.insert("layer".into(), Value::Array(units));
    } else {
        let Some(Value::Object(unit)) = units.pop() else {
            unreachable!("one mark")
        };
        spec.extend(unit);
    }
    Ok(Value::Object(spec))
}

fn site(app: &Application, pointer: String) -> ApplicationSite {
    ApplicationSite {
        application: app.id.clone(),
        pointer,
    }
}

/// View whose first data-backed unit hosts a widget's selection: the first
/// view drawing the widget's dataset, else the first view with any data.
pub(super) fn widget_host<'a>(chart: &'a ChartSpec, w: &QueryWidget) -> Option<&'a str> {
    chart
        .views
        .iter()
        .find(|v| v.datasets().contains(&w.field.dataset.as_str()))
        .or_else(|| chart.views.iter().find(|v| !v.datasets().is_empty()))
        .map(|v| v.id.as_str())
}

fn mark_type(view: &ViewDef, mark: &MarkDef) -> &'static str {
    match mark.mark_type {
        MarkType::Symbol => "point",
        MarkType::Rect if common::has_discrete_axis(view, mark) => "bar",
        MarkType::Rect | MarkType::Group => "rect",
        MarkType::Line => "line",
        MarkType::Area => "area",
        MarkType::Text => "text",
        MarkType::Rule => "rule",
    }
}

fn encoding(
    chart: &ChartSpec,
    defs: &[InteractionDef],
    view: &ViewDef,
    mark: &MarkDef,
    at: &str,
    sites: &mut Vec<ApplicationSite>,
) -> Map<String, Value> {
    let mut out = Map::new();
    for (channel, enc) in &mark.encodings {
        let def = match enc {
            Encoding::Scaled { scale, field } => {
                let sc = view.scale(scale).expect("resolved scale");
                let mut def = Map::new();
                match sc.aggregate {
                    Some(op) => {
                        def.insert("aggregate".into(), json!(op.as_str()));
                        if let Some(f) = &sc.field {
                            def.insert("field".into(), json!(common::field_ref(f)));
                        }
                    }
                    None => {
                        def.insert(
                            "field".into(),
                            json!(common::scaled_field(sc, field).map(|f| common::field_ref(&f))),
                        );
                    }
                }
                let raw = field.clone().or_else(|| sc.field.clone());
                def.insert(
                    "type".into(),
                    json!(common::encoding_type(chart, sc, raw.as_deref()).as_str()),
                );
                if let Some((app, selection, axis)) = domain_source(chart, defs, &view.id, &sc.id) {
                    def.insert(
                        "scale".into(),
                        json!({ "domain": { "selection": selection, "encoding": axis } }),
                    );
                    sites.push(site(app, format!("{at}/encoding/{channel}/scale/domain")));
                }
                def
            }
            Encoding::Constant { value } => {
                let mut def = Map::new();
                def.insert("value".into(), value.clone());
                def
            }
            Encoding::Field { field } => {
                let mt = mark
                    .dataset
                    .as_deref()
                    .and_then(|d| chart.measure_type(d, field))
                    .map_or("nominal", |t| t.as_str());
                let mut def = Map::new();
                def.insert("field".into(), json!(common::field_ref(field)));
                def.insert("type".into(), json!(mt));
                def
            }
        };
        out.insert(channel.as_str().to_string(), Value::Object(def));
    }

    for channel in [Channel::Color, Channel::Opacity, Channel::Size] {
        let apps = common::conditionals(defs, &mark.id, channel);
        if apps.is_empty() {
            continue;
        }
        let mut conditions = Vec::new();
        for app in &apps {
            let ApplicationKind::ConditionalEncoding {
                selected_value,
                default_value,
                ..
            } = &app.kind
            else {
                unreachable!("filtered to conditional encodings")
            };
            conditions
                .push(json!({ "selection": { "not": app.selection }, "value": default_value }));
            if let Some(v) = selected_value {
                conditions.push(json!({ "selection": app.selection, "value": v }));
            }
            sites.push(site(app, format!("{at}/encoding/{channel}/condition")));
        }
        let condition = if conditions.len() == 1 {
            conditions.pop().expect("one condition")
        } else {
            Value::Array(conditions)
        };
        let key = channel.as_str().to_string();
        let mut def = match out.remove(&key) {
            Some(Value::Object(def)) => def,
            _ => {
                let mut def = Map::new();
                def.insert("value".into(), common::channel_fallback(channel));
                def
            }
        };
        def.insert("condition".into(), condition);
        out.insert(key, Value::Object(def));
    }
    out
}

/// The scale-domain application feeding `view.scale`, with its selection and
/// the brushed encoding whose extent becomes the domain.
fn domain_source<'a>(
    chart: &ChartSpec,
    defs: &'a [InteractionDef],
    view: &str,
    scale: &str,
) -> Option<(&'a Application, &'a str, &'static str)> {
    for s in common::selections(defs) {
        for app in &s.applications {
            let ApplicationKind::ScaleDomain { scale: r } = &app.kind else {
                continue;
            };
            if r.view != view || r.scale != scale {
                continue;
            }
            let target = chart.view(view)?.scale(scale)?;
            let source = chart.view(&s.selection.source_view)?;
            let axis = s.selection.projected_axes().iter().find(|a| {
                source
                    .scale_for(a.channel())
                    .is_some_and(|sc| sc.field == target.field)
            })?;
            return Some((app, &s.selection.id, axis.as_str()));
        }
    }
    None
}

fn selection_def(s: &SelectionInteraction) -> Value {
    let sel = &s.selection;
    let mut def = Map::new();
    match &sel.kind {
        SelectionKind::Interval { encodings } => {
            def.insert("type".into(), json!("interval"));
            def.insert(
                "encodings".into(),
                Value::Array(encodings.iter().map(|a| json!(a.as_str())).collect()),
            );
            if s.applications
                .iter()
                .any(|a| matches!(a.kind, ApplicationKind::PanZoom { .. }))
            {
                def.insert("bind".into(), json!("scales"));
            }
        }
        SelectionKind::Point {
            cardinality,
            fields,
        } => {
            match cardinality {
                Cardinality::Single => {
                    def.insert("type".into(), json!("single"));
                }
                Cardinality::Multi => {
                    def.insert("type".into(), json!("multi"));
                    def.insert("toggle".into(), json!("true"));
                }
            }
            if !fields.is_empty() {
                def.insert(
                    "fields".into(),
                    json!(fields
                        .iter()
                        .map(|f| common::field_ref(f))
                        .collect::<Vec<_>>()),
                );
            }
            if sel.event_source == EventSource::Hover {
                def.insert("on".into(), json!("mouseover"));
                def.insert("clear".into(), json!("mouseout"));
            }
        }
    }
    Value::Object(def)
}

fn widget_def(w: &QueryWidget) -> Value {
    let mut bind = Map::new();
    let input = match w.widget_kind {
        WidgetKind::Radio => "radio",
        WidgetKind::Select => "select",
        WidgetKind::Range => "range",
        WidgetKind::Text => "text",
    };
    bind.insert("input".into(), json!(input));
    match &w.domain {
        Some(WidgetDomain::Options { options }) => {
            bind.insert("options".into(), json!(options));
        }
        Some(WidgetDomain::Extent { min, max, step }) => {
            bind.insert("min".into(), json!(min));
            bind.insert("max".into(), json!(max));
            bind.insert("step".into(), json!(step));
        }
        None => {}
    }
    bind.insert("name".into(), json!(format!("{} ", w.field.field)));
    json!({
        "type": "single",
        "fields": [common::field_ref(&w.field.field)],
        "bind": Value::Object(bind),
    })
}
