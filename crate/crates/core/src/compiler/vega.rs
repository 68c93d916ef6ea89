//! Vega lowering.
//!
//! Views become group marks stacked vertically at fixed offsets. Scales,
//! data and signals live at the top level so any view can read any
//! selection; pointer positions are computed from top-level coordinates
//! minus the view offset.

use std::collections::HashMap;

use serde_json::{json, Map, Value};

use super::common::{self, Namer, Output};
use super::{ApplicationSite, ClusterKind, CompileError, SignalCluster, VEGA_SCHEMA_URL};
use crate::chart::{
    profile_view, Channel, ChartSpec, Encoding, MarkDef, MarkType, MeasureType, ScaleDef, ViewDef,
};
use crate::interaction::{
    enumerate_signals, Application, ApplicationKind, Axis, BindProperty, Cardinality, Comparator,
    EventSource, InteractionDef, QueryWidget, Selection, SelectionInteraction, SelectionKind,
    SignalDescriptor, SignalRole, SignalSpace, WidgetDomain, WidgetKind,
};

const BAND_PADDING_INNER: f64 = 0.1;
const BAND_PADDING_OUTER: f64 = 0.05;

pub(super) fn compile(chart: &ChartSpec, defs: &[InteractionDef]) -> Result<Output, CompileError> {
    let mut ctx = Ctx::new(chart, defs)?;
    ctx.lower_signals()?;
    let data = ctx.data();
    let scales = ctx.scales();
    let marks = ctx.marks();

    let width = chart.views.iter().map(|v| v.width).max().unwrap_or(0);
    let height = ctx.offsets.values().copied().max().unwrap_or(0)
        + chart.views.last().map_or(0, |v| v.height);
    let mut doc = Map::new();
    doc.insert("$schema".into(), json!(VEGA_SCHEMA_URL));
    doc.insert("autosize".into(), json!("pad"));
    doc.insert("padding".into(), json!(5));
    doc.insert("width".into(), json!(width));
    doc.insert("height".into(), json!(height));
    doc.insert("data".into(), Value::Array(data));
    if !ctx.signals.is_empty() {
        doc.insert(
            "signals".into(),
            Value::Array(std::mem::take(&mut ctx.signals)),
        );
    }
    doc.insert("scales".into(), Value::Array(scales));
    doc.insert("marks".into(), Value::Array(marks));
    Ok(Output {
        document: Value::Object(doc),
        clusters: ctx.clusters,
        sites: ctx.sites,
    })
}

/// Emits the signal definitions for one selection, exactly one per
/// descriptor from [`enumerate_signals`].
pub fn lower_selection(
    selection: &Selection,
    chart: &ChartSpec,
) -> Result<Vec<Value>, CompileError> {
    let def = InteractionDef::Selection(SelectionInteraction {
        selection: selection.clone(),
        applications: Vec::new(),
        bindings: Vec::new(),
    });
    let defs = [def];
    let mut ctx = Ctx::new(chart, &defs)?;
    ctx.lower_signals()?;
    Ok(ctx.signals)
}

/// What predicates need to know about a lowered selection.
struct SelInfo {
    selection: Selection,
    pan_zoom: bool,
    /// Per projected axis: pixel start/end, data start/end, field, temporal.
    extents: Vec<Extent>,
    /// Datum value signals: field, signal, temporal.
    values: Vec<(String, String, bool)>,
    /// Fields identifying a selected datum.
    tested: Vec<String>,
    store: Option<String>,
}

struct Extent {
    axis: Axis,
    px: (String, String),
    data: (String, String),
    field: String,
    scale: String,
    /// Band scales are tested in pixel space against band centres.
    discrete: bool,
}

struct Ctx<'a> {
    chart: &'a ChartSpec,
    defs: &'a [InteractionDef],
    offsets: HashMap<String, u32>,
    scale_names: HashMap<(String, String), String>,
    base_scale_names: HashMap<(String, String), String>,
    data_names: HashMap<(String, String), String>,
    group_names: HashMap<String, String>,
    mark_names: HashMap<String, String>,
    sels: HashMap<String, SelInfo>,
    /// Domain signal expression per pan/zoom-driven scale.
    zoomed: HashMap<(String, String), String>,
    signals: Vec<Value>,
    signal_names: Namer,
    clusters: Vec<SignalCluster>,
    sites: Vec<ApplicationSite>,
}

impl<'a> Ctx<'a> {
    fn new(chart: &'a ChartSpec, defs: &'a [InteractionDef]) -> Result<Self, CompileError> {
        let offsets = common::view_offsets(chart).into_iter().collect();
        let mut data_namer = Namer::default();
        for table in &chart.datasets {
            data_namer.claim(&table.id);
        }
        let mut data_names = HashMap::new();
        for view in &chart.views {
            for ds in view.datasets() {
                let name = data_namer.claim(&format!("{}_{}", view.id, ds));
                data_names.insert((view.id.clone(), ds.to_string()), name);
            }
        }
        let mut sels = HashMap::new();
        for s in common::selections(defs) {
            let store = match &s.selection.kind {
                SelectionKind::Point {
                    cardinality: Cardinality::Multi,
                    ..
                } => Some(data_namer.claim(&format!("{}_store", s.selection.id))),
                _ => None,
            };
            let pan_zoom = s
                .applications
                .iter()
                .any(|a| matches!(a.kind, ApplicationKind::PanZoom { .. }));
            sels.insert(
                s.selection.id.clone(),
                selection_info(chart, s, store, pan_zoom)?,
            );
        }

        let mut scale_namer = Namer::default();
        let mut scale_names = HashMap::new();
        for view in &chart.views {
            for sc in &view.scales {
                let name = scale_namer.claim(&format!("{}_{}", view.id, sc.id));
                scale_names.insert((view.id.clone(), sc.id.clone()), name);
            }
        }
        let mut base_scale_names = HashMap::new();
        for app in common::applications(defs) {
            let refs = match &app.kind {
                ApplicationKind::PanZoom { scales } => scales.clone(),
                ApplicationKind::ScaleDomain { scale } => vec![scale.clone()],
                _ => continue,
            };
            for r in refs {
                let key = (r.view.clone(), r.scale.clone());
                let base = format!("{}_base", scale_names[&key]);
                base_scale_names
                    .entry(key)
                    .or_insert_with(|| scale_namer.claim(&base));
            }
        }

        let mut mark_namer = Namer::default();
        let mut group_names = HashMap::new();
        let mut mark_names = HashMap::new();
        for view in &chart.views {
            group_names.insert(
                view.id.clone(),
                mark_namer.claim(&format!("view_{}", view.id)),
            );
        }
        for view in &chart.views {
            for m in &view.marks {
                mark_names.insert(m.id.clone(), mark_namer.claim(&format!("mark_{}", m.id)));
            }
        }
        for s in common::selections(defs) {
            if s.selection.is_interval() {
                mark_namer.claim(&format!("brush_{}", s.selection.id));
            }
        }

        Ok(Ctx {
            chart,
            defs,
            offsets,
            scale_names,
            base_scale_names,
            data_names,
            group_names,
            mark_names,
            sels,
            zoomed: HashMap::new(),
            signals: Vec::new(),
            signal_names: Namer::default(),
            clusters: Vec::new(),
            sites: Vec::new(),
        })
    }

    fn view(&self, id: &str) -> &'a ViewDef {
        self.chart.view(id).expect("validated view")
    }

    fn scale_name(&self, view: &str, scale: &str) -> &str {
        &self.scale_names[&(view.to_string(), scale.to_string())]
    }

    /// Event filter matching pointer positions inside a view.
    fn region(&self, view: &ViewDef) -> String {
        let oy = self.offsets[&view.id];
        format!(
            "inrange(x(), [0, {}]) && inrange(y(), [{}, {}])",
            view.width,
            oy,
            oy + view.height
        )
    }

    fn pixel(&self, view: &ViewDef, axis: Axis) -> String {
        match axis {
            Axis::X => format!("clamp(x(), 0, {})", view.width),
            Axis::Y => format!(
                "clamp(y() - {}, 0, {})",
                self.offsets[&view.id], view.height
            ),
        }
    }

    fn down_stream(&self, view: &ViewDef) -> Value {
        json!({ "source": "view", "type": "mousedown", "filter": [self.region(view)] })
    }

    fn drag_stream(&self, view: &ViewDef) -> Value {
        json!({
            "source": "window",
            "type": "mousemove",
            "consume": true,
            "between": [self.down_stream(view), { "source": "window", "type": "mouseup" }]
        })
    }

    fn lower_signals(&mut self) -> Result<(), CompileError> {
        let defs = self.defs;
        for s in common::selections(defs) {
            let defs_out = self.selection_signals(s)?;
            let mut names = Vec::new();
            for d in &defs_out {
                let name = d["name"].as_str().expect("named signal").to_string();
                if self.signal_names.claim(&name) != name {
                    return Err(CompileError::Internal(format!(
                        "signal name `{name}` is produced twice"
                    )));
                }
                names.push(name);
            }
            self.signals.extend(defs_out);
            self.clusters.push(SignalCluster {
                owner: s.selection.id.clone(),
                kind: ClusterKind::Selection,
                signals: names,
            });
        }
        for w in common::widgets(defs) {
            let defs_out = self.widget_signals(w);
            let names = defs_out
                .iter()
                .map(|d| d["name"].as_str().unwrap().to_string())
                .collect();
            self.signals.extend(defs_out);
            self.clusters.push(SignalCluster {
                owner: w.id.clone(),
                kind: ClusterKind::Widget,
                signals: names,
            });
        }
        for s in common::selections(defs) {
            for app in &s.applications {
                if let ApplicationKind::PanZoom { scales } = &app.kind {
                    let defs_out = self.pan_zoom_signals(app, scales);
                    let names = defs_out
                        .iter()
                        .map(|d| d["name"].as_str().unwrap().to_string())
                        .collect();
                    self.signals.extend(defs_out);
                    self.clusters.push(SignalCluster {
                        owner: app.id.clone(),
                        kind: ClusterKind::Application,
                        signals: names,
                    });
                }
            }
        }
        Ok(())
    }

    fn selection_signals(&self, s: &SelectionInteraction) -> Result<Vec<Value>, CompileError> {
        let sel = &s.selection;
        let view = self.view(&sel.source_view);
        let info = &self.sels[&sel.id];
        let mut out = Vec::new();
        for d in enumerate_signals(sel, self.chart) {
            let def = match (d.space, d.role) {
                (SignalSpace::Pixel, SignalRole::Start | SignalRole::End) => {
                    let axis = d.axis.expect("extent signals carry an axis");
                    if info.pan_zoom {
                        let value = match (d.role, axis) {
                            (SignalRole::Start, _) => 0,
                            (_, Axis::X) => view.width,
                            (_, Axis::Y) => view.height,
                        };
                        json!({ "name": d.name, "value": value })
                    } else {
                        let px = self.pixel(view, axis);
                        let mut on =
                            vec![json!({ "events": self.down_stream(view), "update": px })];
                        if d.role == SignalRole::End {
                            on.push(json!({ "events": self.drag_stream(view), "update": px }));
                        }
                        json!({ "name": d.name, "value": 0, "on": on })
                    }
                }
                (SignalSpace::Data, SignalRole::Start | SignalRole::End) => {
                    let ext = info
                        .extents
                        .iter()
                        .find(|e| e.data.0 == d.name || e.data.1 == d.name)
                        .expect("data extent");
                    let px = if d.role == SignalRole::Start {
                        &ext.px.0
                    } else {
                        &ext.px.1
                    };
                    let scale = view.scale_for(ext.axis.channel()).expect("brushed scale");
                    json!({ "name": d.name, "update": self.invert_expr(view, scale, px) })
                }
                (SignalSpace::Data, SignalRole::Value) => self.value_signal(view, sel, &d),
                (SignalSpace::Pixel, SignalRole::MouseX | SignalRole::MouseY) => {
                    let axis = d.axis.expect("mouse signals carry an axis");
                    json!({
                        "name": d.name,
                        "value": 0,
                        "on": [{
                            "events": { "source": "view", "type": "mousemove", "filter": [self.region(view)] },
                            "update": self.pixel(view, axis)
                        }]
                    })
                }
                (SignalSpace::Data, SignalRole::MouseX | SignalRole::MouseY) => {
                    let axis = d.axis.expect("mouse signals carry an axis");
                    let px = enumerate_signals(sel, self.chart)
                        .into_iter()
                        .find(|p| p.space == SignalSpace::Pixel && p.role == d.role)
                        .map(|p| p.name)
                        .expect("pixel mouse signal");
                    let scale = view
                        .scale_for(axis.channel())
                        .expect("mouse data signals need a scale");
                    json!({ "name": d.name, "update": self.invert_expr(view, scale, &px) })
                }
                (space, role) => {
                    return Err(CompileError::Internal(format!(
                        "no lowering for {space:?} signal with role {role:?}"
                    )))
                }
            };
            out.push(def);
        }
        Ok(out)
    }

    /// Data value under a pixel, mapping discrete scales to the covering band.
    fn invert_expr(&self, view: &ViewDef, scale: &ScaleDef, px: &str) -> String {
        let name = quote(self.scale_name(&view.id, &scale.id));
        if scale.is_continuous() {
            return format!("invert({name}, {px})");
        }
        let extent = scale.range_extent.unwrap_or(view.width);
        let n = format!("length(domain({name}))");
        format!(
            "domain({name})[clamp(floor({px} / ({extent} / bandspace({n}, {BAND_PADDING_INNER}, {BAND_PADDING_OUTER})) - {BAND_PADDING_OUTER}), 0, {n} - 1)]"
        )
    }

    fn selectable_marks(&self, view: &'a ViewDef) -> Vec<&'a MarkDef> {
        view.marks.iter().filter(|m| m.dataset.is_some()).collect()
    }

    fn value_signal(&self, view: &'a ViewDef, sel: &Selection, d: &SignalDescriptor) -> Value {
        let field = d.field.as_deref().expect("value signals carry a field");
        let marks = self.selectable_marks(view);
        let mut on = Vec::new();
        let (enter, leave) = match sel.event_source {
            EventSource::Hover => ("mouseover", "mouseout"),
            _ => ("click", "click"),
        };
        if sel.event_source == EventSource::Hover {
            for m in &marks {
                on.push(json!({ "events": { "markname": self.mark_names[&m.id], "type": leave }, "update": "null" }));
            }
        } else {
            let names: Vec<String> = marks
                .iter()
                .map(|m| quote(&self.mark_names[&m.id]))
                .collect();
            on.push(json!({
                "events": {
                    "source": "view",
                    "type": leave,
                    "filter": [
                        self.region(view),
                        format!("indexof([{}], item().mark ? item().mark.name : '') < 0", names.join(", "))
                    ]
                },
                "update": "null"
            }));
        }
        for m in &marks {
            on.push(json!({
                "events": { "markname": self.mark_names[&m.id], "type": enter },
                "update": access("datum", field),
                "force": true
            }));
        }
        json!({ "name": d.name, "value": null, "on": on })
    }

    fn widget_signals(&mut self, w: &QueryWidget) -> Vec<Value> {
        let mut bind = Map::new();
        let input = match w.widget_kind {
            WidgetKind::Radio => "radio",
            WidgetKind::Select => "select",
            WidgetKind::Range => "range",
            WidgetKind::Text => "text",
        };
        bind.insert("input".into(), json!(input));
        let mut extent = None;
        match &w.domain {
            Some(WidgetDomain::Options { options }) => {
                bind.insert("options".into(), json!(options));
            }
            Some(WidgetDomain::Extent { min, max, step }) => {
                bind.insert("min".into(), json!(min));
                bind.insert("max".into(), json!(max));
                bind.insert("step".into(), json!(step));
                extent = Some((*min, *max));
            }
            None => {
                if matches!(w.widget_kind, WidgetKind::Radio | WidgetKind::Select) {
                    bind.insert(
                        "options".into(),
                        json!(common::widget_options(self.chart, w)),
                    );
                }
            }
        }
        if w.comparator == Comparator::Between {
            let lo = self.signal_names.claim(&format!("{}_min", w.id));
            let hi = self.signal_names.claim(&format!("{}_max", w.id));
            let mut lo_bind = bind.clone();
            lo_bind.insert("name".into(), json!(format!("{} min ", w.field.field)));
            let mut hi_bind = bind;
            hi_bind.insert("name".into(), json!(format!("{} max ", w.field.field)));
            vec![
                json!({ "name": lo, "value": extent.map(|e| e.0), "bind": Value::Object(lo_bind) }),
                json!({ "name": hi, "value": extent.map(|e| e.1), "bind": Value::Object(hi_bind) }),
            ]
        } else {
            let name = self.signal_names.claim(&w.id);
            bind.insert(
                "name".into(),
                json!(format!("{} {} ", w.field.field, w.comparator.symbol())),
            );
            let initial = if w.widget_kind == WidgetKind::Text {
                json!("")
            } else {
                Value::Null
            };
            vec![json!({ "name": name, "value": initial, "bind": Value::Object(bind) })]
        }
    }

    fn pan_zoom_signals(
        &mut self,
        app: &Application,
        scales: &[crate::interaction::ScaleRef],
    ) -> Vec<Value> {
        let Some(first) = scales.first() else {
            return Vec::new();
        };
        let view = self.view(&first.view);
        let p = &app.id;
        let down = self.signal_names.claim(&format!("{p}_down"));
        let delta = self.signal_names.claim(&format!("{p}_delta"));
        let zoom = self.signal_names.claim(&format!("{p}_zoom"));
        let region = self.region(view);
        let mut out = vec![
            json!({
                "name": down,
                "value": null,
                "on": [
                    { "events": self.down_stream(view), "update": "xy()" },
                    { "events": { "source": "window", "type": "mouseup" }, "update": "null" }
                ]
            }),
            json!({
                "name": delta,
                "value": [0, 0],
                "on": [{
                    "events": self.drag_stream(view),
                    "update": format!("{down} ? [x() - {down}[0], y() - {down}[1]] : [0, 0]")
                }]
            }),
            json!({
                "name": zoom,
                "value": 1,
                "on": [{
                    "events": { "source": "view", "type": "wheel", "consume": true, "filter": [region.clone()] },
                    "force": true,
                    "update": "pow(1.001, event.deltaY * pow(16, event.deltaMode))"
                }]
            }),
        ];
        for r in scales {
            let Some(scale) = view.scale(&r.scale) else {
                continue;
            };
            let key = (r.view.clone(), r.scale.clone());
            let sname = self.scale_names[&key].clone();
            let base = self.base_scale_names[&key].clone();
            let axis = if scale.channel == Channel::X {
                Axis::X
            } else {
                Axis::Y
            };
            let extent = scale.range_extent.unwrap_or(view.width);
            let anchor = self.signal_names.claim(&format!("{p}_{}_anchor", r.scale));
            let cur = self.signal_names.claim(&format!("{p}_{}_cur", r.scale));
            let dom = self.signal_names.claim(&format!("{p}_{}_domain", r.scale));
            let (d, sign) = match axis {
                Axis::X => (format!("{delta}[0]"), "-"),
                Axis::Y => (format!("{delta}[1]"), "+"),
            };
            out.push(json!({
                "name": anchor,
                "value": 0,
                "on": [{
                    "events": { "source": "view", "type": "wheel", "filter": [region.clone()] },
                    "update": format!("+invert({}, {})", quote(&sname), self.pixel(view, axis))
                }]
            }));
            out.push(json!({
                "name": cur,
                "value": null,
                "on": [{ "events": self.down_stream(view), "update": format!("slice({dom})") }]
            }));
            out.push(json!({
                "name": dom,
                "update": format!("[+domain({b})[0], +domain({b})[1]]", b = quote(&base)),
                "on": [
                    {
                        "events": { "signal": delta },
                        "update": format!(
                            "{cur} ? [{cur}[0] {sign} span({cur}) * {d} / {extent}, {cur}[1] {sign} span({cur}) * {d} / {extent}] : {dom}"
                        )
                    },
                    {
                        "events": { "signal": zoom },
                        "update": format!(
                            "[{anchor} + ({dom}[0] - {anchor}) * {zoom}, {anchor} + ({dom}[1] - {anchor}) * {zoom}]"
                        )
                    }
                ]
            }));
            self.zoomed.insert(key, dom);
        }
        out
    }

    /// Expression that is true when a datum passes the selection or widget.
    /// `available` lists the fields present on the datum being tested.
    fn predicate(&self, owner: &str, available: &[String]) -> String {
        if let Some(info) = self.sels.get(owner) {
            return self.selection_predicate(info, available);
        }
        if let Some(w) = common::widgets(self.defs).find(|w| w.id == owner) {
            return self.widget_predicate(w);
        }
        "true".to_string()
    }

    fn selection_predicate(&self, info: &SelInfo, available: &[String]) -> String {
        if info.selection.is_interval() {
            let empty: Vec<String> = info
                .extents
                .iter()
                .map(|e| format!("{} === {}", e.px.0, e.px.1))
                .collect();
            let tests: Vec<String> = info
                .extents
                .iter()
                .filter(|e| available.contains(&e.field))
                .map(|e| {
                    if e.discrete {
                        let scale = quote(self.scale_name(&info.selection.source_view, &e.scale));
                        format!(
                            "inrange(scale({scale}, {}) + bandwidth({scale}) / 2, [{}, {}])",
                            access("datum", &e.field),
                            e.px.0,
                            e.px.1
                        )
                    } else {
                        format!(
                            "inrange({}, [{}, {}])",
                            access("datum", &e.field),
                            e.data.0,
                            e.data.1
                        )
                    }
                })
                .collect();
            if tests.is_empty() {
                return "true".to_string();
            }
            return format!("({}) || ({})", empty.join(" || "), tests.join(" && "));
        }

        let tested: Vec<&(String, String, bool)> = info
            .values
            .iter()
            .filter(|(f, _, _)| info.tested.contains(f) && available.contains(f))
            .collect();
        if tested.is_empty() {
            return "true".to_string();
        }
        match &info.store {
            None => {
                let empty: Vec<String> = tested
                    .iter()
                    .map(|(_, s, _)| format!("{s} === null"))
                    .collect();
                let eq: Vec<String> = tested
                    .iter()
                    .map(|(f, s, t)| {
                        format!(
                            "{} === {}",
                            key_part(&access("datum", f), *t),
                            key_part(s, *t)
                        )
                    })
                    .collect();
                format!("({}) || ({})", empty.join(" && "), eq.join(" && "))
            }
            Some(store) => {
                let store_q = quote(store);
                let test = if tested.len() == info.tested.len() {
                    let parts: Vec<String> = tested
                        .iter()
                        .map(|(f, _, t)| key_part(&access("datum", f), *t))
                        .collect();
                    format!("indata({store_q}, '_key', {})", parts.join(" + '|' + "))
                } else {
                    let ands: Vec<String> = tested
                        .iter()
                        .map(|(f, _, t)| {
                            let k = info
                                .tested
                                .iter()
                                .position(|x| x == f)
                                .expect("tested field");
                            format!(
                                "indata({store_q}, '_k{k}', {})",
                                key_part(&access("datum", f), *t)
                            )
                        })
                        .collect();
                    ands.join(" && ")
                };
                format!("length(data({store_q})) === 0 || {test}")
            }
        }
    }

    fn widget_predicate(&self, w: &QueryWidget) -> String {
        let temporal = self.chart.measure_type(&w.field.dataset, &w.field.field)
            == Some(MeasureType::Temporal);
        let v = access("datum", &w.field.field);
        let v = if temporal { format!("time({v})") } else { v };
        let names = self
            .clusters
            .iter()
            .find(|c| c.kind == ClusterKind::Widget && c.owner == w.id)
            .map(|c| c.signals.clone())
            .unwrap_or_default();
        if w.comparator == Comparator::Between {
            let (lo, hi) = (&names[0], &names[1]);
            return format!("{lo} === null || {hi} === null || inrange({v}, [{lo}, {hi}])");
        }
        let s = &names[0];
        let op = match w.comparator {
            Comparator::Eq => "==",
            Comparator::Ne => "!=",
            other => other.symbol(),
        };
        let unset = if w.widget_kind == WidgetKind::Text {
            format!("{s} === ''")
        } else {
            format!("{s} === null")
        };
        format!("{unset} || {v} {op} {s}")
    }

    fn data(&mut self) -> Vec<Value> {
        let mut out = Vec::new();
        for table in &self.chart.datasets {
            let mut d = Map::new();
            d.insert("name".into(), json!(table.id));
            d.insert(
                "values".into(),
                Value::Array(table.rows.iter().cloned().map(Value::Object).collect()),
            );
            let parse: Map<String, Value> = table
                .fields
                .iter()
                .filter(|f| f.measure_type == MeasureType::Temporal)
                .map(|f| (f.name.clone(), json!("date")))
                .collect();
            if !parse.is_empty() {
                d.insert("format".into(), json!({ "type": "json", "parse": parse }));
            }
            out.push(Value::Object(d));
        }

        for view in &self.chart.views {
            let filters = common::filters_on(self.defs, &view.id);
            for ds in view.datasets() {
                let index = out.len();
                let fields: Vec<String> = self
                    .chart
                    .dataset(ds)
                    .map(|t| t.fields.iter().map(|f| f.name.clone()).collect())
                    .unwrap_or_default();
                let mut transforms = Vec::new();
                let valid = valid_fields(view, ds);
                if !valid.is_empty() {
                    let tests: Vec<String> = valid
                        .iter()
                        .map(|f| {
                            let v = access("datum", f);
                            format!("isValid({v}) && isFinite(+{v})")
                        })
                        .collect();
                    transforms.push(json!({ "type": "filter", "expr": tests.join(" && ") }));
                }
                for app in &filters {
                    let pointer = format!("/data/{index}/transform/{}", transforms.len());
                    transforms.push(json!({ "type": "filter", "expr": self.predicate(&app.selection, &fields) }));
                    self.sites.push(ApplicationSite {
                        application: app.id.clone(),
                        pointer,
                    });
                }
                if let Some(agg) = aggregate_transform(self.chart, view, ds) {
                    transforms.push(agg);
                }
                if let Some(x) = line_sort_field(view, ds) {
                    transforms.push(
                        json!({ "type": "collect", "sort": { "field": common::field_ref(&x) } }),
                    );
                }
                let mut d = Map::new();
                d.insert(
                    "name".into(),
                    json!(self.data_names[&(view.id.clone(), ds.to_string())]),
                );
                d.insert("source".into(), json!(ds));
                if !transforms.is_empty() {
                    d.insert("transform".into(), Value::Array(transforms));
                }
                out.push(Value::Object(d));
            }
        }

        for s in common::selections(self.defs) {
            let info = &self.sels[&s.selection.id];
            let Some(store) = &info.store else {
                continue;
            };
            let tested: Vec<&(String, String, bool)> = info
                .values
                .iter()
                .filter(|(f, _, _)| info.tested.contains(f))
                .collect();
            let all: Vec<&str> = info.values.iter().map(|(_, s, _)| s.as_str()).collect();
            let any_valid = all
                .iter()
                .map(|s| format!("isValid({s})"))
                .collect::<Vec<_>>()
                .join(" || ");
            let key = tested
                .iter()
                .map(|(_, s, t)| key_part(s, *t))
                .collect::<Vec<_>>()
                .join(" + '|' + ");
            let mut members = vec![format!("_key: {key}")];
            for (k, (_, s, t)) in tested.iter().enumerate() {
                members.push(format!("_k{k}: {}", key_part(s, *t)));
            }
            out.push(json!({
                "name": store,
                "values": [],
                "on": [
                    { "trigger": any_valid, "toggle": format!("{{{}}}", members.join(", ")) },
                    { "trigger": format!("!({any_valid})"), "remove": true }
                ]
            }));
        }
        out
    }

    fn scales(&mut self) -> Vec<Value> {
        let mut out = Vec::new();
        let domain_apps: Vec<(&Application, &SelectionInteraction)> = common::selections(self.defs)
            .flat_map(|s| s.applications.iter().map(move |a| (a, s)))
            .filter(|(a, _)| matches!(a.kind, ApplicationKind::ScaleDomain { .. }))
            .collect();
        for view in &self.chart.views {
            for sc in &view.scales {
                let key = (view.id.clone(), sc.id.clone());
                let name = self.scale_names[&key].clone();
                let mut def = self.scale_def(view, sc, &name);
                if let Some(base) = self.base_scale_names.get(&key).cloned() {
                    let mut base_def = self.scale_def(view, sc, &base);
                    base_def.remove("nice");
                    out.push(Value::Object(base_def));
                    let pointer = format!("/scales/{}/domain", out.len());
                    if let Some(sig) = self.zoomed.get(&key) {
                        def.insert("domain".into(), json!({ "signal": sig }));
                        def.remove("nice");
                        let owner = common::applications(self.defs).find(|a| {
                            matches!(&a.kind, ApplicationKind::PanZoom { scales }
                                if scales.first().is_some_and(|r| r.view == key.0 && r.scale == key.1))
                        });
                        if let Some(app) = owner {
                            self.sites.push(ApplicationSite {
                                application: app.id.clone(),
                                pointer: pointer.clone(),
                            });
                        }
                    }
                    if let Some((app, s)) = domain_apps.iter().find(|(a, _)| {
                        matches!(&a.kind, ApplicationKind::ScaleDomain { scale } if scale.view == key.0 && scale.scale == key.1)
                    }) {
                        if let Some(expr) = self.brushed_domain(s, sc, &base) {
                            def.insert("domain".into(), json!({ "signal": expr }));
                            def.remove("nice");
                            self.sites.push(ApplicationSite {
                                application: app.id.clone(),
                                pointer,
                            });
                        }
                    }
                }
                out.push(Value::Object(def));
            }
        }
        out
    }

    fn brushed_domain(
        &self,
        s: &SelectionInteraction,
        target: &ScaleDef,
        base: &str,
    ) -> Option<String> {
        let info = &self.sels[&s.selection.id];
        let ext = info
            .extents
            .iter()
            .find(|e| Some(&e.field) == target.field.as_ref())?;
        let base = quote(base);
        Some(format!(
            "{} === {} ? [+domain({base})[0], +domain({base})[1]] : [min({a}, {b}), max({a}, {b})]",
            ext.px.0,
            ext.px.1,
            a = ext.data.0,
            b = ext.data.1
        ))
    }

    fn scale_def(&self, view: &ViewDef, sc: &ScaleDef, name: &str) -> Map<String, Value> {
        let mut def = Map::new();
        def.insert("name".into(), json!(name));
        let (data, field) = match sc.aggregate {
            Some(_) => (
                self.data_names[&(view.id.clone(), sc.dataset.clone())].clone(),
                sc.output_field().unwrap_or_default(),
            ),
            None => (sc.dataset.clone(), sc.field.clone().unwrap_or_default()),
        };
        let extent = sc.range_extent.unwrap_or(match sc.channel {
            Channel::Y => view.height,
            _ => view.width,
        });
        if sc.is_continuous() {
            let temporal = common::is_temporal(self.chart, sc);
            def.insert(
                "type".into(),
                json!(if temporal { "utc" } else { "linear" }),
            );
            def.insert(
                "domain".into(),
                json!({ "data": data, "field": common::field_ref(&field) }),
            );
            match sc.channel {
                Channel::X => {
                    def.insert("range".into(), json!([0, extent]));
                }
                Channel::Y => {
                    def.insert("range".into(), json!([extent, 0]));
                }
                Channel::Color => {
                    def.insert("range".into(), json!({ "scheme": "blues" }));
                }
                Channel::Size => {
                    def.insert("range".into(), json!([16, 256]));
                }
                Channel::Opacity => {
                    def.insert("range".into(), json!([0.2, 1]));
                }
                _ => {}
            }
            if !temporal {
                def.insert("zero".into(), json!(sc.aggregate.is_some()));
            }
            def.insert("nice".into(), json!(true));
        } else {
            def.insert(
                "domain".into(),
                json!({ "data": data, "field": common::field_ref(&field), "sort": true }),
            );
            match sc.channel {
                Channel::X | Channel::Y => {
                    def.insert("type".into(), json!("band"));
                    def.insert("range".into(), json!([0, extent]));
                    def.insert("paddingInner".into(), json!(BAND_PADDING_INNER));
                    def.insert("paddingOuter".into(), json!(BAND_PADDING_OUTER));
                }
                Channel::Color => {
                    def.insert("type".into(), json!("ordinal"));
                    def.insert("range".into(), json!("category"));
                }
                Channel::Shape => {
                    def.insert("type".into(), json!("ordinal"));
                    def.insert("range".into(), json!("symbol"));
                }
                Channel::Size => {
                    def.insert("type".into(), json!("point"));
                    def.insert("range".into(), json!([16, 256]));
                }
                Channel::Opacity => {
                    def.insert("type".into(), json!("point"));
                    def.insert("range".into(), json!([0.3, 1]));
                }
                Channel::Text => {
                    def.insert("type".into(), json!("ordinal"));
                }
            }
        }
        def
    }

    fn marks(&mut self) -> Vec<Value> {
        let mut groups = Vec::new();
        for (g, view) in self.chart.views.iter().enumerate() {
            let mut marks = Vec::new();
            for (m, mark) in view.marks.iter().enumerate() {
                let series = series_fields(view, mark);
                if series.is_empty() {
                    marks.push(self.mark(view, mark, &format!("/marks/{g}/marks/{m}")));
                    continue;
                }
                let mut inner = self.mark(view, mark, &format!("/marks/{g}/marks/{m}/marks/0"));
                let facet = format!("{}_series", self.mark_names[&mark.id]);
                let source = inner["from"]["data"].clone();
                inner["from"] = json!({ "data": facet });
                marks.push(json!({
                    "type": "group",
                    "from": { "facet": { "name": facet, "data": source, "groupby": series.iter().map(|f| common::field_ref(f)).collect::<Vec<_>>() } },
                    "marks": [inner]
                }));
            }
            for s in common::selections(self.defs) {
                if s.selection.source_view != view.id
                    || !s.selection.is_interval()
                    || self.sels[&s.selection.id].pan_zoom
                {
                    continue;
                }
                marks.push(self.brush_mark(view, &s.selection));
            }
            let mut axes = Vec::new();
            for (channel, orient) in [(Channel::X, "bottom"), (Channel::Y, "left")] {
                if let Some(sc) = view.scale_for(channel) {
                    let title = sc.output_field().unwrap_or_default();
                    axes.push(json!({ "orient": orient, "scale": self.scale_name(&view.id, &sc.id), "title": title }));
                }
            }
            let mut group = Map::new();
            group.insert("type".into(), json!("group"));
            group.insert("name".into(), json!(self.group_names[&view.id]));
            group.insert(
                "encode".into(),
                json!({
                    "enter": {
                        "x": { "value": 0 },
                        "y": { "value": self.offsets[&view.id] },
                        "width": { "value": view.width },
                        "height": { "value": view.height }
                    }
                }),
            );
            if !axes.is_empty() {
                group.insert("axes".into(), Value::Array(axes));
            }
            group.insert("marks".into(), Value::Array(marks));
            groups.push(Value::Object(group));
        }
        groups
    }

    fn brush_mark(&self, view: &ViewDef, sel: &Selection) -> Value {
        let info = &self.sels[&sel.id];
        let mut update = Map::new();
        update.insert("x".into(), json!({ "value": 0 }));
        update.insert("x2".into(), json!({ "value": view.width }));
        update.insert("y".into(), json!({ "value": 0 }));
        update.insert("y2".into(), json!({ "value": view.height }));
        for e in &info.extents {
            let (a, b) = match e.axis {
                Axis::X => ("x", "x2"),
                Axis::Y => ("y", "y2"),
            };
            update.insert(a.into(), json!({ "signal": e.px.0 }));
            update.insert(b.into(), json!({ "signal": e.px.1 }));
        }
        update.insert("fill".into(), json!({ "value": "#333" }));
        update.insert("fillOpacity".into(), json!({ "value": 0.125 }));
        json!({
            "type": "rect",
            "name": format!("brush_{}", sel.id),
            "interactive": false,
            "encode": { "update": Value::Object(update) }
        })
    }

    fn mark(&mut self, view: &ViewDef, mark: &MarkDef, pointer: &str) -> Value {
        let vtype = match mark.mark_type {
            MarkType::Symbol => "symbol",
            MarkType::Rect | MarkType::Group => "rect",
            MarkType::Line => "line",
            MarkType::Area => "area",
            MarkType::Text => "text",
            MarkType::Rule => "rule",
        };
        let mut update = Map::new();
        let set = |update: &mut Map<String, Value>, k: &str, v: Value| {
            update.insert(k.to_string(), v);
        };

        let bindings: Vec<(BindProperty, String, SignalSpace, Option<String>)> =
            common::selections(self.defs)
                .flat_map(|s| s.bindings.iter().map(move |b| (s, b)))
                .filter(|(_, b)| b.mark == mark.id)
                .filter_map(|(s, b)| {
                    let d = enumerate_signals(&s.selection, self.chart)
                        .into_iter()
                        .find(|d| d.name == b.signal)?;
                    let temporal = d.field.as_deref().is_some_and(|f| {
                        let view = self.view(&s.selection.source_view);
                        view.datasets()
                            .iter()
                            .any(|ds| self.chart.measure_type(ds, f) == Some(MeasureType::Temporal))
                    });
                    Some((
                        b.property,
                        b.signal.clone(),
                        d.space,
                        temporal.then(|| "t".to_string()),
                    ))
                })
                .collect();
        let bound = |p: BindProperty| bindings.iter().any(|b| b.0 == p);

        // Geometry from encodings.
        let pos = |channel: Channel| -> Option<(Value, Option<&ScaleDef>)> {
            match mark.encodings.get(&channel)? {
                Encoding::Scaled { scale, field } => {
                    let sc = view.scale(scale)?;
                    let f = common::scaled_field(sc, field)?;
                    Some((
                        json!({ "scale": self.scale_name(&view.id, &sc.id), "field": common::field_ref(&f) }),
                        Some(sc),
                    ))
                }
                Encoding::Constant { value } => Some((json!({ "value": value }), None)),
                Encoding::Field { field } => {
                    Some((json!({ "field": common::field_ref(field) }), None))
                }
            }
        };
        let x = pos(Channel::X);
        let y = pos(Channel::Y);
        fn band<'s>(e: &Option<(Value, Option<&'s ScaleDef>)>) -> Option<&'s ScaleDef> {
            e.as_ref()
                .and_then(|(_, s)| *s)
                .filter(|s| !s.is_continuous())
        }
        let centered = |e: &Option<(Value, Option<&ScaleDef>)>| {
            e.as_ref().map(|(v, s)| {
                let mut v = v.clone();
                if s.is_some_and(|s| !s.is_continuous()) {
                    v["band"] = json!(0.5);
                }
                v
            })
        };
        match mark.mark_type {
            MarkType::Rect | MarkType::Group => {
                match (&x, band(&x)) {
                    (Some((v, _)), Some(sc)) => {
                        set(&mut update, "x", v.clone());
                        set(
                            &mut update,
                            "width",
                            json!({ "scale": self.scale_name(&view.id, &sc.id), "band": 1 }),
                        );
                    }
                    (Some((v, Some(sc))), None) if band(&y).is_some() => {
                        set(
                            &mut update,
                            "x",
                            json!({ "scale": self.scale_name(&view.id, &sc.id), "value": 0 }),
                        );
                        set(&mut update, "x2", v.clone());
                    }
                    (Some((v, _)), None) => {
                        set(&mut update, "xc", v.clone());
                        set(&mut update, "width", json!({ "value": 5 }));
                    }
                    (None, _) => {}
                }
                match (&y, band(&y)) {
                    (Some((v, _)), Some(sc)) => {
                        set(&mut update, "y", v.clone());
                        set(
                            &mut update,
                            "height",
                            json!({ "scale": self.scale_name(&view.id, &sc.id), "band": 1 }),
                        );
                    }
                    (Some((v, Some(sc))), None) if band(&x).is_some() => {
                        set(&mut update, "y", v.clone());
                        set(
                            &mut update,
                            "y2",
                            json!({ "scale": self.scale_name(&view.id, &sc.id), "value": 0 }),
                        );
                    }
                    (Some((v, _)), None) => {
                        set(&mut update, "yc", v.clone());
                        set(&mut update, "height", json!({ "value": 5 }));
                    }
                    (None, _) => {}
                }
            }
            MarkType::Area => {
                if let Some(v) = centered(&x) {
                    set(&mut update, "x", v);
                }
                if let Some((v, sc)) = &y {
                    set(&mut update, "y", v.clone());
                    match sc {
                        Some(sc) if sc.is_continuous() => set(
                            &mut update,
                            "y2",
                            json!({ "scale": self.scale_name(&view.id, &sc.id), "value": 0 }),
                        ),
                        _ => set(&mut update, "y2", json!({ "value": view.height })),
                    }
                }
            }
            MarkType::Rule => {
                let has_x = x.is_some() || bound(BindProperty::X);
                let has_y = y.is_some() || bound(BindProperty::Y);
                if let Some(v) = centered(&x) {
                    set(&mut update, "x", v);
                }
                if let Some(v) = centered(&y) {
                    set(&mut update, "y", v);
                }
                if has_x && !has_y {
                    set(&mut update, "y", json!({ "value": 0 }));
                    set(&mut update, "y2", json!({ "value": view.height }));
                } else if has_y && !has_x {
                    set(&mut update, "x", json!({ "value": 0 }));
                    set(&mut update, "x2", json!({ "value": view.width }));
                } else {
                    set(&mut update, "x2", json!({ "value": view.width }));
                }
            }
            _ => {
                if let Some(v) = centered(&x) {
                    set(&mut update, "x", v);
                }
                if let Some(v) = centered(&y) {
                    set(&mut update, "y", v);
                }
            }
        }

        let color_prop = match mark.mark_type {
            MarkType::Line | MarkType::Rule => "stroke",
            _ => "fill",
        };
        let size_prop = match mark.mark_type {
            MarkType::Symbol => Some("size"),
            MarkType::Text => Some("fontSize"),
            MarkType::Line | MarkType::Rule => Some("strokeWidth"),
            _ => None,
        };
        for (channel, enc) in &mark.encodings {
            let prop = match channel {
                Channel::X | Channel::Y => continue,
                Channel::Color => color_prop,
                Channel::Opacity => "opacity",
                Channel::Shape if mark.mark_type == MarkType::Symbol => "shape",
                Channel::Shape => continue,
                Channel::Size => match size_prop {
                    Some(p) => p,
                    None => continue,
                },
                Channel::Text => "text",
            };
            let v = match enc {
                Encoding::Scaled { scale, field } => {
                    let Some(sc) = view.scale(scale) else {
                        continue;
                    };
                    json!({ "scale": self.scale_name(&view.id, &sc.id), "field": common::scaled_field(sc, field).map(|f| common::field_ref(&f)) })
                }
                Encoding::Constant { value } => json!({ "value": value }),
                Encoding::Field { field } => json!({ "field": common::field_ref(field) }),
            };
            set(&mut update, prop, v);
        }
        match mark.mark_type {
            MarkType::Line => {
                update
                    .entry("stroke")
                    .or_insert(json!({ "value": "#4c78a8" }));
                update.entry("strokeWidth").or_insert(json!({ "value": 2 }));
            }
            MarkType::Rule => {
                update.entry("stroke").or_insert(json!({ "value": "#888" }));
            }
            MarkType::Text => {
                update.entry("fill").or_insert(json!({ "value": "#333" }));
            }
            _ => {
                update
                    .entry("fill")
                    .or_insert(json!({ "value": "#4c78a8" }));
            }
        }
        if mark.mark_type == MarkType::Symbol {
            update.entry("size").or_insert(json!({ "value": 64 }));
        }

        for (prop, signal, space, temporal) in &bindings {
            let key = match prop {
                BindProperty::X => "x",
                BindProperty::Y => "y",
                BindProperty::Text => "text",
                BindProperty::Size => size_prop.unwrap_or("size"),
                BindProperty::Opacity => "opacity",
            };
            let v = match (space, prop) {
                (_, BindProperty::Text) => {
                    if temporal.is_some() {
                        json!({ "signal": format!("isValid({signal}) ? utcFormat({signal}, '%Y-%m-%d') : ''") })
                    } else {
                        json!({ "signal": format!("isValid({signal}) ? ({signal} + '') : ''") })
                    }
                }
                (SignalSpace::Pixel, _) => json!({ "signal": signal }),
                (SignalSpace::Data, p) => {
                    let sc = view
                        .scale_for(p.channel())
                        .expect("validated binding scale");
                    json!({ "scale": self.scale_name(&view.id, &sc.id), "signal": signal })
                }
            };
            update.insert(key.to_string(), v);
            if key == "x" {
                update.remove("xc");
            }
            if key == "y" {
                update.remove("yc");
            }
        }

        let available = if mark.dataset.is_some() {
            profile_view(self.chart, &view.id)
                .map(|p| p.datum_fields)
                .unwrap_or_default()
        } else {
            Vec::new()
        };
        for channel in [Channel::Color, Channel::Opacity, Channel::Size] {
            let apps = common::conditionals(self.defs, &mark.id, channel);
            if apps.is_empty() {
                continue;
            }
            let prop = match channel {
                Channel::Color => color_prop,
                Channel::Opacity => "opacity",
                _ => size_prop.unwrap_or("size"),
            };
            let mut rules = Vec::new();
            for app in &apps {
                let ApplicationKind::ConditionalEncoding {
                    selected_value,
                    default_value,
                    ..
                } = &app.kind
                else {
                    continue;
                };
                let pred = self.predicate(&app.selection, &available);
                rules.push(json!({ "test": format!("!({pred})"), "value": default_value }));
                if let Some(v) = selected_value {
                    rules.push(json!({ "test": pred, "value": v }));
                }
                self.sites.push(ApplicationSite {
                    application: app.id.clone(),
                    pointer: format!("{pointer}/encode/update/{}", common::pointer_segment(prop)),
                });
            }
            let base = update
                .remove(prop)
                .unwrap_or_else(|| json!({ "value": common::channel_fallback(channel) }));
            rules.push(base);
            update.insert(prop.to_string(), Value::Array(rules));
        }

        let mut m = Map::new();
        m.insert("type".into(), json!(vtype));
        m.insert("name".into(), json!(self.mark_names[&mark.id]));
        if let Some(ds) = &mark.dataset {
            m.insert(
                "from".into(),
                json!({ "data": self.data_names[&(view.id.clone(), ds.clone())] }),
            );
        }
        m.insert("encode".into(), json!({ "update": Value::Object(update) }));
        Value::Object(m)
    }
}

fn selection_info(
    chart: &ChartSpec,
    s: &SelectionInteraction,
    store: Option<String>,
    pan_zoom: bool,
) -> Result<SelInfo, CompileError> {
    let sel = &s.selection;
    let view = chart
        .view(&sel.source_view)
        .ok_or_else(|| CompileError::Internal(format!("unknown view `{}`", sel.source_view)))?;
    let descs = enumerate_signals(sel, chart);
    let mut extents = Vec::new();
    let mut values = Vec::new();
    for axis in sel.projected_axes() {
        let find = |space: SignalSpace, role: SignalRole| {
            descs
                .iter()
                .find(|d| d.axis == Some(*axis) && d.space == space && d.role == role)
                .map(|d| d.name.clone())
        };
        let scale = view.scale_for(axis.channel()).ok_or_else(|| {
            CompileError::Internal(format!("axis {axis} of `{}` has no scale", sel.id))
        })?;
        let field = scale.field.clone().ok_or_else(|| {
            CompileError::Internal(format!("axis {axis} of `{}` has no field", sel.id))
        })?;
        let missing = || {
            CompileError::Internal(format!(
                "selection `{}` lacks {axis} extent signals",
                sel.id
            ))
        };
        extents.push(Extent {
            axis: *axis,
            px: (
                find(SignalSpace::Pixel, SignalRole::Start).ok_or_else(missing)?,
                find(SignalSpace::Pixel, SignalRole::End).ok_or_else(missing)?,
            ),
            data: (
                find(SignalSpace::Data, SignalRole::Start).ok_or_else(missing)?,
                find(SignalSpace::Data, SignalRole::End).ok_or_else(missing)?,
            ),
            field,
            scale: scale.id.clone(),
            discrete: !scale.is_continuous(),
        });
    }
    for d in descs.iter().filter(|d| d.role == SignalRole::Value) {
        let field = d.field.clone().unwrap_or_default();
        let temporal = view
            .datasets()
            .iter()
            .any(|ds| chart.measure_type(ds, &field) == Some(MeasureType::Temporal));
        values.push((field, d.name.clone(), temporal));
    }
    let tested = match &sel.kind {
        SelectionKind::Point { fields, .. } if !fields.is_empty() => fields.clone(),
        _ => values.iter().map(|(f, _, _)| f.clone()).collect(),
    };
    Ok(SelInfo {
        selection: sel.clone(),
        pan_zoom,
        extents,
        values,
        tested,
        store,
    })
}

fn aggregate_transform(chart: &ChartSpec, view: &ViewDef, ds: &str) -> Option<Value> {
    if !view.is_aggregated() {
        return None;
    }
    let mut groupby: Vec<String> = Vec::new();
    for mark in view
        .marks
        .iter()
        .filter(|m| m.dataset.as_deref() == Some(ds))
    {
        for enc in mark.encodings.values() {
            if let Some(f) = chart.encoded_field(view, mark, enc) {
                if !groupby.contains(&f.name) {
                    groupby.push(f.name);
                }
            }
        }
    }
    let mut ops = Vec::new();
    let mut fields = Vec::new();
    let mut outputs = Vec::new();
    for sc in view.scales.iter().filter(|s| s.dataset == ds) {
        let (Some(op), Some(out)) = (sc.aggregate, sc.output_field()) else {
            continue;
        };
        if outputs.contains(&out) {
            continue;
        }
        ops.push(json!(op.as_str()));
        fields.push(
            sc.field
                .as_ref()
                .map_or(Value::Null, |f| json!(common::field_ref(f))),
        );
        outputs.push(out);
    }
    if ops.is_empty() {
        return None;
    }
    Some(
        json!({ "type": "aggregate", "groupby": groupby.iter().map(|f| common::field_ref(f)).collect::<Vec<_>>(), "ops": ops, "fields": fields, "as": outputs }),
    )
}

fn line_sort_field(view: &ViewDef, ds: &str) -> Option<String> {
    view.marks
        .iter()
        .filter(|m| m.dataset.as_deref() == Some(ds))
        .filter(|m| matches!(m.mark_type, MarkType::Line | MarkType::Area))
        .find_map(|m| match m.encodings.get(&Channel::X)? {
            Encoding::Scaled { scale, field } => common::scaled_field(view.scale(scale)?, field),
            _ => None,
        })
}

/// Raw fields read through continuous position scales; rows where they are
/// missing cannot be placed.
fn valid_fields(view: &ViewDef, ds: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for mark in view
        .marks
        .iter()
        .filter(|m| m.dataset.as_deref() == Some(ds))
    {
        for channel in [Channel::X, Channel::Y] {
            let Some(Encoding::Scaled { scale, field }) = mark.encodings.get(&channel) else {
                continue;
            };
            let Some(sc) = view.scale(scale) else {
                continue;
            };
            if !sc.is_continuous() || sc.aggregate.is_some() {
                continue;
            }
            if let Some(f) = field.clone().or_else(|| sc.field.clone()) {
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
    }
    out
}

/// Fields splitting a line or area mark into one path per series.
fn series_fields(view: &ViewDef, mark: &MarkDef) -> Vec<String> {
    if !matches!(mark.mark_type, MarkType::Line | MarkType::Area) || mark.dataset.is_none() {
        return Vec::new();
    }
    let mut out: Vec<String> = Vec::new();
    for (channel, enc) in &mark.encodings {
        if matches!(channel, Channel::X | Channel::Y | Channel::Text) {
            continue;
        }
        let Encoding::Scaled { scale, field } = enc else {
            continue;
        };
        let Some(sc) = view.scale(scale) else {
            continue;
        };
        if sc.is_continuous() || sc.aggregate.is_some() {
            continue;
        }
        if let Some(f) = common::scaled_field(sc, field) {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    out
}

/// Single-quoted expression string literal.
fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\\', "\\\\").replace('\'', "\\'"))
}

/// Property access on an expression object.
fn access(object: &str, field: &str) -> String {
    if crate::interaction::is_identifier(field) {
        format!("{object}.{field}")
    } else {
        format!("{object}[{}]", quote(field))
    }
}

/// Normalises a value for identity comparison; dates compare by timestamp.
fn key_part(expr: &str, temporal: bool) -> String {
    if temporal {
        format!("('' + time({expr}))")
    } else {
        format!("('' + {expr})")
    }
}
