use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::{
    enumerate_signals, is_identifier, Application, ApplicationKind, BindProperty, Comparator,
    EventSource, InteractionDef, QueryWidget, SelectionInteraction, SelectionKind, SignalSpace,
    WidgetDomain, WidgetKind,
};
use crate::chart::{profile_view, Channel, ChartSpec, MeasureType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum IssueCode {
    InvalidProjection,
    DanglingReference,
    IllegalBinding,
    WidgetTypeMismatch,
    InvalidSelection,
    InvalidApplication,
    DuplicateId,
}

impl fmt::Display for IssueCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub code: IssueCode,
    /// Id of the offending element.
    pub reference: String,
    pub message: String,
}

/// Outcome of validating interactions against a chart; empty means valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn has(&self, code: IssueCode) -> bool {
        self.issues.iter().any(|i| i.code == code)
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.issues.extend(other.issues);
    }

    pub(crate) fn push(&mut self, code: IssueCode, reference: &str, message: impl Into<String>) {
        self.issues.push(Issue {
            code,
            reference: reference.to_string(),
            message: message.into(),
        });
    }
}

impl Serialize for ValidationReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            version: u32,
            valid: bool,
            issues: &'a [Issue],
        }
        Wire {
            version: crate::FORMAT_VERSION,
            valid: self.is_valid(),
            issues: &self.issues,
        }
        .serialize(serializer)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for issue in &self.issues {
            writeln!(
                f,
                "{} at `{}`: {}",
                issue.code, issue.reference, issue.message
            )?;
        }
        Ok(())
    }
}

/// Checks one interaction definition against a chart.
pub fn validate_interaction(chart: &ChartSpec, interaction: &InteractionDef) -> ValidationReport {
    let mut report = ValidationReport::default();
    match interaction {
        InteractionDef::Selection(s) => validate_selection(chart, s, &mut report),
        InteractionDef::Widget(w) => validate_widget(chart, w, &mut report),
    }
    report
}

fn validate_selection(
    chart: &ChartSpec,
    def: &SelectionInteraction,
    report: &mut ValidationReport,
) {
    use IssueCode::*;
    let sel = &def.selection;
    if !is_identifier(&sel.id) {
        report.push(
            InvalidSelection,
            &sel.id,
            "selection id must be a plain identifier",
        );
    }
    let Some(view) = chart.view(&sel.source_view) else {
        report.push(
            DanglingReference,
            &sel.id,
            format!("view `{}` does not exist", sel.source_view),
        );
        return;
    };
    let profile = profile_view(chart, &view.id).expect("view exists");

    match &sel.kind {
        SelectionKind::Interval { encodings } => {
            if sel.event_source != EventSource::Drag {
                report.push(
                    InvalidSelection,
                    &sel.id,
                    "interval selections are made by dragging",
                );
            }
            if encodings.is_empty() {
                report.push(InvalidProjection, &sel.id, "interval projection is empty");
            }
            let mut seen = HashSet::new();
            for axis in encodings {
                if !seen.insert(*axis) {
                    report.push(
                        InvalidProjection,
                        &sel.id,
                        format!("axis {axis} projected twice"),
                    );
                    continue;
                }
                let p = if *axis == super::Axis::X {
                    &profile.x
                } else {
                    &profile.y
                };
                if p.aggregate {
                    report.push(
                        InvalidProjection,
                        &sel.id,
                        format!("axis {axis} encodes an aggregate measure and cannot be brushed"),
                    );
                } else if !p.brushable() {
                    report.push(
                        InvalidProjection,
                        &sel.id,
                        format!("axis {axis} has no scale to brush"),
                    );
                }
            }
        }
        SelectionKind::Point { fields, .. } => {
            if sel.event_source == EventSource::Drag {
                report.push(
                    InvalidSelection,
                    &sel.id,
                    "point selections come from clicks or hovers",
                );
            }
            if !view.marks.iter().any(|m| m.dataset.is_some()) {
                report.push(
                    InvalidSelection,
                    &sel.id,
                    "view has no data-backed marks to select",
                );
            }
            for f in fields {
                if profile.datum_fields.contains(f) {
                    continue;
                }
                let known = view
                    .datasets()
                    .iter()
                    .any(|d| chart.dataset(d).is_some_and(|t| t.field(f).is_some()));
                if known {
                    report.push(
                        InvalidProjection,
                        &sel.id,
                        format!("field `{f}` is aggregated away in view `{}`", view.id),
                    );
                } else {
                    report.push(
                        DanglingReference,
                        &sel.id,
                        format!("field `{f}` does not exist"),
                    );
                }
            }
        }
    }

    for app in &def.applications {
        validate_application(chart, app, &sel.id, Some(def), report);
    }

    let signals = enumerate_signals(sel, chart);
    let mut bound = HashSet::new();
    for b in &def.bindings {
        let Some(signal) = signals.iter().find(|s| s.name == b.signal) else {
            report.push(
                DanglingReference,
                &b.signal,
                format!("selection `{}` exposes no signal `{}`", sel.id, b.signal),
            );
            continue;
        };
        let Some((mview, mark)) = chart.mark(&b.mark) else {
            report.push(
                DanglingReference,
                &b.mark,
                format!("mark `{}` does not exist", b.mark),
            );
            continue;
        };
        if !bound.insert((b.mark.clone(), b.property)) {
            report.push(
                IllegalBinding,
                &b.mark,
                format!("property {:?} of `{}` is bound twice", b.property, b.mark),
            );
        }
        let legal = match signal.space {
            SignalSpace::Pixel => {
                let axis_ok = match (b.property, signal.axis) {
                    (BindProperty::X, Some(a)) => a == super::Axis::X,
                    (BindProperty::Y, Some(a)) => a == super::Axis::Y,
                    _ => true,
                };
                matches!(
                    b.property,
                    BindProperty::X | BindProperty::Y | BindProperty::Size
                ) && axis_ok
            }
            SignalSpace::Data => match b.property {
                BindProperty::Text => true,
                p => mview
                    .scale_for(p.channel())
                    .is_some_and(|s| s.is_continuous()),
            },
        };
        if !legal {
            report.push(
                IllegalBinding,
                &b.signal,
                format!(
                    "{:?}-space signal `{}` cannot drive {:?} of `{}`",
                    signal.space, signal.name, b.property, mark.id
                ),
            );
        }
    }
}

fn validate_application(
    chart: &ChartSpec,
    app: &Application,
    owner: &str,
    selection: Option<&SelectionInteraction>,
    report: &mut ValidationReport,
) {
    use IssueCode::*;
    if app.selection != owner {
        report.push(
            DanglingReference,
            &app.id,
            format!("application references `{}`, not `{owner}`", app.selection),
        );
    }
    let is_interval = selection.is_some_and(|s| s.selection.is_interval());
    match &app.kind {
        ApplicationKind::ConditionalEncoding { mark, channel, .. } => {
            if chart.mark(mark).is_none() {
                report.push(
                    DanglingReference,
                    &app.id,
                    format!("mark `{mark}` does not exist"),
                );
            }
            if !matches!(channel, Channel::Color | Channel::Opacity | Channel::Size) {
                report.push(
                    InvalidApplication,
                    &app.id,
                    format!("conditional encodings drive color, opacity or size, not {channel}"),
                );
            }
        }
        ApplicationKind::Filter { view, self_filter } => {
            if chart.view(view).is_none() {
                report.push(
                    DanglingReference,
                    &app.id,
                    format!("view `{view}` does not exist"),
                );
            } else if let Some(s) = selection {
                if &s.selection.source_view == view && !self_filter {
                    report.push(
                        InvalidApplication,
                        &app.id,
                        "filtering the selection's own view requires self_filter",
                    );
                }
            }
        }
        ApplicationKind::PanZoom { scales } => {
            if !is_interval {
                report.push(
                    InvalidApplication,
                    &app.id,
                    "pan & zoom is driven by an interval selection",
                );
            }
            if scales.is_empty() {
                report.push(InvalidApplication, &app.id, "pan & zoom names no scales");
            }
            for r in scales {
                let Some(scale) = chart.view(&r.view).and_then(|v| v.scale(&r.scale)) else {
                    report.push(
                        DanglingReference,
                        &app.id,
                        format!("scale `{r}` does not exist"),
                    );
                    continue;
                };
                let same_view = selection.is_some_and(|s| s.selection.source_view == r.view);
                if !same_view
                    || !scale.channel.is_spatial()
                    || !scale.is_continuous()
                    || scale.aggregate.is_some()
                {
                    report.push(
                        InvalidApplication,
                        &app.id,
                        format!(
                            "scale `{r}` is not a continuous raw spatial scale of the source view"
                        ),
                    );
                }
            }
        }
        ApplicationKind::ScaleDomain { scale: r } => {
            let Some(s) = selection.filter(|_| is_interval) else {
                report.push(
                    InvalidApplication,
                    &app.id,
                    "scale domains follow an interval selection",
                );
                return;
            };
            let Some(target) = chart.view(&r.view).and_then(|v| v.scale(&r.scale)) else {
                report.push(
                    DanglingReference,
                    &app.id,
                    format!("scale `{r}` does not exist"),
                );
                return;
            };
            let source = chart.view(&s.selection.source_view);
            let fed = s.selection.projected_axes().iter().any(|a| {
                source
                    .and_then(|v| v.scale_for(a.channel()))
                    .is_some_and(|src| {
                        src.field == target.field && src.aggregate.is_none() && src.is_continuous()
                    })
            });
            if r.view == s.selection.source_view
                || !target.is_continuous()
                || target.aggregate.is_some()
                || !fed
            {
                report.push(
                    InvalidApplication,
                    &app.id,
                    format!(
                        "scale `{r}` cannot take its domain from `{}`",
                        s.selection.id
                    ),
                );
            }
        }
    }
}

fn validate_widget(chart: &ChartSpec, w: &QueryWidget, report: &mut ValidationReport) {
    use IssueCode::*;
    if !is_identifier(&w.id) {
        report.push(
            InvalidSelection,
            &w.id,
            "widget id must be a plain identifier",
        );
    }
    match chart.measure_type(&w.field.dataset, &w.field.field) {
        None => report.push(
            DanglingReference,
            &w.id,
            format!(
                "field `{}.{}` does not exist",
                w.field.dataset, w.field.field
            ),
        ),
        Some(mt) => {
            if w.widget_kind == WidgetKind::Range && !mt.is_continuous() {
                report.push(
                    WidgetTypeMismatch,
                    &w.id,
                    format!("a range needs a continuous field, not {}", mt.as_str()),
                );
            }
            if w.comparator.is_ordering() && mt == MeasureType::Nominal {
                report.push(
                    WidgetTypeMismatch,
                    &w.id,
                    format!(
                        "`{}` has no meaning on a nominal field",
                        w.comparator.symbol()
                    ),
                );
            }
        }
    }
    if w.comparator == Comparator::Between && w.widget_kind != WidgetKind::Range {
        report.push(WidgetTypeMismatch, &w.id, "`between` needs a range widget");
    }
    match (&w.domain, w.widget_kind) {
        (Some(WidgetDomain::Options { .. }), WidgetKind::Range) => report.push(
            WidgetTypeMismatch,
            &w.id,
            "a range takes an extent, not options",
        ),
        (Some(WidgetDomain::Extent { .. }), WidgetKind::Radio | WidgetKind::Select) => report.push(
            WidgetTypeMismatch,
            &w.id,
            "radio and select widgets take options",
        ),
        (Some(WidgetDomain::Extent { min, max, step }), _)
            if min.partial_cmp(max).is_none_or(|o| o.is_gt()) || *step < 0.0 =>
        {
            report.push(
                WidgetTypeMismatch,
                &w.id,
                "extent must satisfy min <= max and step >= 0",
            )
        }
        _ => {}
    }
    for app in &w.applications {
        if matches!(
            app.kind,
            ApplicationKind::PanZoom { .. } | ApplicationKind::ScaleDomain { .. }
        ) {
            report.push(
                InvalidApplication,
                &app.id,
                format!("widgets cannot drive {}", app.kind.name()),
            );
            continue;
        }
        validate_application(chart, app, &w.id, None, report);
    }
}
