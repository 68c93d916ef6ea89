//! Brute-force rule table for the suggestion heuristics, and the view
//! cross-product it is checked over.
//!
//! The table is written out case by case from the rules as stated in prose
//! and shares no code with `demoviz_core::heuristics`.

#![allow(dead_code)]

use demoviz_core::trace::{classify, EventKind};
use demoviz_core::{load_chart, ChartSpec, InputEvent, SuggestionSet};
use serde_json::{json, Value};

pub const MARKS: [&str; 7] = ["symbol", "rect", "line", "area", "text", "rule", "group"];

/// What sits on a spatial axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    None,
    Discrete,
    Continuous,
    /// Continuous scale over an aggregate measure.
    Aggregate,
}

pub const AXES: [Axis; 4] = [
    Axis::None,
    Axis::Discrete,
    Axis::Continuous,
    Axis::Aggregate,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    /// Drag at the given angle from horizontal, in degrees.
    Drag(f64),
    Click(usize),
    Hover,
}

#[derive(Debug, Clone)]
pub struct Case {
    pub mark: &'static str,
    pub x: Axis,
    pub y: Axis,
    pub shared: bool,
    pub event: Event,
}

/// Every case in the cross-product. Aggregates only sit on continuous scales
/// (the table's fourth axis kind) and at most one axis is aggregated, since a
/// view aggregated on both axes has nothing to group by.
pub fn cases() -> Vec<Case> {
    let events = [
        Event::Drag(0.0),
        Event::Drag(45.0),
        Event::Drag(90.0),
        Event::Click(1),
        Event::Click(2),
        Event::Hover,
    ];
    let mut out = Vec::new();
    for mark in MARKS {
        for x in AXES {
            for y in AXES {
                if x == Axis::Aggregate && y == Axis::Aggregate {
                    continue;
                }
                for shared in [false, true] {
                    for event in events {
                        out.push(Case {
                            mark,
                            x,
                            y,
                            shared,
                            event,
                        });
                    }
                }
            }
        }
    }
    out
}

fn scale(id: &str, axis: Axis, quantitative: &str, nominal: &str) -> Option<Value> {
    match axis {
        Axis::None => None,
        Axis::Discrete => Some(
            json!({"id": id, "channel": id, "type": "discrete", "dataset": "d", "field": nominal}),
        ),
        Axis::Continuous => Some(
            json!({"id": id, "channel": id, "type": "continuous", "dataset": "d", "field": quantitative}),
        ),
        Axis::Aggregate => Some(
            json!({"id": id, "channel": id, "type": "continuous", "dataset": "d", "aggregate": "count"}),
        ),
    }
}

/// One view `v` holding mark `m` over dataset `d`, with color on `c`; when
/// shared, a second view `w` draws rect `n` from the same dataset.
pub fn chart_doc(case: &Case) -> Value {
    let rows: Vec<Value> = (0..6)
        .map(|i| {
            json!({
                "a": i as f64 * 1.5,
                "b": 10.0 - i as f64,
                "c": (["u", "v", "w"][i % 3]),
                "p": (["k", "l"][i % 2]),
                "q": (["r", "s", "t"][(i + 1) % 3]),
            })
        })
        .collect();
    let mut scales = Vec::new();
    let mut encode = serde_json::Map::new();
    for (id, axis, quantitative, nominal) in [("x", case.x, "a", "p"), ("y", case.y, "b", "q")] {
        if let Some(s) = scale(id, axis, quantitative, nominal) {
            scales.push(s);
            encode.insert(id.into(), json!({"scale": id}));
        }
    }
    scales.push(json!({"id": "color", "channel": "color", "type": "discrete", "dataset": "d", "field": "c"}));
    encode.insert("color".into(), json!({"scale": "color"}));

    let mut views = vec![json!({
        "id": "v", "width": 400, "height": 300,
        "scales": scales,
        "marks": [{"id": "m", "type": case.mark, "dataset": "d", "encode": encode}]
    })];
    if case.shared {
        views.push(json!({
            "id": "w", "width": 400, "height": 100,
            "scales": [
                {"id": "x", "channel": "x", "type": "discrete", "dataset": "d", "field": "c"},
                {"id": "y", "channel": "y", "type": "continuous", "dataset": "d", "aggregate": "count"}
            ],
            "marks": [{"id": "n", "type": "rect", "dataset": "d",
                       "encode": {"x": {"scale": "x"}, "y": {"scale": "y"}}}]
        }));
    }
    json!({"version": 1, "datasets": [{"id": "d", "values": rows}], "views": views})
}

pub fn chart(case: &Case) -> ChartSpec {
    load_chart(&chart_doc(case).to_string(), None).unwrap_or_else(|e| panic!("{case:?}: {e}"))
}

/// A drag from (100, 100) of length 100 at `angle` degrees, down and right.
pub fn drag_trace(view: &str, angle: f64) -> Vec<InputEvent> {
    let r = angle.to_radians();
    let (x1, y1) = (100.0 + 100.0 * r.cos(), 100.0 + 100.0 * r.sin());
    vec![
        InputEvent::new(EventKind::PointerDown, 100.0, 100.0, 0.0, view),
        InputEvent::new(
            EventKind::PointerMove,
            (100.0 + x1) / 2.0,
            (100.0 + y1) / 2.0,
            50.0,
            view,
        ),
        InputEvent::new(EventKind::PointerUp, x1, y1, 100.0, view),
    ]
}

/// Clicks on mark `m` at the given times.
pub fn click_trace(view: &str, times: &[f64]) -> Vec<InputEvent> {
    times
        .iter()
        .enumerate()
        .map(|(i, t)| InputEvent::new(EventKind::Click, 120.0, 80.0, *t, view).on("m", i))
        .collect()
}

pub fn trace(case: &Case) -> Vec<InputEvent> {
    match case.event {
        Event::Drag(angle) => drag_trace("v", angle),
        Event::Click(n) => click_trace("v", &(0..n).map(|i| i as f64 * 300.0).collect::<Vec<_>>()),
        Event::Hover => {
            vec![InputEvent::new(EventKind::HoverEnter, 120.0, 80.0, 0.0, "v").on("m", 0)]
        }
    }
}

/// What a suggestion set is compared on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected {
    /// Selection descriptors, default first.
    pub selections: Vec<String>,
    pub applications: Vec<String>,
    pub default_projection: Option<String>,
}

/// `None` means no valid selection.
pub fn oracle(case: &Case) -> Option<Expected> {
    // Per-datum marks draw one item per row; lines and areas do not.
    let per_datum = !matches!(case.mark, "line" | "area");
    let free = |a: Axis| matches!(a, Axis::Discrete | Axis::Continuous);

    let (on, id) = match case.event {
        Event::Drag(_) => ("drag", "brush"),
        Event::Click(_) => ("click", "select"),
        Event::Hover => ("hover", "hover"),
    };

    let mut selections: Vec<String> = Vec::new();
    match case.event {
        Event::Drag(_) => {
            let table: [(&str, bool); 3] = [
                (
                    "interval:x,y",
                    per_datum && case.x == Axis::Continuous && case.y == Axis::Continuous,
                ),
                ("interval:x", free(case.x)),
                ("interval:y", per_datum && free(case.y)),
            ];
            selections.extend(
                table
                    .iter()
                    .filter(|(_, ok)| *ok)
                    .map(|(s, _)| s.to_string()),
            );
        }
        Event::Click(_) | Event::Hover => {
            selections.push("point:single".into());
            selections.push("point:multi".into());
            let mut fields = Vec::new();
            for (axis, quantitative, nominal) in [(case.x, "a", "p"), (case.y, "b", "q")] {
                match axis {
                    Axis::Discrete => fields.push(nominal),
                    Axis::Continuous => fields.push(quantitative),
                    Axis::None | Axis::Aggregate => {}
                }
            }
            fields.push("c");
            selections.extend(fields.iter().map(|f| format!("point:single:{f}")));
        }
    }
    if selections.is_empty() {
        return None;
    }
    let selections: Vec<String> = selections
        .into_iter()
        .map(|s| format!("{id}@{on}:{s}"))
        .collect();

    let wanted = match case.event {
        Event::Drag(a) if a <= 30.0 => Some("interval:x".to_string()),
        Event::Drag(a) if a >= 60.0 => Some("interval:y".to_string()),
        Event::Drag(_) => Some("interval:x,y".to_string()),
        Event::Click(1) => Some("point:single".to_string()),
        Event::Click(_) => Some("point:multi".to_string()),
        Event::Hover => None,
    };
    let mut ordered = selections.clone();
    if let Some(w) = wanted {
        let full = format!("{id}@{on}:{w}");
        if let Some(pos) = ordered.iter().position(|s| *s == full) {
            let s = ordered.remove(pos);
            ordered.insert(0, s);
        }
    }

    let mut applications = Vec::new();
    if per_datum {
        applications.push(format!("{id}:color:m=lightgray"));
        applications.push(format!("{id}:opacity:m=0.3"));
        if case.mark == "symbol" {
            applications.push(format!("{id}:size:m=16"));
        }
    }
    if matches!(case.event, Event::Drag(_)) {
        let zoomable: Vec<&str> = [("x", case.x), ("y", case.y)]
            .iter()
            .filter(|(_, a)| *a == Axis::Continuous)
            .map(|(n, _)| *n)
            .collect();
        if !zoomable.is_empty() {
            applications.push(format!("{id}:pan_zoom:{}", zoomable.join(",")));
        }
    }
    if case.shared {
        applications.push(format!("{id}:filter:w"));
        applications.push(format!("{id}:color:n=lightgray"));
    }

    let default_projection = match case.event {
        Event::Drag(_) => None,
        _ => Some("c".to_string()),
    };
    Some(Expected {
        selections: ordered,
        applications,
        default_projection,
    })
}

/// Reduces a suggestion set to the oracle's vocabulary.
pub fn describe(set: &SuggestionSet) -> Expected {
    let doc = serde_json::to_value(set).unwrap();
    let selections = doc["selections"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            let head = format!(
                "{}@{}",
                s["id"].as_str().unwrap(),
                s["on"].as_str().unwrap()
            );
            let body = match s["type"].as_str().unwrap() {
                "interval" => {
                    let axes: Vec<&str> = s["encodings"]
                        .as_array()
                        .unwrap()
                        .iter()
                        .map(|a| a.as_str().unwrap())
                        .collect();
                    format!("interval:{}", axes.join(","))
                }
                _ => {
                    let mut out = format!("point:{}", s["cardinality"].as_str().unwrap());
                    if let Some(fields) = s.get("fields").and_then(Value::as_array) {
                        let names: Vec<&str> = fields.iter().map(|f| f.as_str().unwrap()).collect();
                        out.push(':');
                        out.push_str(&names.join(","));
                    }
                    out
                }
            };
            format!("{head}:{body}")
        })
        .collect();
    let applications = doc["applications"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| {
            let sel = a["selection"].as_str().unwrap();
            match a["type"].as_str().unwrap() {
                "conditional_encoding" => format!(
                    "{sel}:{}:{}={}",
                    a["channel"].as_str().unwrap(),
                    a["mark"].as_str().unwrap(),
                    match &a["default_value"] {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    }
                ),
                "pan_zoom" => {
                    let scales: Vec<&str> = a["scales"]
                        .as_array()
                        .unwrap()
                        .iter()
                        .map(|s| s["scale"].as_str().unwrap())
                        .collect();
                    format!("{sel}:pan_zoom:{}", scales.join(","))
                }
                "filter" => format!("{sel}:filter:{}", a["view"].as_str().unwrap()),
                other => format!("{sel}:{other}"),
            }
        })
        .collect();
    Expected {
        selections,
        applications,
        default_projection: set.default_projection.clone(),
    }
}

/// Runs the engine on one case. `None` when it finds no valid selection.
pub fn engine(case: &Case) -> Option<Expected> {
    let chart = chart(case);
    let demos = classify(&trace(case)).unwrap_or_else(|e| panic!("{case:?}: {e}"));
    assert_eq!(demos.len(), 1, "{case:?}");
    match demoviz_core::suggest(&chart, &demos[0]) {
        Ok(set) => {
            assert_eq!(set.default_selection, 0);
            Some(describe(&set))
        }
        Err(e) => {
            assert_eq!(e.code(), "NoValidSelection", "{case:?}");
            None
        }
    }
}

/// Disagreements between the engine and the oracle over the whole cross-product.
pub fn disagreements() -> (usize, Vec<String>) {
    let cases = cases();
    let mut out = Vec::new();
    for case in &cases {
        let want = oracle(case);
        let got = engine(case);
        if want != got {
            out.push(format!("{case:?}\n  oracle: {want:?}\n  engine: {got:?}"));
        }
    }
    (cases.len(), out)
}
