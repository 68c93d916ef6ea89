//! Seeded random charts for property checks.

#![allow(dead_code)]

use demoviz_core::chart::Channel;
use demoviz_core::interaction::{Axis, SelectionKind};
use demoviz_core::trace::{classify, EventKind};
use demoviz_core::{load_chart, suggest, ChartSpec, InputEvent};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const MARKS: [&str; 7] = ["symbol", "rect", "line", "area", "text", "rule", "group"];
const AGGREGATES: [&str; 5] = ["count", "sum", "mean", "min", "max"];
const QUANTITATIVE: [&str; 3] = ["a", "b", "t"];
const NOMINAL: [&str; 2] = ["c", "p"];

fn rows(rng: &mut ChaCha8Rng) -> Vec<Value> {
    let n = rng.gen_range(3..20);
    (0..n)
        .map(|i| {
            json!({
                "a": rng.gen_range(-50.0..50.0),
                "b": rng.gen_range(0..1000),
                "t": format!("2020-01-{:02}", i % 28 + 1),
                "c": (["u", "v", "w"][rng.gen_range(0..3)]),
                "p": (["k", "l"][rng.gen_range(0..2)]),
            })
        })
        .collect()
}

fn axis_scale(
    rng: &mut ChaCha8Rng,
    channel: &str,
    dataset: &str,
    allow_aggregate: bool,
) -> Option<Value> {
    let pick = rng.gen_range(0..if allow_aggregate { 4 } else { 3 });
    match pick {
        0 => None,
        1 => Some(json!({
            "id": channel, "channel": channel, "type": "discrete", "dataset": dataset,
            "field": NOMINAL.choose(rng).unwrap()
        })),
        2 => Some(json!({
            "id": channel, "channel": channel, "type": "continuous", "dataset": dataset,
            "field": QUANTITATIVE.choose(rng).unwrap()
        })),
        _ => {
            let op = *AGGREGATES.choose(rng).unwrap();
            let mut s = json!({"id": channel, "channel": channel, "type": "continuous", "dataset": dataset, "aggregate": op});
            if op != "count" {
                s["field"] = json!(*["a", "b"].choose(rng).unwrap());
            }
            Some(s)
        }
    }
}

/// A chart of one to three views over one or two datasets.
pub fn random_chart_doc(rng: &mut ChaCha8Rng) -> Value {
    let datasets: Vec<Value> = (0..rng.gen_range(1..=2))
        .map(|i| json!({"id": format!("d{i}"), "values": rows(rng)}))
        .collect();
    let views: Vec<Value> = (0..rng.gen_range(1..=3))
        .map(|v| {
            let ds = format!("d{}", rng.gen_range(0..datasets.len()));
            let x = axis_scale(rng, "x", &ds, true);
            let y = axis_scale(rng, "y", &ds, x.as_ref().is_none_or(|s| s.get("aggregate").is_none()));
            let mut scales = Vec::new();
            let mut encode = serde_json::Map::new();
            for (name, s) in [("x", x), ("y", y)] {
                if let Some(s) = s {
                    scales.push(s);
                    encode.insert(name.into(), json!({"scale": name}));
                }
            }
            if rng.gen_bool(0.5) {
                scales.push(json!({"id": "color", "channel": "color", "type": "discrete", "dataset": ds, "field": "c"}));
                encode.insert("color".into(), json!({"scale": "color"}));
            }
            let marks: Vec<Value> = (0..rng.gen_range(1..=2))
                .map(|m| {
                    json!({"id": format!("m{v}_{m}"), "type": MARKS.choose(rng).unwrap(), "dataset": ds, "encode": encode})
                })
                .collect();
            json!({
                "id": format!("v{v}"),
                "width": rng.gen_range(100..600),
                "height": rng.gen_range(100..400),
                "scales": scales,
                "marks": marks,
            })
        })
        .collect();
    json!({"version": 1, "datasets": datasets, "views": views})
}

fn random_drag(rng: &mut ChaCha8Rng, view: &str) -> Vec<InputEvent> {
    let (x0, y0) = (rng.gen_range(0.0..300.0), rng.gen_range(0.0..300.0));
    let len = rng.gen_range(10.0..200.0);
    let angle: f64 = rng.gen_range(0.0..360.0_f64).to_radians();
    vec![
        InputEvent::new(EventKind::PointerDown, x0, y0, 0.0, view),
        InputEvent::new(
            EventKind::PointerUp,
            x0 + len * angle.cos(),
            y0 + len * angle.sin(),
            80.0,
            view,
        ),
    ]
}

fn aggregate_axis(chart: &ChartSpec, view: &str, axis: Axis) -> bool {
    let channel = match axis {
        Axis::X => Channel::X,
        Axis::Y => Channel::Y,
    };
    chart
        .view(view)
        .and_then(|v| v.scale_for(channel))
        .is_some_and(|s| s.aggregate.is_some())
}

/// Generates `charts` charts and drags on every view; returns the number of
/// interval candidates inspected and a line per candidate that projects onto
/// an aggregate axis.
pub fn aggregate_violations(charts: usize, seed: u64) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut violations = Vec::new();
    for n in 0..charts {
        let doc = random_chart_doc(&mut rng);
        let chart =
            load_chart(&doc.to_string(), None).unwrap_or_else(|e| panic!("chart {n}: {e}\n{doc}"));
        for view in &chart.views {
            let demo = classify(&random_drag(&mut rng, &view.id))
                .unwrap()
                .remove(0);
            let Ok(set) = suggest(&chart, &demo) else {
                continue;
            };
            for sel in &set.selections {
                if let SelectionKind::Interval { encodings } = &sel.kind {
                    checked += 1;
                    for axis in encodings {
                        if aggregate_axis(&chart, &view.id, *axis) {
                            violations.push(format!(
                                "chart {n}, view {}: interval over aggregate {axis:?}",
                                view.id
                            ));
                        }
                    }
                }
            }
        }
    }
    (checked, violations)
}
