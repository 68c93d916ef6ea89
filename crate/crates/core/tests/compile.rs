mod common;

use std::collections::BTreeSet;

use common::*;
use demoviz_core::compiler::{BlockerCode, CompileError};
use demoviz_core::interaction::{Axis, InteractionDocument, SelectionKind};
use demoviz_core::trace::EventKind;
use demoviz_core::{classify, suggest, Compiler, InputEvent, SchemaSet, Target};
use serde_json::{json, Value};

#[test]
fn brush_label_needs_vega_and_exposes_exactly_its_bound_signals() {
    let chart = chart("seattle_labels");
    let defs = interactions("brush_label", &chart);
    let compiler = Compiler::default();
    match compiler.compile(&chart, &defs, Target::VegaLite) {
        Err(CompileError::NotExpressible(report)) => {
            assert!(report.has(BlockerCode::SignalBinding), "{report}");
            assert!(report
                .blockers
                .iter()
                .all(|b| b.code == BlockerCode::SignalBinding));
        }
        other => panic!("expected NotExpressible, got {other:?}"),
    }
    let out = compiler.compile(&chart, &defs, Target::Vega).unwrap();
    SchemaSet::embedded()
        .validate(Target::Vega, &out.document)
        .unwrap();
    let names: BTreeSet<String> = out.signal_names().into_iter().collect();
    let want: BTreeSet<String> = [
        "brush_x_start",
        "brush_x_end",
        "brush_date_start",
        "brush_date_end",
    ]
    .into_iter()
    .map(String::from)
    .collect();
    assert_eq!(names, want);
}

fn marks_of_type(node: &Value, ty: &str, out: &mut usize) {
    if let Some(marks) = node.get("marks").and_then(Value::as_array) {
        for m in marks {
            if m["type"] == ty {
                *out += 1;
            }
            marks_of_type(m, ty, out);
        }
    }
}

#[test]
fn index_chart_draws_a_single_rule() {
    let chart = chart("stocks_index");
    let defs = interactions("index_chart", &chart);
    let out = Compiler::default()
        .compile(&chart, &defs, Target::Vega)
        .unwrap();
    let mut rules = 0;
    marks_of_type(&out.document, "rule", &mut rules);
    assert_eq!(rules, 1);
}

#[test]
fn gallery_documents_validate_against_the_vega_schema() {
    let schemas = SchemaSet::embedded();
    let compiler = Compiler::default();
    for (name, c, i) in GALLERY.iter().chain([&LINKING]) {
        let chart = chart(c);
        let out = compiler
            .compile(&chart, &interactions(i, &chart), Target::Vega)
            .unwrap();
        schemas
            .validate(Target::Vega, &out.document)
            .unwrap_or_else(|e| panic!("{name}: {e:?}"));
    }
}

#[test]
fn widget_inequality_blocks_vega_lite() {
    let chart = chart("budgets");
    let defs = interactions("widget_filter", &chart);
    let report = demoviz_core::compiler::is_expressible_vegalite(&chart, &defs);
    assert!(report.has(BlockerCode::InequalityComparator), "{report}");
}

#[test]
fn drag_over_histogram_brushes_its_discrete_axis() {
    let chart = chart("seattle");
    let trace = vec![
        InputEvent::new(EventKind::PointerDown, 60.0, 120.0, 0.0, "histogram"),
        InputEvent::new(EventKind::PointerUp, 300.0, 126.0, 200.0, "histogram"),
    ];
    let demo = classify(&trace).unwrap().remove(0);
    let set = suggest(&chart, &demo).unwrap();
    assert_eq!(set.selections.len(), 1);
    assert!(
        matches!(&set.default().kind, SelectionKind::Interval { encodings } if encodings == &[Axis::X])
    );

    let doc = InteractionDocument::from_value(json!({
        "version": 1,
        "selections": [{"id": "brush", "view": "histogram", "on": "drag", "type": "interval", "encodings": ["x"]}],
        "applications": [
            {"id": "brush_color_bars", "selection": "brush", "type": "conditional_encoding",
             "mark": "bars", "channel": "color", "default_value": "lightgray"},
            {"id": "brush_filter_scatter", "selection": "brush", "type": "filter", "view": "scatter"}
        ]
    }))
    .unwrap();
    let defs = doc.resolve(&chart).unwrap();
    let compiler = Compiler::default();
    for target in [Target::VegaLite, Target::Vega] {
        compiler
            .compile(&chart, &defs, target)
            .unwrap_or_else(|e| panic!("{target:?}: {e}"));
    }
    let vega = compiler.compile(&chart, &defs, Target::Vega).unwrap();
    let text = vega.document.to_string();
    assert!(
        text.contains("bandwidth('histogram_x')"),
        "band brush should test band centres"
    );
}

#[test]
fn aggregate_axes_cannot_be_brushed() {
    let chart = chart("seattle");
    let doc = InteractionDocument::from_value(json!({
        "version": 1,
        "selections": [{"id": "brush", "view": "histogram", "on": "drag", "type": "interval", "encodings": ["y"]}]
    }))
    .unwrap();
    let report = doc.resolve(&chart).unwrap_err();
    assert!(!report.is_valid());
}

#[test]
fn awkward_field_names_give_identifier_signals_and_escaped_fields() {
    let chart = demoviz_core::load_chart(
        &json!({
            "version": 1,
            "datasets": [{"id": "d", "values": [
                {"Miles per Gallon": 10, "a.b": 1},
                {"Miles per Gallon": 30, "a.b": 5}
            ]}],
            "views": [{"id": "v", "width": 300, "height": 200,
                "scales": [
                    {"id": "x", "channel": "x", "type": "continuous", "dataset": "d", "field": "Miles per Gallon"},
                    {"id": "y", "channel": "y", "type": "continuous", "dataset": "d", "field": "a.b"}
                ],
                "marks": [{"id": "pts", "type": "symbol", "dataset": "d",
                           "encode": {"x": {"scale": "x"}, "y": {"scale": "y"}}}]}]
        })
        .to_string(),
        None,
    )
    .unwrap();
    let doc = InteractionDocument::from_value(json!({
        "version": 1,
        "selections": [{"id": "brush", "view": "v", "on": "drag", "type": "interval", "encodings": ["x", "y"]}],
        "applications": [{"id": "c", "selection": "brush", "type": "conditional_encoding",
                          "mark": "pts", "channel": "opacity", "default_value": 0.3}]
    }))
    .unwrap();
    let defs = doc.resolve(&chart).unwrap();
    let compiler = Compiler::default();
    let vega = compiler.compile(&chart, &defs, Target::Vega).unwrap();
    for name in vega.signal_names() {
        assert!(
            name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_'),
            "{name}"
        );
    }
    assert!(vega.signal_names().contains(&"brush_a_b_start".to_string()));
    let text = vega.document.to_string();
    assert!(
        text.contains(r#""field":"a\\.b""#),
        "dotted field is not escaped"
    );
    let vl = compiler.compile(&chart, &defs, Target::VegaLite).unwrap();
    assert!(vl.document.to_string().contains(r#""field":"a\\.b""#));
}
