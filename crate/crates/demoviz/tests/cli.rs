use std::path::PathBuf;
use std::process::Command;

use demoviz::cli::run;
use demoviz_core::interaction::{Axis, SelectionKind};
use demoviz_core::{classify, load_chart_file, suggest, suggest_widgets, InteractionDocument};

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(rel)
        .display()
        .to_string()
}

fn demoviz(args: &[&str]) -> demoviz::cli::Outcome {
    let argv = std::iter::once("demoviz").chain(args.iter().copied());
    run(argv, std::io::empty())
}

#[test]
fn suggest_prints_the_library_result() {
    let chart = fixture("charts/seattle.json");
    let trace = fixture("traces/seattle_drag.json");
    let out = demoviz(&["suggest", "--chart", &chart, "--trace", &trace]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.is_empty());

    let spec = load_chart_file(chart.as_ref()).unwrap();
    let events =
        demoviz_core::trace::parse_trace(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    let demos = classify(&events).unwrap();
    let expected = suggest(&spec, demos.last().unwrap()).unwrap();
    assert_eq!(out.stdout, expected.to_json());
    let default = &expected.selections[expected.default_selection];
    assert!(
        matches!(&default.kind, SelectionKind::Interval { encodings } if encodings == &[Axis::X])
    );
}

#[test]
fn brush_labels_are_not_expressible_in_vega_lite() {
    let chart = fixture("charts/seattle_labels.json");
    let doc = fixture("interactions/brush_label.json");
    let out = demoviz(&[
        "compile",
        "--chart",
        &chart,
        "--interactions",
        &doc,
        "--target",
        "vega-lite",
    ]);
    assert_eq!(out.code, 1);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("SignalBinding"), "{}", out.stderr);
}

#[test]
fn auto_target_falls_back_to_vega_with_a_note() {
    let chart = fixture("charts/seattle_labels.json");
    let doc = fixture("interactions/brush_label.json");
    let out = demoviz(&["compile", "--chart", &chart, "--interactions", &doc]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.contains("SignalBinding"));
    let result: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(result["target"], "vega");

    let only = demoviz(&[
        "compile",
        "--chart",
        &chart,
        "--interactions",
        &doc,
        "--document-only",
    ]);
    assert_eq!(
        only.stdout,
        demoviz_core::json::to_canonical_string(&result["document"])
    );
}

#[test]
fn auto_target_prefers_vega_lite() {
    let chart = fixture("charts/seattle.json");
    let doc = fixture("interactions/seattle_walkthrough.json");
    let out = demoviz(&[
        "compile",
        "--chart",
        &chart,
        "--interactions",
        &doc,
        "--document-only",
    ]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stderr.is_empty());
    let golden = std::fs::read_to_string(fixture("golden/seattle_walkthrough.vl.json")).unwrap();
    assert_eq!(out.stdout, golden);
}

#[test]
fn missing_files_exit_with_two() {
    let trace = fixture("traces/seattle_drag.json");
    let out = demoviz(&["suggest", "--chart", "missing.json", "--trace", &trace]);
    assert_eq!(out.code, 2);
    assert!(out.stdout.is_empty());
    assert!(out.stderr.contains("missing.json"));
}

#[test]
fn malformed_input_exits_with_two() {
    let dir = std::env::temp_dir().join(format!("demoviz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let trace = fixture("traces/seattle_drag.json");
    let out = demoviz(&[
        "suggest",
        "--chart",
        bad.to_str().unwrap(),
        "--trace",
        &trace,
    ]);
    assert_eq!(out.code, 2);
    let chart = fixture("charts/seattle.json");
    let out = demoviz(&[
        "suggest",
        "--chart",
        &chart,
        "--trace",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(out.code, 2);
    assert_eq!(demoviz(&["frobnicate"]).code, 2);
    assert_eq!(demoviz(&["compile", "--chart", &chart]).code, 2);
}

#[test]
fn inputs_can_come_from_stdin() {
    let chart = fixture("charts/seattle.json");
    let trace = std::fs::read(fixture("traces/seattle_drag.json")).unwrap();
    let via_stdin = run(
        ["demoviz", "suggest", "--chart", &chart, "--trace", "-"],
        std::io::Cursor::new(trace),
    );
    let via_file = demoviz(&[
        "suggest",
        "--chart",
        &chart,
        "--trace",
        &fixture("traces/seattle_drag.json"),
    ]);
    assert_eq!(via_stdin, via_file);

    let both = run(
        ["demoviz", "suggest", "--chart", "-", "--trace", "-"],
        std::io::Cursor::new(b"[]".to_vec()),
    );
    assert_eq!(both.code, 2);
}

#[test]
fn widgets_for_a_nominal_field() {
    let chart = fixture("charts/seattle.json");
    let out = demoviz(&["widgets", "--chart", &chart, "--field", "weather"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let spec = load_chart_file(chart.as_ref()).unwrap();
    assert_eq!(
        out.stdout,
        suggest_widgets(&spec, None, "weather").unwrap().to_json()
    );
    let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
    let kinds: Vec<&str> = v["widgets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["widget"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["radio", "select"]);

    let out = demoviz(&["widgets", "--chart", &chart, "--field", "nope"]);
    assert_eq!(out.code, 1);
}

#[test]
fn validate_reports_problems_with_exit_one() {
    let chart = fixture("charts/seattle.json");
    let ok = demoviz(&[
        "validate",
        "--chart",
        &chart,
        "--interactions",
        &fixture("interactions/seattle_walkthrough.json"),
    ]);
    assert_eq!(ok.code, 0, "{}", ok.stdout);
    let v: serde_json::Value = serde_json::from_str(&ok.stdout).unwrap();
    assert_eq!(v["valid"], true);

    assert_eq!(demoviz(&["validate", "--chart", &chart]).code, 0);

    // Brush-label bindings name marks the plain Seattle chart does not have.
    let bad = demoviz(&[
        "validate",
        "--chart",
        &chart,
        "--interactions",
        &fixture("interactions/brush_label.json"),
    ]);
    assert_eq!(bad.code, 1);
    let v: serde_json::Value = serde_json::from_str(&bad.stdout).unwrap();
    assert_eq!(v["valid"], false);
    let text = std::fs::read_to_string(fixture("interactions/brush_label.json")).unwrap();
    let doc = InteractionDocument::parse(&text).unwrap();
    let report = doc
        .resolve(&load_chart_file(chart.as_ref()).unwrap())
        .unwrap_err();
    assert_eq!(bad.stdout, demoviz_core::json::to_canonical_string(&report));
}

#[test]
fn binary_honours_the_schema_directory_override() {
    let chart = fixture("charts/seattle.json");
    let doc = fixture("interactions/seattle_walkthrough.json");
    let bin = env!("CARGO_BIN_EXE_demoviz");

    let vendored = fixture("../schemas");
    let out = Command::new(bin)
        .args(["compile", "--chart", &chart, "--interactions", &doc])
        .env("DEMOVIZ_SCHEMA_DIR", &vendored)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let out = Command::new(bin)
        .args(["compile", "--chart", &chart, "--interactions", &doc])
        .env("DEMOVIZ_SCHEMA_DIR", "/nonexistent/schemas")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}
