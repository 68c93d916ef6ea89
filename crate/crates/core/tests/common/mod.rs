#![allow(dead_code)]

use std::path::PathBuf;

use demoviz_core::interaction::{InteractionDef, InteractionDocument};
use demoviz_core::{load_chart_file, ChartSpec, InputEvent};

pub fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(rel)
}

pub fn chart(name: &str) -> ChartSpec {
    load_chart_file(&fixture(&format!("charts/{name}.json")))
        .unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn interactions(name: &str, chart: &ChartSpec) -> Vec<InteractionDef> {
    let text = std::fs::read_to_string(fixture(&format!("interactions/{name}.json"))).unwrap();
    let doc = InteractionDocument::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
    doc.resolve(chart)
        .unwrap_or_else(|r| panic!("{name}:\n{r}"))
}

pub fn trace(name: &str) -> Vec<InputEvent> {
    let text = std::fs::read_to_string(fixture(&format!("traces/{name}.json"))).unwrap();
    demoviz_core::trace::parse_trace(&text).unwrap()
}

/// The gallery: (name, chart, interactions).
pub const GALLERY: [(&str, &str, &str); 7] = [
    ("point select", "cars", "point_select"),
    ("brush select", "cars", "brush_select"),
    ("pan/zoom", "cars", "pan_zoom"),
    ("index chart", "stocks_index", "index_chart"),
    ("tooltip", "cars_tooltip", "tooltip"),
    ("overview+detail", "stocks_overview", "overview_detail"),
    ("widget filter", "budgets", "widget_filter"),
];

pub const LINKING: (&str, &str, &str) = ("brushing & linking", "cars_linked", "brushing_linking");
