use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use demoviz::service::{router, FALLBACK_HEADER};
use demoviz_core::{load_chart_file, save_chart, Compiler};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

fn fixture(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(rel)
}

/// A fixture chart with its data inlined, as a client would send it.
fn inline_chart(name: &str) -> Value {
    let chart = load_chart_file(&fixture(&format!("charts/{name}.json"))).unwrap();
    serde_json::from_str(&save_chart(&chart)).unwrap()
}

fn read_json(rel: &str) -> Value {
    serde_json::from_str(&std::fs::read_to_string(fixture(rel)).unwrap()).unwrap()
}

async fn call(
    method: &str,
    path: &str,
    body: Option<String>,
) -> (StatusCode, axum::http::HeaderMap, String) {
    let app = router(Arc::new(Compiler::default()));
    let mut req = Request::builder().method(method).uri(path);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req
        .body(body.map(Body::from).unwrap_or_else(Body::empty))
        .unwrap();
    let res = app.oneshot(req).await.unwrap();
    let status = res.status();
    let headers = res.headers().clone();
    let bytes = res.into_body().collect().await.unwrap().to_bytes();
    (status, headers, String::from_utf8(bytes.to_vec()).unwrap())
}

async fn post(path: &str, body: Value) -> (StatusCode, axum::http::HeaderMap, String) {
    call("POST", path, Some(body.to_string())).await
}

fn error_code(body: &str) -> String {
    let v: Value = serde_json::from_str(body).unwrap();
    assert!(v.get("message").is_some() && v.get("details").is_some());
    v["code"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn suggest_matches_the_cli() {
    let body = json!({"version": 1, "chart": inline_chart("seattle"), "trace": read_json("traces/seattle_drag.json")});
    let (status, headers, text) = post("/api/suggest", body).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(headers["content-type"], "application/json");

    let cli = demoviz::cli::run(
        [
            "demoviz",
            "suggest",
            "--chart",
            fixture("charts/seattle.json").to_str().unwrap(),
            "--trace",
            fixture("traces/seattle_drag.json").to_str().unwrap(),
        ],
        std::io::empty(),
    );
    assert_eq!(text, cli.stdout);
    let v: Value = serde_json::from_str(&text).unwrap();
    let default = &v["selections"][v["default_selection"].as_u64().unwrap() as usize];
    assert_eq!(default["type"], "interval");
    assert_eq!(default["encodings"], json!(["x"]));
}

#[tokio::test]
async fn suggest_rejects_bad_input() {
    let (status, _, text) = call("POST", "/api/suggest", Some("{ nope".into())).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&text), "MalformedInput");

    let mut chart = inline_chart("seattle");
    chart["views"] = json!([]);
    let body = json!({"chart": chart, "trace": read_json("traces/seattle_drag.json")});
    let (status, _, text) = post("/api/suggest", body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(error_code(&text), "EmptyChart");

    let body = json!({"chart": inline_chart("seattle"), "trace": []});
    let (status, _, _) = post("/api/suggest", body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let body = json!({"version": 99, "chart": inline_chart("seattle"), "trace": []});
    let (status, _, text) = post("/api/suggest", body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(error_code(&text), "UnsupportedVersion");

    let body = json!({"chart": read_json("charts/seattle.json"), "trace": read_json("traces/seattle_drag.json")});
    let (status, _, _) = post("/api/suggest", body).await;
    assert_eq!(
        status,
        StatusCode::UNPROCESSABLE_ENTITY,
        "url datasets are not fetched by the service"
    );
}

#[tokio::test]
async fn compile_returns_schema_valid_vega_lite() {
    let body = json!({
        "chart": inline_chart("seattle"),
        "interactions": read_json("interactions/seattle_walkthrough.json"),
        "target": "vega-lite"
    });
    let (status, _, text) = post("/api/compile", body).await;
    assert_eq!(status, StatusCode::OK, "{text}");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["target"], "vega-lite");
    let golden: Value = read_json("golden/seattle_walkthrough.vl.json");
    assert_eq!(v["document"], golden);
    let schemas = demoviz_core::SchemaSet::embedded();
    assert!(schemas
        .validate(demoviz_core::Target::VegaLite, &v["document"])
        .is_ok());
}

#[tokio::test]
async fn compile_reports_blockers_with_conflict() {
    let interactions = read_json("interactions/brush_label.json");
    let body = json!({"chart": inline_chart("seattle_labels"), "interactions": interactions, "target": "vega-lite"});
    let (status, _, text) = post("/api/compile", body).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(error_code(&text), "NotExpressible");
    let v: Value = serde_json::from_str(&text).unwrap();
    assert!(v["details"]
        .as_array()
        .unwrap()
        .iter()
        .all(|b| b["code"] == "SignalBinding"));

    let body = json!({"chart": inline_chart("seattle_labels"), "interactions": interactions, "target": "vega"});
    let (status, headers, _) = post("/api/compile", body).await;
    assert_eq!(status, StatusCode::OK);
    assert!(headers.get(FALLBACK_HEADER).is_none());

    let body = json!({"chart": inline_chart("seattle_labels"), "interactions": interactions});
    let (status, headers, text) = post("/api/compile", body).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(headers[FALLBACK_HEADER], "vega");
    assert_eq!(
        serde_json::from_str::<Value>(&text).unwrap()["target"],
        "vega"
    );
}

#[tokio::test]
async fn compile_rejects_invalid_interactions() {
    let body = json!({
        "chart": inline_chart("seattle"),
        "interactions": read_json("interactions/brush_label.json"),
        "target": "vega"
    });
    let (status, _, text) = post("/api/compile", body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(error_code(&text), "ValidationFailed");

    let body =
        json!({"chart": inline_chart("seattle"), "interactions": {"version": 1, "bogus": []}});
    let (status, _, _) = post("/api/compile", body).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn widgets_mirror_the_library() {
    let body = json!({"chart": inline_chart("seattle"), "field": "weather"});
    let (status, _, text) = post("/api/widgets", body).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_str(&text).unwrap();
    let kinds: Vec<&str> = v["widgets"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["widget"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["radio", "select"]);

    let body = json!({"chart": inline_chart("seattle"), "field": "nope"});
    let (status, _, text) = post("/api/widgets", body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(error_code(&text), "UnknownField");
}

#[tokio::test]
async fn health_reports_version_and_fingerprints() {
    let (status, _, text) = call("GET", "/api/health", None).await;
    assert_eq!(status, StatusCode::OK);
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["version"], 1);
    assert_eq!(v["schemas"].as_object().unwrap().len(), 2);
}

#[tokio::test]
async fn cors_preflight_is_answered() {
    let app = router(Arc::new(Compiler::default()));
    let req = Request::builder()
        .method("OPTIONS")
        .uri("/api/compile")
        .header("origin", "http://localhost:5173")
        .header("access-control-request-method", "POST")
        .body(Body::empty())
        .unwrap();
    let res = app.oneshot(req).await.unwrap();
    assert!(res.status().is_success());
    assert!(res.headers().contains_key("access-control-allow-origin"));
}

#[tokio::test]
async fn responses_do_not_depend_on_request_order() {
    let requests = vec![
        (
            "/api/widgets",
            json!({"chart": inline_chart("seattle"), "field": "temp_max"}),
        ),
        (
            "/api/suggest",
            json!({"chart": inline_chart("seattle"), "trace": read_json("traces/seattle_drag.json")}),
        ),
        (
            "/api/compile",
            json!({"chart": inline_chart("cars"), "interactions": read_json("interactions/point_select.json"), "target": "vega"}),
        ),
    ];
    let mut forward = Vec::new();
    for (path, body) in &requests {
        forward.push(post(path, body.clone()).await.2);
    }
    let mut backward = Vec::new();
    for (path, body) in requests.iter().rev() {
        backward.push(post(path, body.clone()).await.2);
    }
    backward.reverse();
    assert_eq!(forward, backward);
}
