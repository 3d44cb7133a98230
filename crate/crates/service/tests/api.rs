mod common;

use std::sync::Arc;
use std::time::Duration;

use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use mocs_core::Resources;
use mocs_service::api::router;
use mocs_service::artifacts::ArtifactStore;
use mocs_service::jobs::{JobManager, JobState};
use mocs_service::runner::Runner;
use serde_json::{json, Value};
use tempfile::TempDir;
use tower::ServiceExt;

struct Harness {
    dir: TempDir,
    jobs: Arc<JobManager>,
    app: Router,
}

fn harness(n_docs: usize) -> Harness {
    let dir = tempfile::tempdir().unwrap();
    let store = common::ingested_store(dir.path(), n_docs, 11);
    let runner = Runner::new(Arc::new(store), Resources::bundled(), ArtifactStore::new(dir.path().join("artifacts")));
    let jobs = Arc::new(JobManager::new(runner, 2));
    let app = router(Arc::clone(&jobs));
    Harness { dir, jobs, app }
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(b) => req.header("content-type", "application/json").body(Body::from(b.to_string())),
        None => req.body(Body::empty()),
    }
    .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    (status, to_bytes(resp.into_body(), usize::MAX).await.unwrap().to_vec())
}

async fn call_json(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let (status, bytes) = call(app, method, uri, body).await;
    (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
}

/// Polls the job endpoint until the job finishes.
async fn finish(app: &Router, job_id: &str) -> Value {
    for _ in 0..600 {
        let (status, job) = call_json(app, "GET", &format!("/api/jobs/{job_id}"), None).await;
        assert_eq!(status, StatusCode::OK);
        if job["state"] == "done" || job["state"] == "failed" {
            return job;
        }
        tokio::time::sleep(Duration::from_millis(50)).await;
    }
    panic!("job {job_id} did not finish");
}

async fn submitted(app: &Router, uri: &str, body: Value) -> String {
    let (status, resp) = call_json(app, "POST", uri, Some(body)).await;
    assert_eq!(status, StatusCode::ACCEPTED, "{resp}");
    resp["job_id"].as_str().unwrap().to_string()
}

#[tokio::test]
async fn basemap_then_heatmap_round_trip() {
    let h = harness(400);
    let id = submitted(&h.app, "/api/basemaps", json!({"filter": {}, "seed": 7})).await;
    let job = finish(&h.app, &id).await;
    assert_eq!(job["state"], "done", "{job}");
    assert_eq!(job["kind"], "basemap");
    let svg_url = job["result"]["urls"]["svg"].as_str().unwrap();
    assert_eq!(svg_url, format!("/api/basemaps/{id}.svg"));

    let (status, svg) = call(&h.app, "GET", svg_url, None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(svg).unwrap().contains("<g id=\"countries\""));
    let (status, terms) = call_json(&h.app, "GET", &format!("/api/basemaps/{id}/terms.json"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(!terms["terms"].as_array().unwrap().is_empty());
    let (status, map) = call_json(&h.app, "GET", &format!("/api/basemaps/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(map["seed"], 7);

    let hm = submitted(&h.app, &format!("/api/basemaps/{id}/heatmaps"), json!({"filter": {"author": "Jim Gray"}})).await;
    let job = finish(&h.app, &hm).await;
    assert_eq!(job["state"], "done", "{job}");
    assert_eq!(job["basemap_id"], id.as_str());
    let (status, svg) = call(&h.app, "GET", &format!("/api/heatmaps/{hm}.svg"), None).await;
    assert_eq!(status, StatusCode::OK);
    assert!(String::from_utf8(svg).unwrap().contains("<g id=\"heatmap\""));
    let (status, overlay) = call_json(&h.app, "GET", &format!("/api/heatmaps/{hm}/intensities.json"), None).await;
    assert_eq!(status, StatusCode::OK);
    let max = overlay["entries"].as_array().unwrap().iter().map(|e| e["I_hat"].as_f64().unwrap()).fold(0.0, f64::max);
    assert_eq!(max, 1.0);

    let text = submitted(
        &h.app,
        &format!("/api/basemaps/{id}/heatmaps"),
        json!({"text": "We study query optimization for a relational database and its transaction throughput."}),
    )
    .await;
    assert_eq!(finish(&h.app, &text).await["state"], "done");
}

#[tokio::test]
async fn invalid_requests_are_rejected_with_fields() {
    let h = harness(20);
    let (status, body) = call_json(&h.app, "POST", "/api/basemaps", Some(json!({"filtering": {"k": 0}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["fields"][0]["field"], "filtering.k");
    let (status, body) = call_json(&h.app, "POST", "/api/basemaps", Some(json!({"ranking": "pagerank"}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["fields"][0]["field"], "ranking");
    let (status, body) = call_json(&h.app, "POST", "/api/basemaps", Some(json!({"distance": {"sigma": 1.5}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["fields"][0]["field"], "distance.sigma");
    let (status, body) =
        call_json(&h.app, "POST", "/api/basemaps", Some(json!({"filter": {"year_range": [2010, 2000]}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["fields"][0]["field"], "filter.year_range");
    let (status, _) = call(&h.app, "POST", "/api/basemaps/0123456789abcdef/heatmaps", Some(json!({"text": "x"}))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&h.app, "GET", "/api/jobs/ffff", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&h.app, "GET", "/api/basemaps/0123456789abcdef.svg", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn heatmap_needs_exactly_one_target() {
    let h = harness(60);
    let id = submitted(&h.app, "/api/basemaps", json!({})).await;
    assert_eq!(finish(&h.app, &id).await["state"], "done");
    let uri = format!("/api/basemaps/{id}/heatmaps");
    let (status, body) = call_json(&h.app, "POST", &uri, Some(json!({}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["fields"][0]["field"], "target");
    let (status, body) = call_json(&h.app, "POST", &uri, Some(json!({"text": "a", "filter": {}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["fields"][0]["field"], "target");
    let (status, body) = call_json(&h.app, "POST", &uri, Some(json!({"text": "a", "params": {"beta": 0}}))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["fields"][0]["field"], "params.beta");
}

#[tokio::test]
async fn empty_query_fails_the_job() {
    let h = harness(20);
    let id = submitted(&h.app, "/api/basemaps", json!({"filter": {"venue": "Nowhere"}})).await;
    let job = finish(&h.app, &id).await;
    assert_eq!(job["state"], "failed");
    assert!(job["error"].as_str().unwrap().contains("empty corpus"), "{job}");
    assert!(job.get("result").is_none());
    assert!(!h.dir.path().join("artifacts/basemaps").join(&id).exists());
}

#[tokio::test]
async fn overlay_without_matches_is_done_with_warning() {
    let h = harness(60);
    let id = submitted(&h.app, "/api/basemaps", json!({})).await;
    assert_eq!(finish(&h.app, &id).await["state"], "done");
    let hm = submitted(&h.app, &format!("/api/basemaps/{id}/heatmaps"), json!({"filter": {"author": "Nobody"}})).await;
    let job = finish(&h.app, &hm).await;
    assert_eq!(job["state"], "done");
    assert!(!job["warnings"].as_array().unwrap().is_empty(), "{job}");
}

#[tokio::test]
async fn decade_series_shares_coordinates() {
    let h = harness(400);
    let id = submitted(&h.app, "/api/basemaps", json!({})).await;
    assert_eq!(finish(&h.app, &id).await["state"], "done");
    let ranges = [(1990, 1993), (1994, 1997), (1998, 2001), (2002, 2005), (2006, 2009), (2010, 2013)];
    let mut overlays = Vec::new();
    for (lo, hi) in ranges {
        let body = json!({"filter": {"year_range": [lo, hi]}});
        let hm = submitted(&h.app, &format!("/api/basemaps/{id}/heatmaps"), body).await;
        assert_eq!(finish(&h.app, &hm).await["state"], "done");
        let (_, overlay) = call_json(&h.app, "GET", &format!("/api/heatmaps/{hm}/intensities.json"), None).await;
        overlays.push(overlay);
    }
    let (_, terms) = call_json(&h.app, "GET", &format!("/api/basemaps/{id}/terms.json"), None).await;
    let anchor = |surface: &str| {
        let t = terms["terms"].as_array().unwrap().iter().find(|t| t["surface"] == surface).unwrap();
        (t["x"].as_f64().unwrap(), t["y"].as_f64().unwrap())
    };
    for overlay in &overlays {
        assert_eq!(overlay["basemap_id"], id.as_str());
        for e in overlay["entries"].as_array().unwrap() {
            assert_eq!((e["x"].as_f64().unwrap(), e["y"].as_f64().unwrap()), anchor(e["surface"].as_str().unwrap()));
        }
    }
}

#[tokio::test]
async fn resubmission_reuses_the_job() {
    let h = harness(60);
    let a = submitted(&h.app, "/api/basemaps", json!({"seed": 3})).await;
    let b = submitted(&h.app, "/api/basemaps", json!({"seed": 3, "filter": {}})).await;
    assert_eq!(a, b);
    let c = submitted(&h.app, "/api/basemaps", json!({"seed": 4})).await;
    assert_ne!(a, c);
    let job = h.jobs.wait(&a, Duration::from_secs(60)).unwrap();
    assert_eq!(job.state, JobState::Done);
}

#[tokio::test]
async fn typeahead_and_stats() {
    let h = harness(40);
    let (status, stats) = call_json(&h.app, "GET", "/api/corpus/stats", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(stats["n_documents"], 40);
    assert_eq!(stats["n_journals"], 4);
    let (status, venues) = call_json(&h.app, "GET", "/api/venues?q=TVC", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(venues[0]["name"], "TVCG");
    let (_, authors) = call_json(&h.app, "GET", "/api/authors?q=Jim&limit=5", None).await;
    assert_eq!(authors[0]["name"], "Jim Gray");
    let (_, none) = call_json(&h.app, "GET", "/api/venues?q=zzz", None).await;
    assert_eq!(none, json!([]));
}
