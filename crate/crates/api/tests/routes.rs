use axum::body::Body;
use axum::http::{header, Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use steiner_api::{router, AppState};
use steiner_core::format::{PathTraceJson, SolveResultJson, TypeEntryJson, WallHitJson};

const SQRT3: f64 = 1.732_050_807_568_877_2;

async fn send(req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let resp = router(AppState::default(), true).oneshot(req).await.unwrap();
    let status = resp.status();
    (status, resp.into_body().collect().await.unwrap().to_bytes().to_vec())
}

async fn post(uri: &str, body: Value) -> (StatusCode, Value) {
    post_raw(uri, body.to_string()).await
}

async fn post_raw(uri: &str, body: String) -> (StatusCode, Value) {
    let req = Request::post(uri).header(header::CONTENT_TYPE, "application/json").body(Body::from(body)).unwrap();
    let (s, b) = send(req).await;
    (s, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

async fn get(uri: &str) -> (StatusCode, Vec<u8>) {
    send(Request::get(uri).body(Body::empty()).unwrap()).await
}

fn square() -> Value {
    json!([[0, 0], [1, 0], [1, 1], [0, 1]])
}

#[tokio::test]
async fn healthz() {
    let (s, b) = get("/healthz").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(b, b"ok");
}

#[tokio::test]
async fn solve_square() {
    let (s, v) = post("/solve", json!({ "points": square() })).await;
    assert_eq!(s, StatusCode::OK);
    let r: SolveResultJson = serde_json::from_value(v).unwrap();
    assert!(r.ambiguous);
    assert_eq!(r.minimal.len(), 2);
    for c in &r.minimal {
        assert!((c.length - (1.0 + SQRT3)).abs() < 1e-9);
        let dirs = c.directions.as_ref().expect("directions included");
        assert_eq!(dirs.len(), 4);
        for d in dirs.values().flatten() {
            assert!((d[0].hypot(d[1]) - 1.0).abs() < 1e-12);
        }
    }
    assert!(r.candidates.windows(2).all(|w| w[0].length <= w[1].length));
}

#[tokio::test]
async fn solve_truncates_to_top_k() {
    let (s, v) = post("/solve", json!({ "points": [[0, 0], [3, 0.2], [1.4, 1.1], [0.3, 2.4]], "topK": 1 })).await;
    assert_eq!(s, StatusCode::OK);
    let r: SolveResultJson = serde_json::from_value(v).unwrap();
    assert_eq!(r.candidates.len(), 1);
    assert!(r.total_candidates > 1);
}

#[tokio::test]
async fn solve_validation() {
    let (s, v) = post("/solve", json!({ "points": [[0, 0]] })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "points");

    let (s, v) = post("/solve", json!({ "points": [[0, 0], [1, 1], [0, 0]] })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert!(v["error"].as_str().unwrap().contains("0 and 2"), "{v}");

    let (s, v) = post("/solve", json!({ "points": square(), "tol": -1 })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "tol");

    let (s, v) = post("/solve", json!({ "points": square(), "topK": "two" })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "topK");

    let (s, v) = post_raw("/solve", "{not json".into()).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "body");
}

#[tokio::test]
async fn solve_over_the_cap() {
    let points: Vec<[f64; 2]> = (0..12).map(|i| [i as f64, (i * i) as f64 * 0.1]).collect();
    let (s, v) = post("/solve", json!({ "points": points })).await;
    assert_eq!(s, StatusCode::UNPROCESSABLE_ENTITY);
    assert!(v["error"].is_string());
}

#[tokio::test]
async fn wall_on_the_rectangle_path() {
    let body = json!({
        "pathStart": [[0, 0], [1.2, 0], [1.2, 1], [0, 1]],
        "pathEnd": [[0, 0], [1, 0], [1, 1.2], [0, 1.2]],
    });
    let (s, v) = post("/wall", body).await;
    assert_eq!(s, StatusCode::OK);
    let hit: WallHitJson = serde_json::from_value(v).unwrap();
    assert!((hit.t_star - 0.5).abs() < 1e-8);
    assert!(hit.gap < 1e-10);
}

#[tokio::test]
async fn trace_through_the_square() {
    let body = json!({
        "pathStart": [[0, 0], [1.2, 0], [1.2, 1], [0, 1]],
        "pathEnd": [[0, 0], [1, 0], [1, 1.2], [0, 1.2]],
        "samples": 64,
    });
    let (s, v) = post("/trace", body).await;
    assert_eq!(s, StatusCode::OK);
    let tr: PathTraceJson = serde_json::from_value(v).unwrap();
    assert_eq!(tr.samples.len(), 64);
    assert_eq!(tr.events.len(), 1);
    assert!(tr.events[0][0] <= 0.5 && 0.5 <= tr.events[0][1]);

    let (s, v) = post("/trace", json!({ "pathStart": square(), "pathEnd": square(), "samples": 1 })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "samples");
}

#[tokio::test]
async fn wall_without_a_winner_change() {
    let body = json!({
        "pathStart": [[0, 0], [2, 0], [2, 1], [0, 1]],
        "pathEnd": [[0, 0], [1.5, 0], [1.5, 1], [0, 1]],
    });
    let (s, v) = post("/wall", body).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(v, json!({ "noWall": true }));
}

#[tokio::test]
async fn wall_malformed() {
    let (s, v) = post("/wall", json!({ "pathStart": square() })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "pathEnd");

    let (s, v) = post("/wall", json!({ "pathStart": square(), "pathEnd": [[0, 0], [1, 0], [1, 1]] })).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
    assert_eq!(v["field"], "pathEnd");

    let (s, _) = post("/wall", json!([1, 2, 3])).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn types_listing() {
    let (s, b) = get("/types/3").await;
    assert_eq!(s, StatusCode::OK);
    let all: Vec<TypeEntryJson> = serde_json::from_slice(&b).unwrap();
    assert_eq!(all.len(), 4);

    let (_, b) = get("/types/3?full=true").await;
    let full: Vec<TypeEntryJson> = serde_json::from_slice(&b).unwrap();
    assert_eq!(full.len(), 1);
    assert_eq!(full[0].ty.steiner, 1);

    let (_, b) = get("/types/5?full=true").await;
    assert_eq!(serde_json::from_slice::<Vec<Value>>(&b).unwrap().len(), 15);

    assert_eq!(get("/types/20").await.0, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(get("/types/1").await.0, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn responses_do_not_depend_on_request_order() {
    let a = json!({ "points": square() });
    let b = json!({ "points": [[0, 0], [1, 0], [0.5, 0.8660254037844386]] });
    let first = (post("/solve", a.clone()).await, post("/solve", b.clone()).await);
    let second = (post("/solve", b).await, post("/solve", a).await);
    assert_eq!(first.0, second.1);
    assert_eq!(first.1, second.0);
}

#[tokio::test]
async fn cors_allows_localhost_only() {
    let preflight = |origin: &'static str| {
        Request::builder()
            .method("OPTIONS")
            .uri("/solve")
            .header(header::ORIGIN, origin)
            .header(header::ACCESS_CONTROL_REQUEST_METHOD, "POST")
            .body(Body::empty())
            .unwrap()
    };
    let app = router(AppState::default(), true);
    let ok = app.clone().oneshot(preflight("http://localhost:5173")).await.unwrap();
    assert_eq!(ok.headers()[header::ACCESS_CONTROL_ALLOW_ORIGIN], "http://localhost:5173");
    let other = app.oneshot(preflight("http://example.com")).await.unwrap();
    assert!(other.headers().get(header::ACCESS_CONTROL_ALLOW_ORIGIN).is_none());
}
