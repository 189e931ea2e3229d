//! Stateless HTTP JSON service over the solver.
//!
//! | route            | body / query                          |
//! |------------------|---------------------------------------|
//! | `POST /solve`    | `{points, tol?, topK?}`               |
//! | `POST /trace`    | `{pathStart, pathEnd, samples?}`      |
//! | `POST /wall`     | `{pathStart, pathEnd, tol?}`          |
//! | `GET /types/{n}` | `?full=bool`                          |
//! | `GET /healthz`   |                                       |

use std::net::SocketAddr;
use std::time::Instant;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Map, Value};
use tower_http::cors::{AllowOrigin, CorsLayer};

use steiner_core::ambiguity::{find_wall, trace_path, WallOptions};
use steiner_core::format::{ConfigFile, PathTraceJson, SolveResultJson, TypeEntryJson, WallHitJson};
use steiner_core::geom::LENGTH_EPS;
use steiner_core::solver::solve_with;
use steiner_core::topology::{enumerate_full_types_with_cap, enumerate_types_with_cap, DEFAULT_TYPE_CAP};
use steiner_core::{Configuration, Error, SolveOptions};

pub const DEFAULT_PORT: u16 = 7463;

/// Read once at startup and shared by every request.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AppState {
    pub cap: usize,
}

impl Default for AppState {
    fn default() -> Self {
        AppState { cap: DEFAULT_TYPE_CAP }
    }
}

/// Error body: `{"error": message, "field": name}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    field: Option<&'static str>,
}

impl ApiError {
    fn bad(field: &'static str, message: impl Into<String>) -> Self {
        ApiError { status: StatusCode::BAD_REQUEST, message: message.into(), field: Some(field) }
    }

    fn from_core(e: Error, field: &'static str) -> Self {
        let status = match e {
            Error::LimitExceeded { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            Error::DegenerateInput(_) | Error::Precondition(_) | Error::InvalidType(_) | Error::DegeneratePath { .. } => {
                StatusCode::BAD_REQUEST
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let field = (status == StatusCode::BAD_REQUEST).then_some(field);
        ApiError { status, message: e.to_string(), field }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(f) = self.field {
            body["field"] = json!(f);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn object(body: &[u8]) -> ApiResult<Map<String, Value>> {
    match serde_json::from_slice::<Value>(body) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(ApiError::bad("body", "expected a JSON object")),
        Err(e) => Err(ApiError::bad("body", format!("invalid JSON: {e}"))),
    }
}

fn field<T: DeserializeOwned>(m: &Map<String, Value>, name: &'static str) -> ApiResult<Option<T>> {
    match m.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(v) => T::deserialize(v).map(Some).map_err(|e| ApiError::bad(name, e.to_string())),
    }
}

fn required<T: DeserializeOwned>(m: &Map<String, Value>, name: &'static str) -> ApiResult<T> {
    field(m, name)?.ok_or_else(|| ApiError::bad(name, format!("missing field `{name}`")))
}

fn configuration(m: &Map<String, Value>, name: &'static str) -> ApiResult<Configuration> {
    let points: Vec<[f64; 2]> = required(m, name)?;
    ConfigFile { points, labels: None }
        .to_configuration()
        .map_err(|e| ApiError::from_core(e, name))
}

fn tolerance(m: &Map<String, Value>, default: f64) -> ApiResult<f64> {
    match field::<f64>(m, "tol")? {
        None => Ok(default),
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) => Err(ApiError::bad("tol", format!("tolerance must be positive, got {t}"))),
    }
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        message: e.to_string(),
        field: None,
    })?
}

async fn solve_handler(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<SolveResultJson>> {
    let m = object(&body)?;
    let p = configuration(&m, "points")?;
    let tie_tolerance = tolerance(&m, LENGTH_EPS)?;
    let top_k: Option<usize> = field(&m, "topK")?;
    let n = p.len();
    let start = Instant::now();
    let out = blocking(move || {
        let r = solve_with(&p, &SolveOptions { tie_tolerance, cap: state.cap })
            .map_err(|e| ApiError::from_core(e, "points"))?;
        Ok(SolveResultJson::new(&r, top_k, true))
    })
    .await?;
    tracing::info!(n, elapsed_ms = start.elapsed().as_secs_f64() * 1e3, "solve");
    Ok(Json(out))
}

fn path_ends(m: &Map<String, Value>) -> ApiResult<(Configuration, Configuration)> {
    let a = configuration(m, "pathStart")?;
    let b = configuration(m, "pathEnd")?;
    if a.len() != b.len() {
        return Err(ApiError::bad("pathEnd", format!("{} points, pathStart has {}", b.len(), a.len())));
    }
    Ok((a, b))
}

const DEFAULT_SAMPLES: usize = 256;
const MAX_SAMPLES: usize = 4096;

async fn trace_handler(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<PathTraceJson>> {
    let m = object(&body)?;
    let (a, b) = path_ends(&m)?;
    let samples = field::<usize>(&m, "samples")?.unwrap_or(DEFAULT_SAMPLES);
    if !(2..=MAX_SAMPLES).contains(&samples) {
        return Err(ApiError::bad("samples", format!("samples must be in 2..={MAX_SAMPLES}, got {samples}")));
    }
    if a.len() > state.cap {
        return Err(ApiError::from_core(Error::LimitExceeded { n: a.len(), cap: state.cap }, "pathStart"));
    }
    blocking(move || {
        let tr = trace_path(&a, &b, samples).map_err(|e| ApiError::from_core(e, "pathEnd"))?;
        Ok(Json(PathTraceJson::from(&tr)))
    })
    .await
}

async fn wall_handler(body: Bytes) -> ApiResult<Json<Value>> {
    let m = object(&body)?;
    let (a, b) = path_ends(&m)?;
    let opts = WallOptions { wall_tolerance: tolerance(&m, WallOptions::default().wall_tolerance)?, ..Default::default() };
    blocking(move || match find_wall(&a, &b, None, &opts) {
        Ok(hit) => Ok(Json(serde_json::to_value(WallHitJson::from(&hit)).expect("serializable"))),
        Err(Error::NoWall) => Ok(Json(json!({ "noWall": true }))),
        Err(e) => Err(ApiError::from_core(e, "pathEnd")),
    })
    .await
}

#[derive(Debug, Deserialize)]
struct TypesQuery {
    #[serde(default)]
    full: bool,
}

async fn types_handler(
    State(state): State<AppState>,
    Path(n): Path<usize>,
    Query(q): Query<TypesQuery>,
) -> ApiResult<Json<Vec<TypeEntryJson>>> {
    if n < 2 {
        return Err(ApiError::bad("n", format!("need at least 2 terminals, got {n}")));
    }
    blocking(move || {
        let types = if q.full {
            enumerate_full_types_with_cap(n, state.cap)
        } else {
            enumerate_types_with_cap(n, state.cap)
        }
        .map_err(|e| ApiError::from_core(e, "n"))?;
        Ok(Json(types.iter().map(TypeEntryJson::from).collect()))
    })
    .await
}

async fn healthz() -> &'static str {
    "ok"
}

fn is_local(origin: &HeaderValue) -> bool {
    let Ok(o) = origin.to_str() else { return false };
    let host = o.strip_prefix("http://").or_else(|| o.strip_prefix("https://")).unwrap_or("");
    let host = host.rsplit_once(':').map_or(host, |(h, port)| {
        if port.chars().all(|c| c.is_ascii_digit()) { h } else { host }
    });
    matches!(host, "localhost" | "127.0.0.1" | "[::1]")
}

/// The service routes; `cors` allows browser requests from localhost origins.
pub fn router(state: AppState, cors: bool) -> Router {
    let app = Router::new()
        .route("/solve", post(solve_handler))
        .route("/trace", post(trace_handler))
        .route("/wall", post(wall_handler))
        .route("/types/{n}", get(types_handler))
        .route("/healthz", get(healthz))
        .with_state(state);
    if cors {
        app.layer(
            CorsLayer::new()
                .allow_origin(AllowOrigin::predicate(|o, _| is_local(o)))
                .allow_methods([Method::GET, Method::POST])
                .allow_headers([header::CONTENT_TYPE]),
        )
    } else {
        app
    }
}

/// Binds `port` on localhost and serves until the process ends.
pub async fn serve(port: u16, state: AppState, cors: bool) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, cap = state.cap, cors, "listening");
    axum::serve(listener, router(state, cors)).await
}
