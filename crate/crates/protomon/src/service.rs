//! REST facade over the monitor: create a session from a spec, feed it
//! events, read its status, tear it down.
//!
//! Routes:
//!
//! | method | path                  | effect                                   |
//! |--------|-----------------------|------------------------------------------|
//! | POST   | `/monitors`           | body = spec text; 201 `{"id":…}`         |
//! | POST   | `/monitors/:id/events`| body = event JSON; 200 verdict response   |
//! | GET    | `/monitors/:id`       | 200 session summary                      |
//! | DELETE | `/monitors/:id`       | 200 acknowledgment                       |
//!
//! A violation is a *successful* verdict, reported with status 200 and
//! `"violation": true`; 4xx is reserved for transport-level problems
//! (unreadable bodies, unknown ids, invalid specs). Sessions live in
//! memory only. Submissions to one session are serialized; its
//! `event_index` values are consecutive from 1 with no gaps.

use std::collections::HashMap;
use std::io;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, Request, State};
use axum::http::StatusCode;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Json, Response};
use axum::routing::{get, post};
use axum::Router;
use serde_json::json;
use tokio::sync::oneshot;

use crate::event::Event;
use crate::monitor::{MonitorState, Verdict};
use crate::syntax::{CompileError, Spec};

pub const DEFAULT_LISTEN: &str = "127.0.0.1:8087";

struct Session {
    spec: Arc<Spec>,
    state: MonitorState,
    created_at_unix: u64,
    log: Vec<(Event, Verdict)>,
    /// Index and echo of the event that first latched the violation.
    first_violation: Option<(u64, Event)>,
}

pub struct AppState {
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    next_id: AtomicU64,
}

pub struct SubmitOutcome {
    pub verdict: Verdict,
    pub event_index: u64,
    pub first_violation: Option<(u64, Event)>,
}

impl AppState {
    pub fn new() -> Arc<AppState> {
        Arc::new(AppState {
            sessions: Mutex::new(HashMap::new()),
            next_id: AtomicU64::new(1),
        })
    }

    /// Compiles the spec and allocates a session. Ids are opaque but
    /// unique for the lifetime of the process.
    pub fn create(&self, spec_text: &str) -> Result<String, CompileError> {
        let spec = Spec::compile(spec_text)?;
        let state = MonitorState::new(&spec);
        let id = format!("m-{}", self.next_id.fetch_add(1, Ordering::Relaxed));
        let session = Session {
            spec: Arc::new(spec),
            state,
            created_at_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .unwrap_or_default()
                .as_secs(),
            log: Vec::new(),
            first_violation: None,
        };
        self.sessions
            .lock()
            .unwrap()
            .insert(id.clone(), Arc::new(Mutex::new(session)));
        Ok(id)
    }

    fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.lock().unwrap().get(id).cloned()
    }

    /// Applies one event; `None` means the id does not resolve.
    pub fn submit(&self, id: &str, event: Event) -> Option<SubmitOutcome> {
        let session = self.session(id)?;
        let mut session = session.lock().unwrap();
        let spec = Arc::clone(&session.spec);
        let verdict = session.state.step(&spec, &event);
        let event_index = session.state.events_consumed();
        if verdict.is_violation() && session.first_violation.is_none() {
            session.first_violation = Some((event_index, event.clone()));
        }
        session.log.push((event, verdict));
        debug_assert_eq!(session.log.len() as u64, event_index);
        Some(SubmitOutcome {
            verdict,
            event_index,
            first_violation: session.first_violation.clone(),
        })
    }

    pub fn info(&self, id: &str) -> Option<serde_json::Value> {
        let session = self.session(id)?;
        let session = session.lock().unwrap();
        let spec = Arc::clone(&session.spec);
        Some(json!({
            "id": id,
            "event_index": session.state.events_consumed(),
            "violation": session.state.is_latched(),
            "verdict": session.state.current_verdict(&spec),
            "created_at_unix": session.created_at_unix,
        }))
    }

    pub fn remove(&self, id: &str) -> bool {
        self.sessions.lock().unwrap().remove(id).is_some()
    }
}

fn error_body(message: &str) -> Json<serde_json::Value> {
    Json(json!({ "error": message }))
}

async fn create_monitor(State(app): State<Arc<AppState>>, body: String) -> Response {
    if body.trim().is_empty() {
        return (StatusCode::BAD_REQUEST, error_body("empty spec")).into_response();
    }
    match app.create(&body) {
        Ok(id) => (StatusCode::CREATED, Json(json!({ "id": id }))).into_response(),
        Err(CompileError::Parse(e)) => (
            StatusCode::UNPROCESSABLE_ENTITY,
            Json(json!({ "errors": [e] })),
        )
            .into_response(),
        Err(CompileError::Validate(errors)) => (
            StatusCode::UNPROCESSABLE_ENTITY,
            Json(json!({ "errors": errors })),
        )
            .into_response(),
    }
}

async fn submit_event(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> Response {
    let json: serde_json::Value = match serde_json::from_slice(&body) {
        Ok(v) => v,
        Err(e) => {
            return (
                StatusCode::BAD_REQUEST,
                error_body(&format!("invalid JSON: {e}")),
            )
                .into_response()
        }
    };
    let event = match Event::from_json_value(&json) {
        Ok(e) => e,
        Err(e) => return (StatusCode::BAD_REQUEST, error_body(&e.to_string())).into_response(),
    };
    let Some(outcome) = app.submit(&id, event) else {
        return (StatusCode::NOT_FOUND, error_body("unknown monitor")).into_response();
    };
    let mut body = json!({
        "verdict": outcome.verdict,
        "event_index": outcome.event_index,
        "violation": outcome.verdict.is_violation(),
    });
    if let Some((index, event)) = outcome.first_violation {
        if outcome.verdict.is_violation() {
            body["violation_index"] = json!(index);
            body["event"] = event.to_json_value();
        }
    }
    (StatusCode::OK, Json(body)).into_response()
}

async fn get_monitor(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    match app.info(&id) {
        Some(info) => (StatusCode::OK, Json(info)).into_response(),
        None => (StatusCode::NOT_FOUND, error_body("unknown monitor")).into_response(),
    }
}

async fn delete_monitor(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Response {
    if app.remove(&id) {
        (StatusCode::OK, Json(json!({ "id": id, "deleted": true }))).into_response()
    } else {
        (StatusCode::NOT_FOUND, error_body("unknown monitor")).into_response()
    }
}

async fn log_requests(request: Request, next: Next) -> Response {
    let method = request.method().clone();
    let path = request.uri().path().to_string();
    let response = next.run(request).await;
    println!(
        "{}",
        json!({
            "method": method.as_str(),
            "path": path,
            "status": response.status().as_u16(),
        })
    );
    response
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/monitors", post(create_monitor))
        .route("/monitors/:id/events", post(submit_event))
        .route("/monitors/:id", get(get_monitor).delete(delete_monitor))
        .layer(middleware::from_fn(log_requests))
        .with_state(app)
}

/// A running service with its actual bound address; shuts down when
/// dropped. Bind to port 0 to let the OS pick a free port.
pub struct ServiceHandle {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    join: Option<thread::JoinHandle<()>>,
}

impl ServiceHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn base_url(&self) -> String {
        format!("http://{}", self.addr)
    }
}

impl Drop for ServiceHandle {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(join) = self.join.take() {
            let _ = join.join();
        }
    }
}

/// Starts the service on a background thread with its own runtime.
pub fn start_background(listen: &str) -> io::Result<ServiceHandle> {
    let listener = std::net::TcpListener::bind(listen)?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel::<()>();
    let join = thread::spawn(move || {
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .expect("tokio runtime");
        runtime.block_on(async move {
            let listener = tokio::net::TcpListener::from_std(listener).expect("listener");
            let app = AppState::new();
            axum::serve(listener, router(app))
                .with_graceful_shutdown(async {
                    let _ = rx.await;
                })
                .await
                .expect("serve");
        });
    });
    Ok(ServiceHandle {
        addr,
        shutdown: Some(tx),
        join: Some(join),
    })
}

/// Runs the service on the current thread until the process ends.
pub fn run_forever(listen: &str) -> io::Result<()> {
    let listener = std::net::TcpListener::bind(listen)?;
    listener.set_nonblocking(true)?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::from_std(listener)?;
        let app = AppState::new();
        axum::serve(listener, router(app)).await
    })
}
