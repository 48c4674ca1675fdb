//! HTTP/JSON front end for a single [`Session`].
//!
//! Requests are applied one at a time under a mutex, so concurrent clients see
//! the same sequential semantics as a scripted command stream.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::Value;

use crate::api::{ApiError, ApiResult, Session, Verb};

pub type SharedSession = Arc<Mutex<Session>>;

pub const PORT_ENV: &str = "GROCERY_MEMORY_PORT";
pub const DEFAULT_PORT: u16 = 8080;

struct Reply(ApiResult);

impl IntoResponse for Reply {
    fn into_response(self) -> Response {
        match self.0 {
            Ok(v) => (StatusCode::OK, Json(v)).into_response(),
            Err(e) => {
                let status = StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
                (status, Json(e.to_json())).into_response()
            }
        }
    }
}

fn with_session<F>(session: &SharedSession, f: F) -> Reply
where
    F: FnOnce(&mut Session) -> ApiResult,
{
    match session.lock() {
        Ok(mut guard) => Reply(f(&mut guard)),
        Err(_) => Reply(Err(ApiError {
            kind: crate::api::ErrorKind::Internal,
            message: "session lock poisoned".into(),
        })),
    }
}

fn body_json(body: &Bytes) -> Result<Value, ApiError> {
    if body.iter().all(u8::is_ascii_whitespace) {
        return Ok(Value::Null);
    }
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("invalid JSON body: {e}")))
}

fn command(session: &SharedSession, verb: Verb, body: &Bytes) -> Reply {
    match body_json(body) {
        Ok(payload) => with_session(session, |s| s.execute(verb, &payload)),
        Err(e) => Reply(Err(e)),
    }
}

pub fn router(session: SharedSession) -> Router {
    macro_rules! post_verb {
        ($verb:expr) => {
            post(|State(s): State<SharedSession>, body: Bytes| async move { command(&s, $verb, &body) })
        };
    }
    Router::new()
        .route(
            "/state",
            get(|State(s): State<SharedSession>| async move { with_session(&s, |s| Ok(s.state())) }),
        )
        .route(
            "/missing",
            get(|State(s): State<SharedSession>| async move { with_session(&s, |s| Ok(s.missing())) }),
        )
        .route("/teach", post_verb!(Verb::Teach))
        .route("/learn", post_verb!(Verb::Learn))
        .route("/visit", post_verb!(Verb::Visit))
        .route("/event", post_verb!(Verb::Event))
        .route("/report", post_verb!(Verb::Report))
        .route("/grocery-list", post_verb!(Verb::GroceryDiff))
        .route("/reset", post_verb!(Verb::Reset))
        .with_state(session)
}

pub async fn serve(session: Session, addr: SocketAddr) -> std::io::Result<()> {
    let app = router(Arc::new(Mutex::new(session)));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
