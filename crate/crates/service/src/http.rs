//! axum front end: every path goes through `KnowledgePlane::handle`.

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Body as AxumBody;
use axum::extract::{Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::IntoResponse;
use axum::Router;
use bytes::Bytes;
use futures::stream;
use serde_json::json;
use tokio::net::TcpListener;
use tokio::task::JoinHandle;

use crate::api::{Body, EventStream, Request};
use crate::plane::KnowledgePlane;

const MAX_BODY_BYTES: usize = 1 << 20;

pub fn router(plane: Arc<KnowledgePlane>) -> Router {
    Router::new().fallback(dispatch).with_state(plane)
}

async fn dispatch(
    State(plane): State<Arc<KnowledgePlane>>,
    req: axum::extract::Request,
) -> axum::response::Response {
    let (parts, body) = req.into_parts();
    let query = Query::<std::collections::BTreeMap<String, String>>::try_from_uri(&parts.uri)
        .map(|q| q.0)
        .unwrap_or_default();
    let token = parts
        .headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "))
        .map(str::to_string);
    let body = match axum::body::to_bytes(body, MAX_BODY_BYTES).await {
        Ok(b) => b.to_vec(),
        Err(_) => return (StatusCode::PAYLOAD_TOO_LARGE, "request body too large").into_response(),
    };
    let request = Request {
        method: parts.method.as_str().to_string(),
        path: parts.uri.path().to_string(),
        query,
        token,
        body,
    };
    let response = match tokio::task::spawn_blocking(move || plane.handle(request)).await {
        Ok(r) => r,
        Err(e) => {
            tracing::error!(error = %e, "request handler panicked");
            return StatusCode::INTERNAL_SERVER_ERROR.into_response();
        }
    };
    let status = StatusCode::from_u16(response.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    match response.body {
        Body::Json(v) => {
            let bytes = serde_json::to_vec(&v).expect("json value serializes");
            let mut r = (status, bytes).into_response();
            r.headers_mut()
                .insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
            r
        }
        Body::Stream(s) => {
            let mut r = (status, AxumBody::from_stream(ndjson(s))).into_response();
            r.headers_mut().insert(
                header::CONTENT_TYPE,
                HeaderValue::from_static("application/x-ndjson"),
            );
            r
        }
    }
}

/// Line-delimited events, with `{"heartbeat": <tick>}` after each quiet
/// heartbeat interval. Ends once the subscription is deleted and drained.
fn ndjson(s: EventStream) -> impl futures::Stream<Item = Result<Bytes, std::io::Error>> {
    stream::unfold(s, |s| async move {
        loop {
            let pending = s.queue.drain();
            if !pending.is_empty() {
                let mut out = Vec::new();
                for ev in pending {
                    serde_json::to_writer(&mut out, &ev).expect("event serializes");
                    out.push(b'\n');
                }
                return Some((Ok(Bytes::from(out)), s));
            }
            if s.queue.is_closed() {
                return None;
            }
            match tokio::time::timeout(s.heartbeat, s.queue.wait()).await {
                Ok(()) => continue,
                Err(_) => {
                    let mut line = serde_json::to_vec(&json!({ "heartbeat": s.store.latest_tick() }))
                        .expect("json serializes");
                    line.push(b'\n');
                    return Some((Ok(Bytes::from(line)), s));
                }
            }
        }
    })
}

/// A bound server plus its clock task.
pub struct Server {
    pub addr: SocketAddr,
    pub plane: Arc<KnowledgePlane>,
    serve: JoinHandle<()>,
    clock: Option<JoinHandle<()>>,
}

impl Server {
    /// Bind `addr` and start serving. Unless the plane is in manual-tick
    /// mode, a clock task advances the simulation every tick duration.
    pub async fn start(plane: Arc<KnowledgePlane>, addr: SocketAddr) -> std::io::Result<Self> {
        let listener = TcpListener::bind(addr).await?;
        let addr = listener.local_addr()?;
        let app = router(plane.clone());
        let serve = tokio::spawn(async move {
            if let Err(e) = axum::serve(listener, app).await {
                tracing::error!(error = %e, "http server stopped");
            }
        });
        let clock = (!plane.config().manual_tick).then(|| tokio::spawn(run_clock(plane.clone())));
        Ok(Self {
            addr,
            plane,
            serve,
            clock,
        })
    }

    pub fn url(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub fn abort(&self) {
        self.serve.abort();
        if let Some(c) = &self.clock {
            c.abort();
        }
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        self.abort();
    }
}

async fn run_clock(plane: Arc<KnowledgePlane>) {
    let period = Duration::from_millis(plane.tick_duration_ms().max(1));
    let mut interval = tokio::time::interval(period);
    interval.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    interval.tick().await;
    loop {
        interval.tick().await;
        let p = plane.clone();
        match tokio::task::spawn_blocking(move || p.tick(1)).await {
            Ok(Ok(_)) => {}
            Ok(Err(e)) => tracing::error!(error = %e, "tick failed to persist"),
            Err(e) => tracing::error!(error = %e, "tick panicked"),
        }
    }
}
