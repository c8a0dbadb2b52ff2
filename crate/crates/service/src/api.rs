//! Transport-independent request and response types.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use serde::Serialize;
use serde_json::{json, Value};

use crate::broker::ConsumerQueue;
use crate::store::SnapshotStore;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Request {
    pub method: String,
    pub path: String,
    pub query: BTreeMap<String, String>,
    pub token: Option<String>,
    pub body: Vec<u8>,
}

impl Request {
    pub fn get(path: &str) -> Self {
        Self::new("GET", path)
    }

    pub fn post(path: &str, body: &Value) -> Self {
        let mut r = Self::new("POST", path);
        r.body = serde_json::to_vec(body).expect("json value serializes");
        r
    }

    pub fn delete(path: &str) -> Self {
        Self::new("DELETE", path)
    }

    /// Split an optional `?a=b&c=d` suffix off `path` into the query map.
    /// Values are taken literally; no percent-decoding is done.
    pub fn new(method: &str, path: &str) -> Self {
        let (path, query) = match path.split_once('?') {
            Some((p, q)) => (p, parse_query(q)),
            None => (path, BTreeMap::new()),
        };
        Self {
            method: method.to_ascii_uppercase(),
            path: path.to_string(),
            query,
            token: None,
            body: Vec::new(),
        }
    }

    pub fn with_token(mut self, token: &str) -> Self {
        self.token = Some(token.to_string());
        self
    }
}

pub fn parse_query(q: &str) -> BTreeMap<String, String> {
    q.split('&')
        .filter(|kv| !kv.is_empty())
        .map(|kv| match kv.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => (kv.to_string(), String::new()),
        })
        .collect()
}

/// Live event feed handed to the transport.
#[derive(Debug, Clone)]
pub struct EventStream {
    pub queue: Arc<ConsumerQueue>,
    pub store: Arc<SnapshotStore>,
    pub heartbeat: Duration,
}

#[derive(Debug, Clone)]
pub enum Body {
    Json(Value),
    Stream(EventStream),
}

#[derive(Debug, Clone)]
pub struct Response {
    pub status: u16,
    pub body: Body,
}

impl Response {
    pub fn ok<T: Serialize>(value: &T) -> Self {
        Self::json(200, value)
    }

    pub fn json<T: Serialize>(status: u16, value: &T) -> Self {
        Self {
            status,
            body: Body::Json(serde_json::to_value(value).expect("response serializes")),
        }
    }

    pub fn json_value(&self) -> Option<&Value> {
        match &self.body {
            Body::Json(v) => Some(v),
            Body::Stream(_) => None,
        }
    }

    /// Serialized body bytes; empty for streams.
    pub fn body_bytes(&self) -> Vec<u8> {
        match &self.body {
            Body::Json(v) => serde_json::to_vec(v).expect("json value serializes"),
            Body::Stream(_) => Vec::new(),
        }
    }
}

/// Error with the `{code, message, path}` body.
#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: u16,
    pub code: &'static str,
    pub message: String,
    pub extra: Option<(&'static str, Value)>,
}

impl ApiError {
    pub fn new(status: u16, code: &'static str, message: impl Into<String>) -> Self {
        Self {
            status,
            code,
            message: message.into(),
            extra: None,
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(400, "bad_request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(404, "not_found", message)
    }

    pub fn conflict(message: impl Into<String>) -> Self {
        Self::new(409, "conflict", message)
    }

    pub fn with(mut self, key: &'static str, value: Value) -> Self {
        self.extra = Some((key, value));
        self
    }

    pub fn into_response(self, path: &str) -> Response {
        let mut body = json!({ "code": self.code, "message": self.message, "path": path });
        if let Some((k, v)) = self.extra {
            body[k] = v;
        }
        Response {
            status: self.status,
            body: Body::Json(body),
        }
    }
}

pub type ApiResult = Result<Response, ApiError>;
