//! Transports for the knowledge query tool.

use std::sync::Arc;
use std::time::Duration;

use kpa_service::{KnowledgePlane, Request};
use serde_json::Value;
use url::Url;

#[derive(Debug, thiserror::Error)]
pub enum ClientError {
    #[error("invalid server url: {0}")]
    BadUrl(#[from] url::ParseError),
    #[error("transport: {0}")]
    Transport(#[from] reqwest::Error),
}

/// Status plus the raw body, so digests cover exactly what was served.
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub status: u16,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap_or(Value::Null)
    }
}

pub trait KnowledgeClient {
    fn send(&mut self, method: &str, path: &str, body: Option<&Value>) -> Result<Reply, ClientError>;
}

/// Calls the plane directly, skipping HTTP. Used by tests and the CLI's
/// fixture mode.
pub struct InProcessClient {
    plane: Arc<KnowledgePlane>,
    token: String,
}

impl InProcessClient {
    pub fn new(plane: Arc<KnowledgePlane>, token: &str) -> Self {
        Self {
            plane,
            token: token.to_string(),
        }
    }
}

impl KnowledgeClient for InProcessClient {
    fn send(&mut self, method: &str, path: &str, body: Option<&Value>) -> Result<Reply, ClientError> {
        let mut req = Request::new(method, path).with_token(&self.token);
        if let Some(b) = body {
            req.body = serde_json::to_vec(b).expect("json value serializes");
        }
        let resp = self.plane.handle(req);
        Ok(Reply {
            status: resp.status,
            body: resp.body_bytes(),
        })
    }
}

pub struct HttpClient {
    base: Url,
    token: String,
    http: reqwest::blocking::Client,
}

impl HttpClient {
    pub fn new(server: &str, token: &str) -> Result<Self, ClientError> {
        Ok(Self {
            base: Url::parse(server)?,
            token: token.to_string(),
            http: reqwest::blocking::Client::builder()
                .timeout(Duration::from_secs(30))
                .build()?,
        })
    }
}

impl KnowledgeClient for HttpClient {
    fn send(&mut self, method: &str, path: &str, body: Option<&Value>) -> Result<Reply, ClientError> {
        let url = self.base.join(path)?;
        let method = reqwest::Method::from_bytes(method.as_bytes()).unwrap_or(reqwest::Method::GET);
        let mut req = self.http.request(method, url).bearer_auth(&self.token);
        if let Some(b) = body {
            req = req.json(b);
        }
        let resp = req.send()?;
        let status = resp.status().as_u16();
        let body = resp.bytes()?.to_vec();
        Ok(Reply { status, body })
    }
}
