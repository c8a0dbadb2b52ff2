#![allow(dead_code)]

use std::sync::Arc;

use kpa_core::sim::SimConfig;
use kpa_service::{AuthTable, KnowledgePlane, Request, ServiceConfig};
use serde_json::Value;

pub const ADMIN: &str = "admin-token";
pub const OPERATOR: &str = "operator-token";
pub const TENANT: &str = "tenant-token";
pub const READONLY: &str = "readonly-token";

pub fn manual_config() -> ServiceConfig {
    ServiceConfig {
        manual_tick: true,
        auth: AuthTable::with_default_roles(),
        ..ServiceConfig::default()
    }
}

pub fn plane(sim: SimConfig) -> Arc<KnowledgePlane> {
    Arc::new(KnowledgePlane::new(sim, manual_config()).expect("plane starts"))
}

pub fn call(
    plane: &KnowledgePlane,
    token: &str,
    method: &str,
    path: &str,
    body: Option<Value>,
) -> (u16, Value) {
    let mut req = Request::new(method, path).with_token(token);
    if let Some(b) = body {
        req.body = serde_json::to_vec(&b).unwrap();
    }
    let resp = plane.handle(req);
    let value = resp.json_value().cloned().unwrap_or(Value::Null);
    (resp.status, value)
}

pub fn get(plane: &KnowledgePlane, token: &str, path: &str) -> (u16, Value) {
    call(plane, token, "GET", path, None)
}

pub fn get_bytes(plane: &KnowledgePlane, token: &str, path: &str) -> (u16, Vec<u8>) {
    let resp = plane.handle(Request::get(path).with_token(token));
    (resp.status, resp.body_bytes())
}

pub fn post(plane: &KnowledgePlane, token: &str, path: &str, body: Value) -> (u16, Value) {
    call(plane, token, "POST", path, Some(body))
}

pub fn tick(plane: &KnowledgePlane, n: u64) -> u64 {
    let (status, body) = call(plane, ADMIN, "POST", &format!("/sim/tick?count={n}"), None);
    assert_eq!(status, 200, "{body}");
    body["latest_tick"].as_u64().unwrap()
}
