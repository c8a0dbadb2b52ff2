mod common;

use std::io::{BufRead, BufReader};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use kpa_service::fixture::scenario_config;
use kpa_service::{KnowledgePlane, Server, ServiceConfig};
use reqwest::blocking::Client;
use serde_json::{json, Value};

struct Running {
    _rt: tokio::runtime::Runtime,
    server: Server,
    client: Client,
}

impl Running {
    fn start(config: ServiceConfig) -> Self {
        let rt = tokio::runtime::Runtime::new().unwrap();
        let plane = Arc::new(KnowledgePlane::new(scenario_config(), config).unwrap());
        let server = rt
            .block_on(Server::start(plane, "127.0.0.1:0".parse().unwrap()))
            .unwrap();
        Self {
            _rt: rt,
            server,
            client: Client::builder()
                .timeout(Duration::from_secs(10))
                .build()
                .unwrap(),
        }
    }

    fn url(&self, path: &str) -> String {
        format!("{}{path}", self.server.url())
    }

    fn get(&self, token: &str, path: &str) -> (u16, Value) {
        let r = self.client.get(self.url(path)).bearer_auth(token).send().unwrap();
        (r.status().as_u16(), r.json().unwrap_or(Value::Null))
    }

    fn post(&self, token: &str, path: &str, body: Value) -> (u16, Value) {
        let r = self
            .client
            .post(self.url(path))
            .bearer_auth(token)
            .json(&body)
            .send()
            .unwrap();
        (r.status().as_u16(), r.json().unwrap_or(Value::Null))
    }

    fn stream(&self, token: &str, id: &str) -> impl Iterator<Item = Value> {
        let r = self
            .client
            .get(self.url(&format!("/subscriptions/{id}/stream")))
            .bearer_auth(token)
            .send()
            .unwrap();
        assert_eq!(r.status().as_u16(), 200);
        assert_eq!(r.headers()["content-type"], "application/x-ndjson");
        BufReader::new(r)
            .lines()
            .map(|l| serde_json::from_str(&l.unwrap()).unwrap())
    }
}

fn quick_heartbeat() -> ServiceConfig {
    ServiceConfig {
        heartbeat: Duration::from_millis(150),
        ..manual_config()
    }
}

#[test]
fn json_routes_over_http() {
    let s = Running::start(manual_config());
    let (status, docs) = s.get(READONLY, "/docs");
    assert_eq!(status, 200);
    assert_eq!(docs["path"], "/docs");
    let r = s.client.get(s.url("/docs")).send().unwrap();
    assert_eq!(r.status().as_u16(), 401);
    let r = s
        .client
        .get(s.url("/docs"))
        .header("authorization", "Bearer nope")
        .send()
        .unwrap();
    assert_eq!(r.status().as_u16(), 401);
    let (status, body) = s.get(READONLY, "/live/ue/IMSI_77");
    assert_eq!(status, 404);
    assert_eq!(body["path"], "/live/ue/IMSI_77");
    let (status, t) = s.post(ADMIN, "/sim/tick?count=3", Value::Null);
    assert_eq!(status, 200);
    assert_eq!(t["latest_tick"], 3);
    let (_, v) = s.get(TENANT, "/live/ue/IMSI_1/attributes/cqi?at=2");
    assert_eq!(v["tick"], 2);
    let r = s
        .client
        .post(s.url("/catalog/match"))
        .bearer_auth(TENANT)
        .body("{not json")
        .send()
        .unwrap();
    assert_eq!(r.status().as_u16(), 400);
}

#[test]
fn stream_delivers_events_and_heartbeats() {
    let s = Running::start(quick_heartbeat());
    let (status, sub) = s.post(TENANT, "/subscriptions", json!({ "event_type": "UE_ATTACHED" }));
    assert_eq!(status, 201);
    let mut lines = s.stream(TENANT, sub["id"].as_str().unwrap());

    let first = lines.next().unwrap();
    assert_eq!(first, json!({ "heartbeat": 0 }));

    s.post(ADMIN, "/sim/tick?count=2", Value::Null);
    let mut attached = Vec::new();
    while attached.len() < 3 {
        let line = lines.next().unwrap();
        if line.get("heartbeat").is_none() {
            assert_eq!(line["type"], "UE_ATTACHED");
            assert_eq!(line["tick"], 1);
            attached.push(line["subject"].as_str().unwrap().to_string());
        }
    }
    assert_eq!(attached, ["IMSI_1", "IMSI_2", "IMSI_3"]);
    let hb = lines.find(|l| l.get("heartbeat").is_some()).unwrap();
    assert_eq!(hb["heartbeat"], 2);
}

#[test]
fn stream_ends_after_delete() {
    let s = Running::start(quick_heartbeat());
    let (_, sub) = s.post(TENANT, "/subscriptions", json!({ "event_type": "UE_ATTACHED" }));
    let id = sub["id"].as_str().unwrap().to_string();
    let lines = s.stream(TENANT, &id);
    let r = s
        .client
        .delete(s.url(&format!("/subscriptions/{id}")))
        .bearer_auth(TENANT)
        .send()
        .unwrap();
    assert_eq!(r.status().as_u16(), 200);
    let started = Instant::now();
    let rest: Vec<Value> = lines.collect();
    assert!(started.elapsed() < Duration::from_secs(5));
    assert!(rest.iter().all(|l| l.get("heartbeat").is_some()));
}

#[test]
fn ten_consumers_share_one_upstream_subscription() {
    let s = Running::start(quick_heartbeat());
    let ids: Vec<String> = (0..10)
        .map(|_| {
            let (status, sub) = s.post(TENANT, "/subscriptions", json!({ "event_type": "UE_ATTACHED" }));
            assert_eq!(status, 201);
            sub["id"].as_str().unwrap().to_string()
        })
        .collect();
    let (_, m) = s.get(ADMIN, "/metrics");
    assert_eq!(m["upstream_subscriptions"]["UE_ATTACHED"], 1);
    assert_eq!(m["consumer_subscriptions"]["UE_ATTACHED"], 10);

    let streams: Vec<_> = ids.iter().map(|id| s.stream(TENANT, id)).collect();
    s.post(ADMIN, "/sim/tick?count=1", Value::Null);
    let received: Vec<Vec<Value>> = streams
        .into_iter()
        .map(|lines| lines.filter(|l| l.get("heartbeat").is_none()).take(3).collect())
        .collect();
    for r in &received {
        assert_eq!(r, &received[0]);
    }
    assert_eq!(received[0].len(), 3);
}

#[test]
fn clock_advances_without_manual_ticks() {
    let s = Running::start(ServiceConfig {
        manual_tick: false,
        ..manual_config()
    });
    let deadline = Instant::now() + Duration::from_secs(5);
    loop {
        let (_, m) = s.get(ADMIN, "/metrics");
        if m["latest_tick"].as_u64().unwrap() >= 3 {
            break;
        }
        assert!(Instant::now() < deadline, "clock did not advance");
        std::thread::sleep(Duration::from_millis(50));
    }
}
