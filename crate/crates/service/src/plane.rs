//! The knowledge plane: simulator clock, snapshot store, routing, access
//! control and audit behind a single `handle` entry point.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use kpa_core::catalog::{self, Catalog, CatalogError, LatencyClass, RequirementProfile, ServiceFilter, Task};
use kpa_core::ontology::{seed_registry, EdgeKind, MemberKind, Registry};
use kpa_core::sim::{init_network, ConfigError, EventType, NetworkState, SimCommand, SimConfig, Simulator};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::api::{ApiError, ApiResult, Body, EventStream, Request, Response};
use crate::audit::{AuditLog, AuditRecord};
use crate::auth::{AuthTable, Principal, Role};
use crate::broker::Broker;
use crate::config::ServiceConfig;
use crate::insights::InsightEngine;
use crate::metrics::Metrics;
use crate::persist::{self, SnapshotWriter};
use crate::store::{Lookup, Snapshot, SnapshotStore};
use crate::{docs, live};

const ANONYMOUS: &str = "anonymous";
const MAX_TICKS_PER_REQUEST: u64 = 100_000;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("invalid simulation config: {0}")]
    Config(#[from] ConfigError),
    #[error("persistence: {0}")]
    Io(#[from] std::io::Error),
    #[error("ontology failed validation: {0}")]
    Ontology(String),
}

/// Everything the single writer touches, behind one lock.
#[derive(Debug)]
struct Core {
    sim: Simulator,
    insights: InsightEngine,
    persist: Option<SnapshotWriter>,
}

#[derive(Debug)]
pub struct KnowledgePlane {
    core: Mutex<Core>,
    store: Arc<SnapshotStore>,
    registry: Registry,
    catalog: Catalog,
    broker: Broker,
    audit: AuditLog,
    metrics: Metrics,
    auth: AuthTable,
    config: ServiceConfig,
    tick_duration_ms: u64,
}

fn wall_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64)
}

impl KnowledgePlane {
    /// Build the plane. With a persistence directory holding a previous run,
    /// the simulation resumes from its last persisted tick and `sim_config`
    /// is ignored in favour of the persisted one.
    pub fn new(sim_config: SimConfig, config: ServiceConfig) -> Result<Self, ServiceError> {
        let registry = seed_registry();
        let report = registry.validate_registry(&|p| live::live_path_routable(&registry, p));
        if !report.is_valid() {
            return Err(ServiceError::Ontology(format!("{:?}", report.issues)));
        }

        let mut insights = InsightEngine::new(config.insight_rules.clone());
        let (states, audit_records, mut snap_writer, audit_writer) = match &config.persist_dir {
            Some(dir) => {
                let (rec, sw, aw) = persist::open_dir(dir)?;
                if rec.truncated_bytes > 0 {
                    tracing::warn!(bytes = rec.truncated_bytes, "recovered store had a corrupt tail");
                }
                (rec.states, rec.audit, Some(sw), Some(aw))
            }
            None => (Vec::new(), Vec::new(), None, None),
        };

        let resumed = !states.is_empty();
        let mut states = states.into_iter();
        let first = match states.next() {
            Some(s) => s,
            None => {
                let s = init_network(sim_config)?;
                if let Some(w) = snap_writer.as_mut() {
                    w.append(&s)?;
                }
                s
            }
        };
        let first_insights = insights.observe(&first);
        let store = SnapshotStore::new(
            config.snapshot_capacity,
            Snapshot {
                tick: first.tick,
                state: first.clone(),
                insights: first_insights,
            },
        );
        let mut last = first;
        for state in states {
            let found = insights.observe(&state);
            store.publish(Arc::new(Snapshot {
                tick: state.tick,
                state: state.clone(),
                insights: found,
            }));
            last = state;
        }
        if resumed {
            tracing::info!(tick = last.tick, "resumed from persisted snapshots");
        }

        let tick_duration_ms = last.config.tick_duration_ms;
        Ok(Self {
            core: Mutex::new(Core {
                sim: Simulator::from_state(last),
                insights,
                persist: snap_writer,
            }),
            store: Arc::new(store),
            registry,
            catalog: Catalog::seeded(),
            broker: Broker::new(),
            audit: AuditLog::new(audit_records, audit_writer),
            metrics: Metrics::default(),
            auth: config.auth.clone(),
            config,
            tick_duration_ms,
        })
    }

    fn core(&self) -> MutexGuard<'_, Core> {
        self.core.lock().expect("simulator lock poisoned")
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn tick_duration_ms(&self) -> u64 {
        self.tick_duration_ms
    }

    pub fn registry(&self) -> &Registry {
        &self.registry
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn store(&self) -> &Arc<SnapshotStore> {
        &self.store
    }

    pub fn latest_tick(&self) -> u64 {
        self.store.latest_tick()
    }

    pub fn audit_since(&self, seq: u64) -> Vec<AuditRecord> {
        self.audit.since(seq)
    }

    /// Upstream bus subscriptions per event type, every type listed.
    pub fn upstream_counts(&self) -> BTreeMap<EventType, usize> {
        let mut core = self.core();
        let bus = core.sim.bus_mut();
        EventType::ALL
            .into_iter()
            .map(|t| (t, bus.subscriber_count(t)))
            .collect()
    }

    /// Run `count` ticks. Each tick's snapshot is persisted and published
    /// before its events reach any consumer.
    pub fn tick(&self, count: u64) -> std::io::Result<u64> {
        let mut core = self.core();
        for _ in 0..count {
            let started = Instant::now();
            core.sim.advance();
            let state = core.sim.state().clone();
            let found = core.insights.observe(&state);
            if let Some(w) = core.persist.as_mut() {
                w.append(&state)?;
            }
            self.store.publish(Arc::new(Snapshot {
                tick: state.tick,
                state,
                insights: found,
            }));
            core.sim.flush_events();
            self.metrics.record_tick(started.elapsed());
        }
        Ok(self.store.latest_tick())
    }

    /// Serve one request. Every call produces exactly one audit record.
    pub fn handle(&self, req: Request) -> Response {
        let started = Instant::now();
        let route = route_template(&req.method, &req.path);
        let principal = self.auth.authenticate(req.token.as_deref());
        let result = self.dispatch(&req, &route, principal.as_ref());
        let response = result.unwrap_or_else(|e| e.into_response(&req.path));
        let elapsed = started.elapsed();
        self.metrics.record_query(&route, elapsed);
        self.audit.append(AuditRecord {
            seq: 0,
            wall_time_ms: wall_ms(),
            sim_tick: self.store.latest_tick(),
            principal: principal.map_or_else(|| ANONYMOUS.to_string(), |p| p.id),
            method: req.method.clone(),
            path: req.path.clone(),
            route,
            status: response.status,
            latency_ms: elapsed.as_secs_f64() * 1000.0,
        });
        response
    }

    fn dispatch(&self, req: &Request, route: &str, principal: Option<&Principal>) -> ApiResult {
        if req.method == "GET" && req.path == "/metrics" {
            return Ok(Response::ok(&self.metrics_doc()));
        }
        let principal =
            principal.ok_or_else(|| ApiError::new(401, "unauthorized", "missing or unknown token"))?;
        if !principal.is_allowed(&req.method, &req.path) {
            return Err(ApiError::new(
                403,
                "forbidden",
                format!("role {} may not {} {}", principal.role, req.method, req.path),
            ));
        }
        if route == UNMATCHED {
            return Err(if path_known(&req.path) {
                ApiError::new(
                    405,
                    "method_not_allowed",
                    format!("{} not supported here", req.method),
                )
            } else {
                ApiError::not_found(format!("no route for {}", req.path))
            });
        }
        let seg: Vec<&str> = req.path.trim_matches('/').split('/').collect();
        match (req.method.as_str(), seg.as_slice()) {
            ("GET", ["live", "network", "summary"]) => {
                let snap = self.snapshot(req)?;
                Ok(Response::ok(&live::summary(&snap)))
            }
            ("GET", ["live", e]) => {
                let snap = self.snapshot(req)?;
                Ok(Response::ok(&live::list(&snap, &self.catalog, e)?))
            }
            ("GET", ["live", e, id]) => {
                let snap = self.snapshot(req)?;
                let v = live::entity(&snap, &self.catalog, &self.registry, principal, e, id)?;
                Ok(Response::ok(&v))
            }
            ("GET", ["live", e, id, "attributes", a]) => {
                let snap = self.snapshot(req)?;
                let v = live::attribute(&snap, &self.catalog, &self.registry, principal, e, id, a)?;
                Ok(Response::ok(&v))
            }
            ("GET", ["docs"]) => Ok(Response::ok(&docs::root(&self.registry))),
            ("GET", ["docs", e]) => Ok(Response::ok(&docs::entity(&self.registry, e)?)),
            ("GET", ["docs", e, "attributes", a]) => Ok(Response::ok(&docs::member(
                &self.registry,
                e,
                MemberKind::Attribute,
                a,
            )?)),
            ("GET", ["docs", e, "methods", m]) => Ok(Response::ok(&docs::member(
                &self.registry,
                e,
                MemberKind::Method,
                m,
            )?)),
            ("GET", ["graph", e, node, "related"]) => self.graph(req, e, node),
            ("POST", ["subscriptions"]) => self.subscribe(req, principal),
            ("GET", ["subscriptions"]) => {
                let mine: Vec<_> = self
                    .broker
                    .list()
                    .into_iter()
                    .filter(|r| principal.role == Role::Admin || r.consumer == principal.id)
                    .collect();
                Ok(Response::ok(&json!({ "subscriptions": mine })))
            }
            ("GET", ["subscriptions", id]) => {
                let (record, queue) = self.owned_subscription(id, principal)?;
                Ok(Response::ok(
                    &json!({ "subscription": record, "delivered": queue.delivered() }),
                ))
            }
            ("DELETE", ["subscriptions", id]) => {
                self.owned_subscription(id, principal)?;
                let mut core = self.core();
                let record = self
                    .broker
                    .unsubscribe(core.sim.bus_mut(), id)
                    .ok_or_else(|| ApiError::not_found(format!("no subscription `{id}`")))?;
                Ok(Response::ok(&json!({ "deleted": record })))
            }
            ("GET", ["subscriptions", id, "stream"]) => {
                let (_, queue) = self.owned_subscription(id, principal)?;
                Ok(Response {
                    status: 200,
                    body: Body::Stream(EventStream {
                        queue,
                        store: self.store.clone(),
                        heartbeat: self.config.heartbeat,
                    }),
                })
            }
            ("GET", ["insights", "current"]) => {
                let snap = self.snapshot(req)?;
                let subject = req.query.get("subject");
                let list: Vec<_> = snap
                    .insights
                    .iter()
                    .filter(|i| subject.is_none_or(|s| &i.subject == s))
                    .collect();
                Ok(Response::ok(&json!({ "tick": snap.tick, "insights": list })))
            }
            ("GET", ["audit"]) => {
                let since = query_u64(req, "since_seq")?.unwrap_or(0);
                Ok(Response::ok(&json!({ "records": self.audit.since(since) })))
            }
            ("POST", ["sim", "tick"]) => {
                if !self.config.manual_tick {
                    return Err(ApiError::conflict(
                        "the clock is running; start with --manual-tick",
                    ));
                }
                let count = query_u64(req, "count")?.unwrap_or(1);
                if count > MAX_TICKS_PER_REQUEST {
                    return Err(ApiError::bad_request(format!(
                        "count may not exceed {MAX_TICKS_PER_REQUEST}"
                    )));
                }
                let latest = self
                    .tick(count)
                    .map_err(|e| ApiError::new(500, "persistence_failed", e.to_string()))?;
                Ok(Response::ok(&json!({ "latest_tick": latest })))
            }
            ("POST", ["sim", "commands"]) => self.sim_commands(req),
            ("GET", ["catalog", "services"]) => self.catalog_services(req),
            ("POST", ["catalog", "match"]) => {
                let profile: RequirementProfile = parse_body(req)?;
                let matches: Vec<Value> = self
                    .catalog
                    .match_services(&profile)
                    .into_iter()
                    .map(|m| {
                        json!({
                            "service": m.service,
                            "unused_capabilities": m.unused_capabilities,
                            "links": { "subscribe": "/catalog/subscriptions" },
                        })
                    })
                    .collect();
                Ok(Response::ok(&json!({
                    "matches": matches,
                    "links": { "subscribe": "/catalog/subscriptions" },
                })))
            }
            ("POST", ["catalog", "subscriptions"]) => self.catalog_subscribe(req),
            ("GET", ["catalog", "subscriptions"]) => {
                let core = self.core();
                let state = core.sim.state();
                let subs: Vec<Value> = match req.query.get("ue") {
                    Some(ue) => catalog::list_for_ue(state, ue)
                        .into_iter()
                        .map(sub_view)
                        .collect(),
                    None => state.ai_subscriptions.values().map(sub_view).collect(),
                };
                Ok(Response::ok(&json!({ "subscriptions": subs })))
            }
            ("GET", ["catalog", "subscriptions", id]) => {
                let core = self.core();
                let sub = catalog::get_subscription(core.sim.state(), id).map_err(catalog_error)?;
                Ok(Response::ok(&sub_view(sub)))
            }
            ("DELETE", ["catalog", "subscriptions", id]) => {
                let mut core = self.core();
                let event = catalog::teardown(core.sim.state_mut(), id).map_err(catalog_error)?;
                core.sim.publish(&[event]);
                let sub = catalog::get_subscription(core.sim.state(), id).map_err(catalog_error)?;
                Ok(Response::ok(&sub_view(sub)))
            }
            ("POST", ["infer", id]) => {
                let core = self.core();
                let sub = catalog::get_subscription(core.sim.state(), id).map_err(catalog_error)?;
                if sub.status != kpa_core::sim::SubscriptionStatus::Active {
                    return Err(ApiError::conflict(format!("subscription `{id}` is torn down")));
                }
                Ok(Response::ok(&json!({
                    "subscription_id": sub.id,
                    "service_id": sub.service_id,
                    "detections": [
                        { "label": "dog", "confidence": 0.91, "bbox": [112, 64, 208, 190] },
                        { "label": "cat", "confidence": 0.84, "bbox": [260, 120, 330, 196] },
                    ],
                })))
            }
            _ => Err(ApiError::not_found(format!("no route for {}", req.path))),
        }
    }

    fn snapshot(&self, req: &Request) -> Result<Arc<Snapshot>, ApiError> {
        let at = query_u64(req, "at")?;
        self.store.at(at).map_err(|e| match e {
            Lookup::Evicted { oldest } => ApiError::new(
                410,
                "gone",
                format!(
                    "tick {} was evicted; oldest retained is {oldest}",
                    at.unwrap_or(0)
                ),
            ),
            Lookup::NotYet { latest } => ApiError::not_found(format!(
                "tick {} has not happened; latest is {latest}",
                at.unwrap_or(0)
            )),
        })
    }

    fn graph(&self, req: &Request, entity: &str, name: &str) -> ApiResult {
        let node = self
            .registry
            .resolve(entity, name)
            .ok_or_else(|| ApiError::not_found(format!("no node `{entity}.{name}`")))?;
        let kind = match req.query.get("kind") {
            Some(k) => {
                Some(EdgeKind::parse(k).ok_or_else(|| ApiError::bad_request(format!("unknown kind `{k}`")))?)
            }
            None => None,
        };
        let edges = self
            .registry
            .get_related(&node, kind)
            .map_err(|e| ApiError::not_found(e.to_string()))?;
        let rendered: Vec<Value> = edges
            .iter()
            .map(|e| json!({ "kind": e.kind, "target": e.target.to_string(), "path": e.target.docs_path() }))
            .collect();
        Ok(Response::ok(&json!({
            "node": node.to_string(),
            "path": node.docs_path(),
            "edges": rendered,
        })))
    }

    fn subscribe(&self, req: &Request, principal: &Principal) -> ApiResult {
        #[derive(Deserialize)]
        struct Filter {
            subject: Option<String>,
        }
        #[derive(Deserialize)]
        struct Body {
            event_type: String,
            filter: Option<Filter>,
        }
        let body: Body = parse_body(req)?;
        let event_type = EventType::parse(&body.event_type)
            .ok_or_else(|| ApiError::bad_request(format!("unknown event_type `{}`", body.event_type)))?;
        let filter = body.filter.and_then(|f| f.subject);
        let mut core = self.core();
        let tick = core.sim.state().tick;
        let (record, _) = self
            .broker
            .subscribe(core.sim.bus_mut(), &principal.id, event_type, filter, tick);
        Ok(Response::json(201, &record))
    }

    fn owned_subscription(
        &self,
        id: &str,
        principal: &Principal,
    ) -> Result<
        (
            crate::broker::SubscriptionRecord,
            Arc<crate::broker::ConsumerQueue>,
        ),
        ApiError,
    > {
        match self.broker.get(id) {
            Some((r, q)) if principal.role == Role::Admin || r.consumer == principal.id => Ok((r, q)),
            _ => Err(ApiError::not_found(format!("no subscription `{id}`"))),
        }
    }

    fn sim_commands(&self, req: &Request) -> ApiResult {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Commands {
            Many { commands: Vec<SimCommand> },
            List(Vec<SimCommand>),
            One(SimCommand),
        }
        let commands = match parse_body::<Commands>(req)? {
            Commands::Many { commands } | Commands::List(commands) => commands,
            Commands::One(c) => vec![c],
        };
        let mut core = self.core();
        let snapshot = core.sim.state().pending_commands.clone();
        for c in &commands {
            if let Err(e) = core.sim.enqueue(c.clone()) {
                core.sim.state_mut().pending_commands = snapshot;
                return Err(ApiError::not_found(e.to_string()));
            }
        }
        Ok(Response::json(
            202,
            &json!({ "queued": commands.len(), "applies_at_tick": core.sim.state().tick + 1 }),
        ))
    }

    fn catalog_services(&self, req: &Request) -> ApiResult {
        fn parse_enum<T: serde::de::DeserializeOwned>(
            key: &str,
            v: Option<&String>,
        ) -> Result<Option<T>, ApiError> {
            v.map(|s| {
                serde_json::from_value(Value::String(s.clone()))
                    .map_err(|_| ApiError::bad_request(format!("bad {key} `{s}`")))
            })
            .transpose()
        }
        let filter = ServiceFilter {
            task: parse_enum::<Task>("task", req.query.get("task"))?,
            latency_class: parse_enum::<LatencyClass>("latency_class", req.query.get("latency_class"))?,
            modality: req.query.get("modality").cloned(),
            target_class: req.query.get("target_class").cloned(),
        };
        Ok(Response::ok(
            &json!({ "services": self.catalog.list_services(&filter) }),
        ))
    }

    fn catalog_subscribe(&self, req: &Request) -> ApiResult {
        #[derive(Deserialize)]
        struct Body {
            service_id: String,
            ue_ids: Vec<String>,
        }
        let body: Body = parse_body(req)?;
        let mut core = self.core();
        let (sub, event) = catalog::create_subscription(
            core.sim.state_mut(),
            &self.catalog,
            &body.ue_ids,
            &body.service_id,
        )
        .map_err(catalog_error)?;
        core.sim.publish(&[event]);
        Ok(Response::json(201, &sub_view(&sub)))
    }

    fn metrics_doc(&self) -> Value {
        let upstream: BTreeMap<String, usize> = self
            .upstream_counts()
            .into_iter()
            .map(|(t, n)| (t.to_string(), n))
            .collect();
        let consumers: BTreeMap<String, usize> = self
            .broker
            .consumer_counts()
            .into_iter()
            .map(|(t, n)| (t.to_string(), n))
            .collect();
        json!({
            "snapshot_age_ms": self.store.age_ms(),
            "latest_tick": self.store.latest_tick(),
            "oldest_tick": self.store.oldest_tick(),
            "tick_duration_ms": self.tick_duration_ms,
            "routes": self.metrics.routes(),
            "tick_processing": self.metrics.tick_processing(),
            "upstream_subscriptions": upstream,
            "consumer_subscriptions": consumers,
            "audit_records": self.audit.len(),
        })
    }

    /// Network state of the latest published tick.
    pub fn latest_state(&self) -> NetworkState {
        self.store.latest().state.clone()
    }
}

fn sub_view(sub: &kpa_core::sim::ServiceSubscription) -> Value {
    let mut v = serde_json::to_value(sub).expect("subscription serializes");
    v["links"] = json!({
        "self": format!("/catalog/subscriptions/{}", sub.id),
        "infer": format!("/infer/{}", sub.id),
    });
    v
}

fn catalog_error(e: CatalogError) -> ApiError {
    match &e {
        CatalogError::UnknownService(_)
        | CatalogError::UnknownUe(_)
        | CatalogError::UnknownSubscription(_) => ApiError::not_found(e.to_string()),
        CatalogError::InsufficientCapacity { headroom, .. } => {
            let headroom = serde_json::to_value(headroom).expect("map serializes");
            ApiError::new(409, "insufficient_capacity", e.to_string()).with("headroom", headroom)
        }
        CatalogError::AlreadyTornDown(_) => ApiError::new(409, "already_torn_down", e.to_string()),
        CatalogError::EmptyUeSet | CatalogError::DuplicateService(_) | CatalogError::InvalidService(..) => {
            ApiError::bad_request(e.to_string())
        }
    }
}

fn parse_body<T: serde::de::DeserializeOwned>(req: &Request) -> Result<T, ApiError> {
    serde_json::from_slice(&req.body).map_err(|e| ApiError::bad_request(format!("invalid body: {e}")))
}

fn query_u64(req: &Request, key: &str) -> Result<Option<u64>, ApiError> {
    req.query
        .get(key)
        .map(|v| {
            v.parse::<u64>()
                .map_err(|_| ApiError::bad_request(format!("`{key}` must be a non-negative integer")))
        })
        .transpose()
}

pub const UNMATCHED: &str = "unmatched";

const ROUTES: &[(&str, &str)] = &[
    ("GET", "/live/network/summary"),
    ("GET", "/live/{entity}"),
    ("GET", "/live/{entity}/{id}"),
    ("GET", "/live/{entity}/{id}/attributes/{attr}"),
    ("GET", "/docs"),
    ("GET", "/docs/{entity}"),
    ("GET", "/docs/{entity}/attributes/{attr}"),
    ("GET", "/docs/{entity}/methods/{method}"),
    ("GET", "/graph/{entity}/{node}/related"),
    ("POST", "/subscriptions"),
    ("GET", "/subscriptions"),
    ("GET", "/subscriptions/{id}"),
    ("DELETE", "/subscriptions/{id}"),
    ("GET", "/subscriptions/{id}/stream"),
    ("GET", "/insights/current"),
    ("GET", "/audit"),
    ("GET", "/metrics"),
    ("POST", "/sim/tick"),
    ("POST", "/sim/commands"),
    ("GET", "/catalog/services"),
    ("POST", "/catalog/match"),
    ("POST", "/catalog/subscriptions"),
    ("GET", "/catalog/subscriptions"),
    ("GET", "/catalog/subscriptions/{id}"),
    ("DELETE", "/catalog/subscriptions/{id}"),
    ("POST", "/infer/{id}"),
];

fn template_matches(template: &str, path: &str) -> bool {
    let t: Vec<&str> = template.trim_matches('/').split('/').collect();
    let p: Vec<&str> = path.trim_matches('/').split('/').collect();
    t.len() == p.len()
        && t.iter()
            .zip(&p)
            .all(|(t, p)| (t.starts_with('{') && !p.is_empty()) || t == p)
}

/// `METHOD /template` for the route the request hits, or [`UNMATCHED`].
/// Literal segments win over placeholders.
pub fn route_template(method: &str, path: &str) -> String {
    ROUTES
        .iter()
        .filter(|(m, t)| *m == method && template_matches(t, path))
        .min_by_key(|(_, t)| t.matches('{').count())
        .map_or_else(|| UNMATCHED.to_string(), |(m, t)| format!("{m} {t}"))
}

fn path_known(path: &str) -> bool {
    ROUTES.iter().any(|(_, t)| template_matches(t, path))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_prefer_literals() {
        assert_eq!(
            route_template("GET", "/live/network/summary"),
            "GET /live/network/summary"
        );
        assert_eq!(
            route_template("GET", "/live/ue/IMSI_1"),
            "GET /live/{entity}/{id}"
        );
        assert_eq!(route_template("GET", "/docs"), "GET /docs");
        assert_eq!(route_template("PUT", "/docs"), UNMATCHED);
        assert_eq!(route_template("GET", "/nope/a/b/c/d/e"), UNMATCHED);
        assert_eq!(
            route_template("GET", "/subscriptions/sub-1/stream"),
            "GET /subscriptions/{id}/stream"
        );
    }
}
