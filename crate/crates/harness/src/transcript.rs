//! What the harness asked, what came back, and what it learned.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Top-level path segments the harness treats as knowledge endpoints.
const ENDPOINT_ROOTS: [&str; 7] = [
    "docs",
    "live",
    "graph",
    "insights",
    "catalog",
    "subscriptions",
    "infer",
];

/// A link found in a response body. `kind` is the relation name for
/// document links and the JSON key otherwise.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Link {
    pub kind: String,
    pub path: String,
}

impl Link {
    pub fn is_template(&self) -> bool {
        self.path.contains('{')
    }
}

fn is_endpoint(s: &str) -> bool {
    s.strip_prefix('/')
        .and_then(|rest| rest.split(['/', '?']).next())
        .is_some_and(|root| ENDPOINT_ROOTS.contains(&root))
}

/// Every endpoint path mentioned anywhere in `body`, in document order.
pub fn harvest(body: &Value) -> Vec<Link> {
    fn walk(v: &Value, key: &str, out: &mut Vec<Link>) {
        match v {
            Value::String(s) if is_endpoint(s) => out.push(Link {
                kind: key.to_string(),
                path: s.clone(),
            }),
            Value::Array(items) => items.iter().for_each(|i| walk(i, key, out)),
            Value::Object(map) => {
                if let (Some(Value::String(kind)), Some(Value::String(path))) =
                    (map.get("kind"), map.get("path"))
                {
                    if is_endpoint(path) {
                        out.push(Link {
                            kind: kind.clone(),
                            path: path.clone(),
                        });
                    }
                    return;
                }
                for (k, v) in map {
                    walk(v, k, out);
                }
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(body, "", &mut out);
    out
}

/// Entity ids named by a response: listing `ids` plus any concrete
/// `/live/{entity}/{id}` links.
pub fn harvest_ids(body: &Value, links: &[Link]) -> BTreeMap<String, BTreeSet<String>> {
    let mut out: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    if let (Some(Value::String(entity)), Some(Value::Array(ids))) = (body.get("entity_type"), body.get("ids"))
    {
        out.entry(entity.clone())
            .or_default()
            .extend(ids.iter().filter_map(|i| i.as_str().map(str::to_string)));
    }
    for link in links.iter().filter(|l| !l.is_template()) {
        let segs: Vec<&str> = link.path.trim_start_matches('/').split('/').collect();
        if let ["live", entity, id, ..] = segs.as_slice() {
            if *entity != "network" {
                out.entry(entity.to_string()).or_default().insert(id.to_string());
            }
        }
    }
    out
}

pub fn digest(body: &[u8]) -> String {
    Sha256::digest(body)
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Why a path was allowed to be queried.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "via", rename_all = "snake_case")]
pub enum Provenance {
    Entry,
    Discovered,
    Template { template: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Step {
    pub round: u32,
    pub method: String,
    pub path: String,
    pub status: u16,
    pub digest: String,
    /// Simulation tick reported by the response, if any.
    pub tick: Option<u64>,
    /// Link distance from the round's entry point.
    pub depth: u32,
    pub provenance: Provenance,
    #[serde(skip)]
    pub request: Option<Value>,
    #[serde(skip)]
    pub body: Value,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Transcript {
    pub scenario: String,
    pub steps: Vec<Step>,
    pub discovered: BTreeSet<String>,
    pub templates: BTreeSet<String>,
    /// Entity ids supplied by the scenario rather than discovered.
    pub inputs: BTreeMap<String, BTreeSet<String>>,
    /// Setup requests, which are not knowledge queries.
    pub setup: Vec<String>,
    pub notes: Vec<String>,
    pub checks: Vec<Check>,
    pub answer: Option<Value>,
}

impl Transcript {
    pub fn new(scenario: &str) -> Self {
        Self {
            scenario: scenario.to_string(),
            ..Self::default()
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn queries_in_round(&self, round: u32) -> usize {
        self.steps.iter().filter(|s| s.round == round).count()
    }

    /// Successful GET responses for `path`.
    pub fn served(&self, path: &str) -> Option<&Step> {
        self.steps
            .iter()
            .find(|s| s.method == "GET" && s.path == path && s.status == 200)
    }

    pub fn was_queried(&self, method: &str, path: &str) -> bool {
        self.steps.iter().any(|s| s.method == method && s.path == path)
    }

    /// Plain-text rendering: one line per step, then checks and verdict.
    pub fn render(&self) -> String {
        let mut out = format!("scenario {}\n", self.scenario);
        for s in &self.setup {
            let _ = writeln!(out, "setup {s}");
        }
        for (i, s) in self.steps.iter().enumerate() {
            let tick = s.tick.map_or_else(|| "-".to_string(), |t| t.to_string());
            let via = match &s.provenance {
                Provenance::Entry => "entry".to_string(),
                Provenance::Discovered => "discovered".to_string(),
                Provenance::Template { template } => format!("template {template}"),
            };
            let _ = writeln!(
                out,
                "step {:>2} round {} depth {} {} {} -> {} tick {} sha256 {} via {}",
                i + 1,
                s.round,
                s.depth,
                s.method,
                s.path,
                s.status,
                tick,
                &s.digest[..16],
                via
            );
        }
        let _ = writeln!(
            out,
            "discovered {} endpoints, {} templates",
            self.discovered.len(),
            self.templates.len()
        );
        if let Some(a) = &self.answer {
            let _ = writeln!(out, "answer {a}");
        }
        for n in &self.notes {
            let _ = writeln!(out, "note {n}");
        }
        for c in &self.checks {
            let _ = writeln!(
                out,
                "check {} {}: {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        let verdict = match self.first_failure() {
            None if self.passed() => "PASS".to_string(),
            None => "FAIL (no checks ran)".to_string(),
            Some(c) => format!("FAIL at {}", c.name),
        };
        let _ = writeln!(out, "verdict {verdict}");
        out
    }
}

/// Fill `{...}` placeholders in `template` with `values`, in order.
pub fn instantiate(template: &str, values: &[&str]) -> String {
    let mut values = values.iter();
    template
        .split('/')
        .map(|seg| {
            if seg.starts_with('{') && seg.ends_with('}') {
                values.next().copied().unwrap_or(seg)
            } else {
                seg
            }
        })
        .collect::<Vec<_>>()
        .join("/")
}

/// Placeholder values if `path` is an instance of `template`.
pub fn template_values<'a>(template: &str, path: &'a str) -> Option<Vec<&'a str>> {
    let t: Vec<&str> = template.split('/').collect();
    let p: Vec<&str> = path.split('/').collect();
    if t.len() != p.len() {
        return None;
    }
    let mut values = Vec::new();
    for (t, p) in t.iter().zip(p) {
        if t.starts_with('{') && t.ends_with('}') {
            if p.is_empty() {
                return None;
            }
            values.push(p);
        } else if *t != p {
            return None;
        }
    }
    Some(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn harvest_reads_related_and_plain_links() {
        let body = json!({
            "path": "/docs/cell/attributes/cio",
            "live_path": "/live/cell/{id}/attributes/cio",
            "related": [{ "kind": "used_by", "path": "/docs/cell/methods/evaluate_a3", "direction": "out" }],
            "note": "/not/an/endpoint",
        });
        let links = harvest(&body);
        assert!(links.contains(&Link {
            kind: "used_by".into(),
            path: "/docs/cell/methods/evaluate_a3".into()
        }));
        assert!(links.iter().any(|l| l.is_template() && l.kind == "live_path"));
        assert!(!links.iter().any(|l| l.path == "/not/an/endpoint"));
    }

    #[test]
    fn ids_from_listing_and_links() {
        let body =
            json!({ "entity_type": "cell", "ids": ["cell_gnb1_0"], "links": ["/live/cell/cell_gnb1_1"] });
        let ids = harvest_ids(&body, &harvest(&body));
        assert_eq!(ids["cell"].len(), 2);
    }

    #[test]
    fn templates_round_trip() {
        let t = "/live/ue/{id}/attributes/cqi";
        let p = instantiate(t, &["IMSI_2"]);
        assert_eq!(p, "/live/ue/IMSI_2/attributes/cqi");
        assert_eq!(template_values(t, &p), Some(vec!["IMSI_2"]));
        assert_eq!(template_values(t, "/live/ue/IMSI_2/attributes/rsrp_map"), None);
    }

    #[test]
    fn digest_is_hex_sha256() {
        assert_eq!(
            digest(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
