//! The knowledge query tool: every request goes through here and lands in
//! the transcript.

use std::collections::{BTreeMap, BTreeSet};

use serde_json::Value;

use crate::client::{ClientError, KnowledgeClient};
use crate::transcript::{self, Link, Provenance, Step, Transcript};

/// A link and where it was found. `depth` is the target's distance from
/// the round's entry point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Found {
    pub link: Link,
    pub source: String,
    pub depth: u32,
}

pub struct KnowledgeTool<C> {
    client: C,
    pub transcript: Transcript,
    found: Vec<Found>,
    ids: BTreeMap<String, BTreeSet<String>>,
    round: u32,
}

impl<C: KnowledgeClient> KnowledgeTool<C> {
    pub fn new(client: C, scenario: &str) -> Self {
        Self {
            client,
            transcript: Transcript::new(scenario),
            found: Vec::new(),
            ids: BTreeMap::new(),
            round: 1,
        }
    }

    pub fn client_mut(&mut self) -> &mut C {
        &mut self.client
    }

    pub fn round(&self) -> u32 {
        self.round
    }

    /// Start a new round. Everything learned so far is kept.
    pub fn next_round(&mut self) {
        self.round += 1;
    }

    pub fn add_inputs(&mut self, entity: &str, ids: &[&str]) {
        self.transcript
            .inputs
            .entry(entity.to_string())
            .or_default()
            .extend(ids.iter().map(|s| s.to_string()));
    }

    pub fn found(&self) -> &[Found] {
        &self.found
    }

    /// Ids for `entity`: scenario inputs when given, else discovered ones.
    pub fn ids_for(&self, entity: &str) -> Vec<String> {
        match self.transcript.inputs.get(entity) {
            Some(ids) if !ids.is_empty() => ids.iter().cloned().collect(),
            _ => self
                .ids
                .get(entity)
                .map(|s| s.iter().cloned().collect())
                .unwrap_or_default(),
        }
    }

    /// How `path` can be justified from what is known, if at all.
    pub fn justify(&self, path: &str) -> Option<Provenance> {
        if self.transcript.discovered.contains(path) {
            return Some(Provenance::Discovered);
        }
        self.transcript.templates.iter().find_map(|t| {
            let values = transcript::template_values(t, path)?;
            let entity = t.split('/').nth(2).unwrap_or_default();
            let known = self.ids_for(entity);
            values
                .iter()
                .all(|v| known.iter().any(|k| k == v))
                .then(|| Provenance::Template { template: t.clone() })
        })
    }

    /// Issue a request and record it. Non-2xx responses are recorded, not
    /// raised; only transport failures are errors.
    pub fn query(
        &mut self,
        method: &str,
        path: &str,
        request: Option<&Value>,
        depth: u32,
        provenance: Provenance,
    ) -> Result<&Step, ClientError> {
        let reply = self.client.send(method, path, request)?;
        let body = reply.json();
        let links = transcript::harvest(&body);
        for (entity, ids) in transcript::harvest_ids(&body, &links) {
            self.ids.entry(entity).or_default().extend(ids);
        }
        for link in &links {
            if link.is_template() {
                self.transcript.templates.insert(link.path.clone());
            } else {
                self.transcript.discovered.insert(link.path.clone());
            }
            self.found.push(Found {
                link: link.clone(),
                source: path.to_string(),
                depth: depth + 1,
            });
        }
        self.transcript.steps.push(Step {
            round: self.round,
            method: method.to_string(),
            path: path.to_string(),
            status: reply.status,
            digest: transcript::digest(&reply.body),
            tick: body.get("tick").and_then(Value::as_u64),
            depth,
            provenance,
            request: request.cloned(),
            body,
        });
        Ok(self.transcript.steps.last().expect("just pushed"))
    }

    pub fn get(&mut self, path: &str, depth: u32, provenance: Provenance) -> Result<&Step, ClientError> {
        self.query("GET", path, None, depth, provenance)
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }
}
