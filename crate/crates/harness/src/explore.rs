//! Breadth-first link following toward a structural goal.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::json;

use crate::client::{ClientError, KnowledgeClient};
use crate::provider::{Completion, CompletionProvider, ProviderError, QUERY_TOOL};
use crate::tool::KnowledgeTool;
use crate::transcript::{self, Provenance, Transcript};

pub struct Goal<'a> {
    pub description: String,
    /// A link is worth following when one of these appears as a whole
    /// `_`-separated run of words in its last segment.
    pub keywords: Vec<String>,
    pub reached: Box<dyn Fn(&Transcript) -> bool + 'a>,
}

impl<'a> Goal<'a> {
    pub fn new(description: &str, keywords: &[&str], reached: impl Fn(&Transcript) -> bool + 'a) -> Self {
        Self {
            description: description.to_string(),
            keywords: keywords.iter().map(|k| k.to_string()).collect(),
            reached: Box::new(reached),
        }
    }

    fn relevant(&self, path: &str) -> bool {
        let last = path
            .split('/')
            .rfind(|s| !s.is_empty() && !s.starts_with('{'))
            .unwrap_or_default();
        let last = format!("_{last}_");
        self.keywords.iter().any(|k| last.contains(&format!("_{k}_")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub path: String,
    pub depth: u32,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Reached,
    BudgetExhausted,
    /// The provider finished, or chose nothing, before the goal held.
    GaveUp(String),
    /// The provider asked for a path it had no grounds to know.
    Rejected(String),
}

#[derive(Debug, thiserror::Error)]
pub enum ExploreError {
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

fn entity_of(path: &str) -> &str {
    path.split('/').nth(2).unwrap_or_default()
}

/// Unqueried relevant paths, shallowest first, ties broken by path.
///
/// Concrete links qualify when relevant. A relevant live template is
/// instantiated with the scenario's ids for its entity, or else with the
/// first discovered id; when no id is known yet, the entity's `/live`
/// listing qualifies instead.
pub fn frontier<C: KnowledgeClient>(tool: &KnowledgeTool<C>, goal: &Goal) -> Vec<Candidate> {
    let t = &tool.transcript;
    let mut best: BTreeMap<String, Candidate> = BTreeMap::new();
    let mut offer = |path: String, depth: u32, provenance: Provenance| {
        if t.was_queried("GET", &path) {
            return;
        }
        let keep = best.get(&path).is_none_or(|c| depth < c.depth);
        if keep {
            best.insert(
                path.clone(),
                Candidate {
                    path,
                    depth,
                    provenance,
                },
            );
        }
    };

    let mut wants_listing = Vec::new();
    for f in tool.found() {
        if f.link.is_template() {
            if !goal.relevant(&f.link.path) || !f.link.path.starts_with("/live/") {
                continue;
            }
            let entity = entity_of(&f.link.path);
            let ids = tool.ids_for(entity);
            let chosen: Vec<String> = if t.inputs.get(entity).is_some_and(|s| !s.is_empty()) {
                ids
            } else {
                ids.into_iter().take(1).collect()
            };
            if chosen.is_empty() {
                wants_listing.push(entity.to_string());
            }
            for id in chosen {
                offer(
                    transcript::instantiate(&f.link.path, &[&id]),
                    f.depth,
                    Provenance::Template {
                        template: f.link.path.clone(),
                    },
                );
            }
        } else if goal.relevant(&f.link.path) {
            offer(f.link.path.clone(), f.depth, Provenance::Discovered);
        }
    }
    for f in tool.found() {
        let segs: Vec<&str> = f.link.path.trim_start_matches('/').split('/').collect();
        if let ["live", entity] = segs.as_slice() {
            if wants_listing.iter().any(|e| e == entity) {
                offer(f.link.path.clone(), f.depth, Provenance::Discovered);
            }
        }
    }

    let mut out: Vec<Candidate> = best.into_values().collect();
    out.sort_by(|a, b| a.depth.cmp(&b.depth).then_with(|| a.path.cmp(&b.path)));
    out
}

/// Query `entry` (if any), then let the provider pick from the frontier
/// until the goal holds or `budget` queries have been spent in this round.
pub fn explore<C: KnowledgeClient>(
    tool: &mut KnowledgeTool<C>,
    provider: &mut dyn CompletionProvider,
    entry: Option<&str>,
    goal: &Goal,
    budget: usize,
) -> Result<Outcome, ExploreError> {
    let round = tool.round();
    let spent = |tool: &KnowledgeTool<C>| tool.transcript.queries_in_round(round);
    if let Some(entry) = entry {
        if budget == 0 {
            return Ok(Outcome::BudgetExhausted);
        }
        tool.get(entry, 0, Provenance::Entry)?;
    }
    loop {
        if (goal.reached)(&tool.transcript) {
            return Ok(Outcome::Reached);
        }
        if spent(tool) >= budget {
            return Ok(Outcome::BudgetExhausted);
        }
        let candidates = frontier(tool, goal);
        let context = json!({
            "goal": goal.description,
            "queries_left": budget - spent(tool),
            "frontier": candidates,
            "last": tool.transcript.steps.last().map(|s| json!({
                "path": s.path,
                "status": s.status,
                "body": s.body,
            })),
        })
        .to_string();
        match provider.complete(&context, &[QUERY_TOOL])? {
            Completion::Final { answer } => return Ok(Outcome::GaveUp(answer)),
            Completion::Query { path } => {
                let (depth, provenance) = match candidates.iter().find(|c| c.path == path) {
                    Some(c) => (c.depth, c.provenance.clone()),
                    None => match tool.justify(&path) {
                        Some(p) => (tool.transcript.steps.last().map_or(1, |s| s.depth + 1), p),
                        None => return Ok(Outcome::Rejected(path)),
                    },
                };
                tool.get(&path, depth, provenance)?;
            }
        }
    }
}
