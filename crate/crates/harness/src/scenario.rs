//! Scripted scenarios: four question families and the two demos.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use kpa_service::audit::AuditRecord;
use serde_json::{json, Value};

use crate::checks;
use crate::client::{ClientError, KnowledgeClient};
use crate::explore::{explore, ExploreError, Goal, Outcome};
use crate::provider::CompletionProvider;
use crate::tool::KnowledgeTool;
use crate::transcript::{Provenance, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ScenarioId {
    S1SingleAttr,
    S2MultiMethod,
    S3CrossEntity,
    S4Reusability,
    D1EngineerChat,
    D2Provisioning,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 6] = [
        ScenarioId::S1SingleAttr,
        ScenarioId::S2MultiMethod,
        ScenarioId::S3CrossEntity,
        ScenarioId::S4Reusability,
        ScenarioId::D1EngineerChat,
        ScenarioId::D2Provisioning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::S1SingleAttr => "S1_single_attr",
            ScenarioId::S2MultiMethod => "S2_multi_method",
            ScenarioId::S3CrossEntity => "S3_cross_entity",
            ScenarioId::S4Reusability => "S4_reusability",
            ScenarioId::D1EngineerChat => "D1_engineer_chat",
            ScenarioId::D2Provisioning => "D2_provisioning",
        }
    }

    /// Maximum knowledge queries per round.
    pub fn budget(self) -> usize {
        match self {
            ScenarioId::S1SingleAttr => 3,
            ScenarioId::S2MultiMethod => 6,
            ScenarioId::S3CrossEntity => 10,
            ScenarioId::S4Reusability => 5,
            ScenarioId::D1EngineerChat => 3,
            ScenarioId::D2Provisioning => 3,
        }
    }

    /// Ticks to run before the first query, so UEs have attached.
    pub fn setup_ticks(self) -> u64 {
        match self {
            ScenarioId::D2Provisioning => 0,
            _ => 1,
        }
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error)]
#[error("unknown scenario `{0}`; expected one of S1..S4, D1, D2")]
pub struct UnknownScenario(String);

impl FromStr for ScenarioId {
    type Err = UnknownScenario;

    /// Accepts the full name or its prefix (`S3`, `d2`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        ScenarioId::ALL
            .into_iter()
            .find(|id| {
                let name = id.name().to_ascii_lowercase();
                name == lower || name.split('_').next() == Some(lower.as_str())
            })
            .ok_or_else(|| UnknownScenario(s.to_string()))
    }
}

const SETUP_WAIT: Duration = Duration::from_secs(3);

/// The drone operator's requirements from the provisioning demo.
pub fn drone_profile() -> Value {
    json!({
        "modalities": ["wide_angle_camera"],
        "realtime": true,
        "target_classes": ["dog", "cat"],
        "ue_ids": ["IMSI_1", "IMSI_2", "IMSI_3"],
    })
}

pub fn run_scenario<C: KnowledgeClient>(
    id: ScenarioId,
    client: C,
    provider: &mut dyn CompletionProvider,
) -> Result<Transcript, ExploreError> {
    let mut tool = KnowledgeTool::new(client, id.name());
    let audit_start = audit_head(&mut tool)?;
    setup(&mut tool, id.setup_ticks())?;
    match id {
        ScenarioId::S1SingleAttr => s1(&mut tool, provider)?,
        ScenarioId::S2MultiMethod => s2(&mut tool, provider)?,
        ScenarioId::S3CrossEntity => s3(&mut tool, provider)?,
        ScenarioId::S4Reusability => s4(&mut tool, provider)?,
        ScenarioId::D1EngineerChat => d1(&mut tool, provider)?,
        ScenarioId::D2Provisioning => d2(&mut tool)?,
    }
    let verdict = checks::no_hardcoded_paths(&tool.transcript);
    tool.transcript.check(
        "no_hardcoded_paths",
        verdict.is_ok(),
        verdict
            .err()
            .unwrap_or_else(|| "every query was discovered first".into()),
    );
    audit_check(&mut tool, audit_start)?;
    Ok(tool.into_transcript())
}

fn audit_head<C: KnowledgeClient>(tool: &mut KnowledgeTool<C>) -> Result<Option<u64>, ClientError> {
    let reply = tool.client_mut().send("GET", "/audit", None)?;
    if reply.status != 200 {
        return Ok(None);
    }
    Ok(Some(
        reply.json()["records"]
            .as_array()
            .and_then(|r| r.last())
            .and_then(|r| r["seq"].as_u64())
            .unwrap_or(0),
    ))
}

/// Compare the transcript with the audit log when the token may read it.
/// Our own principal is the one that made the first /audit read after
/// `start`.
fn audit_check<C: KnowledgeClient>(
    tool: &mut KnowledgeTool<C>,
    start: Option<u64>,
) -> Result<(), ClientError> {
    let Some(start) = start else {
        tool.transcript
            .notes
            .push("audit consistency not checked: token cannot read /audit".into());
        return Ok(());
    };
    let reply = tool
        .client_mut()
        .send("GET", &format!("/audit?since_seq={start}"), None)?;
    let records: Vec<AuditRecord> =
        serde_json::from_value(reply.json()["records"].clone()).unwrap_or_default();
    let principal = records
        .iter()
        .find(|r| r.method == "GET" && r.path == "/audit")
        .map(|r| r.principal.clone());
    let result = match principal {
        Some(p) => checks::audit_subsequence(&tool.transcript, &records, &p),
        None => Err("own audit read not found".into()),
    };
    tool.transcript.check(
        "audit_consistency",
        result.is_ok(),
        result
            .err()
            .unwrap_or_else(|| "transcript is a subsequence of the audit log".into()),
    );
    Ok(())
}

/// Advance the simulation. When the token may not tick, or the clock is
/// running on its own, wait briefly for the network to get there instead.
fn setup<C: KnowledgeClient>(tool: &mut KnowledgeTool<C>, ticks: u64) -> Result<(), ClientError> {
    if ticks == 0 {
        return Ok(());
    }
    let reply = tool
        .client_mut()
        .send("POST", &format!("/sim/tick?count={ticks}"), None)?;
    tool.transcript
        .setup
        .push(format!("POST /sim/tick?count={ticks} -> {}", reply.status));
    if reply.status == 200 {
        return Ok(());
    }
    let deadline = Instant::now() + SETUP_WAIT;
    loop {
        let r = tool.client_mut().send("GET", "/live/network/summary", None)?;
        let tick = r.json()["tick"].as_u64();
        if tick.is_some_and(|t| t >= ticks) {
            tool.transcript
                .setup
                .push(format!("network already at tick {}", tick.unwrap_or_default()));
            return Ok(());
        }
        if Instant::now() > deadline {
            tool.transcript.check(
                "setup",
                false,
                format!(
                    "could not advance the clock ({}) and it stayed at tick {tick:?}",
                    reply.status
                ),
            );
            return Ok(());
        }
        std::thread::sleep(Duration::from_millis(50));
    }
}

fn record_outcome(t: &mut Transcript, name: &str, outcome: &Outcome, budget: usize, round: u32) {
    let used = t.queries_in_round(round);
    let (passed, detail) = match outcome {
        Outcome::Reached => (true, format!("reached in {used} of {budget} queries")),
        Outcome::BudgetExhausted => (false, format!("budget of {budget} exhausted")),
        Outcome::GaveUp(why) => (false, format!("stopped after {used} queries: {why}")),
        Outcome::Rejected(path) => (false, format!("provider chose undiscovered path {path}")),
    };
    t.check(name, passed, detail);
}

fn live_value(t: &Transcript, path: &str) -> Option<Value> {
    t.served(path).map(|s| s.body["value"].clone())
}

fn has_snippet(t: &Transcript, path: &str, needle: &str) -> bool {
    t.served(path)
        .and_then(|s| s.body["source_snippet"].as_str())
        .is_some_and(|snip| snip.contains(needle))
}

fn links_to(t: &Transcript, from: &str, kind: &str, to: &str) -> bool {
    t.served(from).is_some_and(|s| {
        s.body["related"]
            .as_array()
            .is_some_and(|r| r.iter().any(|l| l["kind"] == kind && l["path"] == to))
    })
}

const S1_UE: &str = "IMSI_1";

fn s1<C: KnowledgeClient>(
    tool: &mut KnowledgeTool<C>,
    provider: &mut dyn CompletionProvider,
) -> Result<(), ExploreError> {
    tool.add_inputs("ue", &[S1_UE]);
    let target = format!("/live/ue/{S1_UE}/attributes/serving_cell");
    let goal = Goal::new(
        "What's the current cell connected by the UE of ID: IMSI_1?",
        &["serving_cell"],
        |t| t.served(&target).is_some(),
    );
    let budget = ScenarioId::S1SingleAttr.budget();
    let outcome = explore(tool, provider, Some("/docs/ue"), &goal, budget)?;
    let t = &mut tool.transcript;
    record_outcome(t, "goal", &outcome, budget, 1);
    let live = t.steps.iter().filter(|s| s.path.starts_with("/live/")).count();
    t.check("single_live_query", live == 1, format!("{live} live queries"));
    let answer = live_value(t, &target);
    let is_cell = answer
        .as_ref()
        .and_then(Value::as_str)
        .is_some_and(|c| c.starts_with("cell_"));
    t.check(
        "answer",
        is_cell,
        format!("serving cell {}", answer.clone().unwrap_or(Value::Null)),
    );
    t.answer = answer;
    Ok(())
}

const POWER_UP_CHAIN: [&str; 3] = [
    "/docs/ue/methods/power_up",
    "/docs/ue/methods/connect",
    "/docs/cell/methods/allocate_prbs",
];

fn s2<C: KnowledgeClient>(
    tool: &mut KnowledgeTool<C>,
    provider: &mut dyn CompletionProvider,
) -> Result<(), ExploreError> {
    let goal = Goal::new(
        "Explain what happens from UE power-up until it is scheduled.",
        &["power_up", "connect", "allocate_prbs"],
        |t| {
            POWER_UP_CHAIN
                .iter()
                .all(|p| has_snippet(t, p, p.rsplit('/').next().unwrap_or_default()))
        },
    );
    let budget = ScenarioId::S2MultiMethod.budget();
    let outcome = explore(tool, provider, Some("/docs/ue"), &goal, budget)?;
    let t = &mut tool.transcript;
    record_outcome(t, "goal", &outcome, budget, 1);
    let chained = links_to(t, POWER_UP_CHAIN[0], "triggers", POWER_UP_CHAIN[1])
        && links_to(t, POWER_UP_CHAIN[1], "triggers", POWER_UP_CHAIN[2]);
    t.check(
        "chain_links",
        chained,
        "power_up triggers connect triggers allocate_prbs",
    );
    t.answer = Some(json!(POWER_UP_CHAIN));
    Ok(())
}

pub const HANDOVER_CHAIN: [&str; 4] = [
    "/docs/ue/methods/execute_handover",
    "/docs/cell/methods/evaluate_a3",
    "/docs/cell/attributes/cio",
    "/docs/ric/methods/load_balance",
];

fn live_cio(t: &Transcript) -> Option<&crate::transcript::Step> {
    t.steps
        .iter()
        .find(|s| s.status == 200 && s.path.starts_with("/live/cell/") && s.path.ends_with("/attributes/cio"))
}

fn s3<C: KnowledgeClient>(
    tool: &mut KnowledgeTool<C>,
    provider: &mut dyn CompletionProvider,
) -> Result<(), ExploreError> {
    let goal = Goal::new(
        "Explain the complete handover mechanism implementation.",
        &["handover", "evaluate_a3", "cio", "load_balance"],
        |t| {
            has_snippet(t, HANDOVER_CHAIN[0], "execute_handover")
                && HANDOVER_CHAIN[1..].iter().all(|p| t.served(p).is_some())
                && live_cio(t).is_some()
        },
    );
    let budget = ScenarioId::S3CrossEntity.budget();
    let outcome = explore(tool, provider, Some("/docs/ue"), &goal, budget)?;
    let t = &mut tool.transcript;
    record_outcome(t, "goal", &outcome, budget, 1);
    let depth = t.served(HANDOVER_CHAIN[0]).map(|s| s.depth);
    t.check(
        "snippet_depth",
        depth.is_some_and(|d| d <= 2),
        format!("execute_handover snippet at depth {depth:?}"),
    );
    t.answer = live_cio(t).map(|s| json!({ "path": s.path, "cio": s.body["value"] }));
    Ok(())
}

const S4_ROUNDS: [&str; 2] = ["IMSI_2", "IMSI_3"];

fn s4<C: KnowledgeClient>(
    tool: &mut KnowledgeTool<C>,
    provider: &mut dyn CompletionProvider,
) -> Result<(), ExploreError> {
    let budget = ScenarioId::S4Reusability.budget();
    let mut answers = serde_json::Map::new();
    for (i, ue) in S4_ROUNDS.iter().enumerate() {
        let round = i as u32 + 1;
        if round > 1 {
            tool.next_round();
        }
        tool.add_inputs("ue", &[ue]);
        let target = format!("/live/ue/{ue}/attributes/cqi");
        let goal = Goal::new(&format!("What is the CQI of {ue}?"), &["cqi"], |t| {
            t.served(&target).is_some()
        });
        let entry = (round == 1).then_some("/docs/ue");
        let outcome = explore(tool, provider, entry, &goal, budget)?;
        record_outcome(
            &mut tool.transcript,
            &format!("round_{round}_goal"),
            &outcome,
            budget,
            round,
        );
        answers.insert(
            ue.to_string(),
            live_value(&tool.transcript, &target).unwrap_or(Value::Null),
        );
    }
    let t = &mut tool.transcript;
    let (r1, r2) = (t.queries_in_round(1), t.queries_in_round(2));
    t.check("fewer_queries", r2 < r1, format!("round 1: {r1}, round 2: {r2}"));
    let round2: Vec<_> = t.steps.iter().filter(|s| s.round == 2).collect();
    let reused = round2
        .iter()
        .any(|s| matches!(s.provenance, Provenance::Template { .. } | Provenance::Discovered));
    let re_explored = round2.iter().any(|s| s.path.starts_with("/docs"));
    t.check(
        "reuse",
        reused && !re_explored,
        "round 2 used an endpoint learned in round 1 without reading docs again",
    );
    t.answer = Some(Value::Object(answers));
    Ok(())
}

fn d1<C: KnowledgeClient>(
    tool: &mut KnowledgeTool<C>,
    provider: &mut dyn CompletionProvider,
) -> Result<(), ExploreError> {
    const SUMMARY: &str = "/live/network/summary";
    let goal = Goal::new(
        "How many UEs are connected right now, and which cell is busiest?",
        &["summary"],
        |t| t.served(SUMMARY).is_some(),
    );
    let budget = ScenarioId::D1EngineerChat.budget();
    let outcome = explore(tool, provider, Some("/docs"), &goal, budget)?;
    let t = &mut tool.transcript;
    record_outcome(t, "goal", &outcome, budget, 1);
    if let Some(step) = t.served(SUMMARY) {
        let busiest = step.body["cells"].as_object().and_then(|cells| {
            cells
                .iter()
                .filter_map(|(id, c)| c["load"].as_f64().map(|l| (id.clone(), l)))
                .max_by(|a, b| a.1.total_cmp(&b.1).then_with(|| b.0.cmp(&a.0)))
        });
        let answer = json!({
            "ue_connected": step.body["ue_connected"],
            "busiest_cell": busiest.map(|b| b.0),
        });
        t.check("answer", answer["ue_connected"].is_u64(), answer.to_string());
        t.answer = Some(answer);
    }
    Ok(())
}

fn well_formed_endpoint(url: &str, sub_id: &str) -> bool {
    url::Url::parse(url).is_ok_and(|u| {
        matches!(u.scheme(), "http" | "https")
            && u.host_str().is_some_and(|h| !h.is_empty())
            && u.path_segments().and_then(|mut s| s.next_back()) == Some(sub_id)
    })
}

fn d2<C: KnowledgeClient>(tool: &mut KnowledgeTool<C>) -> Result<(), ExploreError> {
    let profile = drone_profile();
    tool.add_inputs("ue", &["IMSI_1", "IMSI_2", "IMSI_3"]);
    let matched = tool
        .query("POST", "/catalog/match", Some(&profile), 0, Provenance::Entry)?
        .clone();
    let first = matched.body["matches"][0]["service"]["id"]
        .as_str()
        .map(str::to_string);
    tool.transcript.check(
        "recommendation",
        matched.status == 200 && first.is_some(),
        format!("first match {}", first.as_deref().unwrap_or("none")),
    );
    let (Some(service), Some(subscribe)) = (first, matched.body["links"]["subscribe"].as_str()) else {
        return Ok(());
    };
    let request = json!({ "service_id": service, "ue_ids": profile["ue_ids"] });
    let created = tool
        .query("POST", subscribe, Some(&request), 1, Provenance::Discovered)?
        .clone();
    let t = &mut tool.transcript;
    let sub = &created.body;
    t.check(
        "subscription_active",
        created.status == 201 && sub["status"] == "ACTIVE",
        format!("{} status {}", created.status, sub["status"]),
    );
    let id = sub["id"].as_str().unwrap_or_default();
    let url = sub["endpoint_url"].as_str().unwrap_or_default();
    t.check("endpoint_url", well_formed_endpoint(url, id), url.to_string());
    let snippets_ok = profile["ue_ids"].as_array().is_some_and(|ues| {
        ues.iter().all(|ue| {
            ue.as_str()
                .and_then(|ue| sub["integration_snippets"][ue].as_str())
                .is_some_and(|s| s.contains(url))
        })
    });
    t.check(
        "snippets",
        snippets_ok,
        "each UE's snippet embeds the endpoint URL",
    );
    t.answer = Some(json!({
        "subscription": id,
        "service_id": sub["service_id"],
        "edge_server": sub["edge_server_id"],
        "endpoint_url": url,
    }));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_short_and_long_names() {
        assert_eq!("S3".parse::<ScenarioId>().unwrap(), ScenarioId::S3CrossEntity);
        assert_eq!("d2".parse::<ScenarioId>().unwrap(), ScenarioId::D2Provisioning);
        assert_eq!(
            "S1_single_attr".parse::<ScenarioId>().unwrap(),
            ScenarioId::S1SingleAttr
        );
        assert!("S9".parse::<ScenarioId>().is_err());
    }

    #[test]
    fn endpoint_url_shape() {
        assert!(well_formed_endpoint(
            "http://edge1.edge.local/infer/aisub-1",
            "aisub-1"
        ));
        assert!(!well_formed_endpoint("edge1/infer/aisub-1", "aisub-1"));
        assert!(!well_formed_endpoint(
            "http://edge1.edge.local/infer/aisub-2",
            "aisub-1"
        ));
    }
}
