mod common;

use std::fs::OpenOptions;
use std::io::Write;

use common::*;
use kpa_core::sim::Simulator;
use kpa_service::fixture::{mobile_config, scenario_config};
use kpa_service::{KnowledgePlane, ServiceConfig};
use proptest::prelude::*;
use serde_json::Value;

#[test]
fn stored_ticks_equal_fresh_replay() {
    let config = mobile_config(5, 20, 2, 2);
    let p = plane(config.clone());
    tick(&p, 120);
    let mut sim = Simulator::new(config).unwrap();
    for t in 0..=120u64 {
        let snap = p.store().at(Some(t)).unwrap();
        assert_eq!(snap.tick, t);
        assert_eq!(snap.state, *sim.state(), "tick {t}");
        sim.tick();
    }
}

#[test]
fn historical_views_do_not_change_as_time_moves() {
    let p = plane(mobile_config(9, 15, 2, 2));
    let mut seen = Vec::new();
    for _ in 0..30 {
        let t = tick(&p, 1);
        let (_, v) = get(&p, ADMIN, "/live/ue/IMSI_4");
        seen.push((t, v));
    }
    for (t, v) in seen {
        let (s, again) = get(&p, ADMIN, &format!("/live/ue/IMSI_4?at={t}"));
        assert_eq!(s, 200);
        assert_eq!(again, v, "tick {t}");
    }
}

fn persisted(dir: &std::path::Path) -> ServiceConfig {
    ServiceConfig {
        persist_dir: Some(dir.to_path_buf()),
        ..manual_config()
    }
}

#[test]
fn restart_resumes_where_it_stopped() {
    let dir = tempfile::tempdir().unwrap();
    let config = mobile_config(3, 12, 2, 2);

    let first = KnowledgePlane::new(config.clone(), persisted(dir.path())).unwrap();
    tick(&first, 25);
    for _ in 0..4 {
        get(&first, READONLY, "/docs");
    }
    let audit_before = first.audit_since(0);
    drop(first);

    let second = KnowledgePlane::new(config.clone(), persisted(dir.path())).unwrap();
    assert_eq!(second.latest_tick(), 25);
    assert_eq!(second.audit_since(0), audit_before);
    get(&second, READONLY, "/docs");
    let seqs: Vec<u64> = second.audit_since(0).iter().map(|r| r.seq).collect();
    assert_eq!(seqs, (1..=seqs.len() as u64).collect::<Vec<_>>());
    tick(&second, 15);

    // Resuming continues the same trajectory as an uninterrupted run.
    let mut sim = Simulator::new(config).unwrap();
    for _ in 0..40 {
        sim.tick();
    }
    assert_eq!(second.latest_state(), *sim.state());
    assert_eq!(second.store().at(Some(10)).unwrap().state.tick, 10);
}

#[test]
fn torn_tail_is_dropped_on_restart() {
    let dir = tempfile::tempdir().unwrap();
    let config = scenario_config();
    let first = KnowledgePlane::new(config.clone(), persisted(dir.path())).unwrap();
    tick(&first, 8);
    get(&first, ADMIN, "/docs");
    drop(first);
    for name in ["snapshots.jsonl", "audit.jsonl"] {
        let mut f = OpenOptions::new()
            .append(true)
            .open(dir.path().join(name))
            .unwrap();
        f.write_all(b"{\"tick\": 9, \"sta").unwrap();
    }
    let second = KnowledgePlane::new(config, persisted(dir.path())).unwrap();
    assert_eq!(second.latest_tick(), 8);
    assert_eq!(tick(&second, 1), 9);
    let records = second.audit_since(0);
    let seqs: Vec<u64> = records.iter().map(|r| r.seq).collect();
    assert_eq!(seqs, (1..=seqs.len() as u64).collect::<Vec<_>>());
}

#[test]
fn insights_survive_restart() {
    let dir = tempfile::tempdir().unwrap();
    let config = mobile_config(11, 30, 1, 1);
    let first = KnowledgePlane::new(config.clone(), persisted(dir.path())).unwrap();
    tick(&first, 30);
    let (_, before) = get(&first, READONLY, "/insights/current?at=20");
    drop(first);
    let second = KnowledgePlane::new(config, persisted(dir.path())).unwrap();
    let (_, after) = get(&second, READONLY, "/insights/current?at=20");
    assert_eq!(before, after);
}

fn contains_position(v: &Value, x: f64) -> bool {
    match v {
        Value::Number(n) => n.as_f64() == Some(x),
        Value::Array(a) => a.iter().any(|v| contains_position(v, x)),
        Value::Object(o) => o.values().any(|v| contains_position(v, x)),
        _ => false,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn masked_roles_never_see_positions(ue in 1u32..=3, at in 0u64..=3, token_idx in 0usize..2) {
        let token = [TENANT, READONLY][token_idx];
        let p = plane(scenario_config());
        tick(&p, 3);
        let id = format!("IMSI_{ue}");
        let truth = p.store().at(Some(at)).unwrap().state.ues[&id].position;
        for path in [
            format!("/live/ue/{id}?at={at}"),
            format!("/live/ue/{id}/attributes/position?at={at}"),
        ] {
            let (s, v) = get(&p, token, &path);
            prop_assert_eq!(s, 200);
            prop_assert!(!contains_position(&v, truth.x), "{} leaked in {}", truth.x, path);
            let (_, full) = get(&p, ADMIN, &path);
            prop_assert!(contains_position(&full, truth.x));
        }
    }
}
