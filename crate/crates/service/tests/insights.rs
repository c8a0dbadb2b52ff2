mod common;

use std::collections::BTreeSet;

use common::*;
use kpa_core::sim::{DemandRange, NetworkState, Position, SimCommand, SimConfig, Simulator};
use kpa_service::fixture::{mobile_config, scenario_config};
use serde_json::json;

/// (rule_id, subject, fired_tick)
type Firing = (String, String, u64);

fn load(state: &NetworkState, cell: &str) -> f64 {
    let c = &state.cells[cell];
    f64::from(c.prb_allocated_total) / f64::from(c.prb_capacity)
}

fn cqi(state: &NetworkState, ue: &str) -> f64 {
    f64::from(state.ues[ue].cqi)
}

/// Whether each default rule holds at `t`, straight from the definitions:
/// congestion when load > 0.8 on each of the 3 ticks ending at t, a CQI
/// anomaly when CQI at t is at least 8 below its value at t-1 or t-2.
fn congested(states: &[NetworkState], cell: &str, t: usize) -> bool {
    t >= 2 && (t - 2..=t).all(|k| load(&states[k], cell) > 0.8)
}

fn cqi_dropped(states: &[NetworkState], ue: &str, t: usize) -> bool {
    (t.saturating_sub(2)..t).any(|k| cqi(&states[k], ue) - cqi(&states[t], ue) >= 8.0)
}

fn oracle(states: &[NetworkState], t: usize) -> BTreeSet<Firing> {
    let first_of_run = |holds: &dyn Fn(usize) -> bool| {
        let mut k = t;
        while k > 0 && holds(k - 1) {
            k -= 1;
        }
        k as u64
    };
    let mut out = BTreeSet::new();
    for cell in states[t].cells.keys() {
        let holds = |k: usize| congested(states, cell, k);
        if holds(t) {
            out.insert(("congestion_risk".to_string(), cell.clone(), first_of_run(&holds)));
        }
    }
    for ue in states[t].ues.keys() {
        let holds = |k: usize| cqi_dropped(states, ue, k);
        if holds(t) {
            out.insert(("cqi_anomaly".to_string(), ue.clone(), first_of_run(&holds)));
        }
    }
    out
}

fn served(p: &kpa_service::KnowledgePlane, t: usize) -> BTreeSet<Firing> {
    let (s, v) = get(p, READONLY, &format!("/insights/current?at={t}"));
    assert_eq!(s, 200);
    v["insights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| {
            (
                i["rule_id"].as_str().unwrap().to_string(),
                i["subject"].as_str().unwrap().to_string(),
                i["fired_tick"].as_u64().unwrap(),
            )
        })
        .collect()
}

/// Run the plane and an independent simulator side by side, applying the
/// same commands before the same ticks, then compare every tick's insights.
fn compare(config: SimConfig, ticks: usize, commands: &[(usize, SimCommand)]) -> usize {
    let p = plane(config.clone());
    let mut sim = Simulator::new(config).unwrap();
    let mut states = vec![sim.state().clone()];
    for t in 1..=ticks {
        for (_, c) in commands.iter().filter(|(at, _)| *at == t) {
            let (s, _) = post(&p, OPERATOR, "/sim/commands", serde_json::to_value(c).unwrap());
            assert_eq!(s, 202);
            sim.enqueue(c.clone()).unwrap();
        }
        tick(&p, 1);
        sim.tick();
        states.push(sim.state().clone());
    }
    let mut fired = 0;
    for t in 0..=ticks {
        let expected = oracle(&states, t);
        assert_eq!(served(&p, t), expected, "tick {t}");
        fired += expected.len();
    }
    fired
}

#[test]
fn congestion_matches_oracle() {
    let config = SimConfig {
        demand_prbs: DemandRange { min: 15, max: 30 },
        ..mobile_config(11, 30, 1, 1)
    };
    let fired = compare(config, 40, &[]);
    assert!(fired > 0, "fixture never congests");
}

#[test]
fn cqi_drop_after_move_matches_oracle() {
    let far = Position { x: 999.0, y: 0.0 };
    let commands = [
        (
            5,
            SimCommand::Move {
                ue: "IMSI_1".into(),
                position: far,
            },
        ),
        (
            9,
            SimCommand::Move {
                ue: "IMSI_1".into(),
                position: Position { x: 255.0, y: 500.0 },
            },
        ),
        (
            9,
            SimCommand::Move {
                ue: "IMSI_3".into(),
                position: far,
            },
        ),
    ];
    let fired = compare(scenario_config(), 15, &commands);
    assert!(fired > 0, "no CQI anomaly fired");
}

#[test]
fn mobile_runs_match_oracle() {
    for seed in [1, 2, 3] {
        compare(mobile_config(seed, 25, 2, 3), 60, &[]);
    }
}

#[test]
fn subject_query_filters() {
    let p = plane(scenario_config());
    tick(&p, 4);
    post(
        &p,
        OPERATOR,
        "/sim/commands",
        json!({ "command": "move", "ue": "IMSI_1", "position": { "x": 999.0, "y": 0.0 } }),
    );
    tick(&p, 1);
    let (_, all) = get(&p, READONLY, "/insights/current");
    let (_, one) = get(&p, READONLY, "/insights/current?subject=IMSI_1");
    let one = one["insights"].as_array().unwrap();
    assert!(!one.is_empty());
    assert!(one.iter().all(|i| i["subject"] == "IMSI_1"));
    assert!(all["insights"].as_array().unwrap().len() >= one.len());
    let (_, evidence) = get(&p, READONLY, "/insights/current?subject=IMSI_1");
    let ev = &evidence["insights"][0];
    assert_eq!(ev["insight_type"], "CQI_ANOMALY");
    assert_eq!(ev["entity_type"], "ue");
    assert_eq!(ev["attribute"], "cqi");
    assert_eq!(ev["evidence"].as_array().unwrap().last().unwrap()["tick"], 5);
}
