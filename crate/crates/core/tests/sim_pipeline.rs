use std::collections::{BTreeMap, BTreeSet};

use kpa_core::sim::handover::{a3_condition, evaluate_a3, execute_handover, A3Decision};
use kpa_core::sim::invariants::{check_a3_soundness, check_state};
use kpa_core::sim::ric::load_balance;
use kpa_core::sim::{
    attach, init_network, step, A3Policy, Area, Cell, ConnectionState, DemandRange, EventType, GnbPlacement,
    NetworkEvent, NetworkState, Position, SimCommand, SimConfig, Simulator, SpeedRange, Ue,
};
use proptest::prelude::*;

fn gnb(id: &str, x: f64, y: f64) -> GnbPlacement {
    GnbPlacement {
        id: id.into(),
        position: Position::new(x, y),
    }
}

fn static_config(gnbs: Vec<GnbPlacement>, ues: Vec<Position>) -> SimConfig {
    SimConfig {
        area: Area {
            width_m: 20_000.0,
            height_m: 20_000.0,
        },
        gnbs,
        cells_per_gnb: 1,
        ue_count: ues.len() as u32,
        ue_positions: ues,
        mobility_speed_mps: SpeedRange { min: 0.0, max: 0.0 },
        ..SimConfig::default()
    }
}

fn blank_ue(rsrp: &[(&str, f64)]) -> Ue {
    Ue {
        id: "IMSI_1".into(),
        position: Position::default(),
        serving_cell: Some("a".into()),
        connection_state: ConnectionState::Connected,
        cqi: 0,
        rsrp_map: rsrp.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        prb_allocated: 0,
        demand_prbs: 10,
        a3_counters: BTreeMap::new(),
        ai_subscriptions: vec![],
        powered: true,
        waypoint: Position::default(),
        speed_mps: 0.0,
    }
}

fn blank_cell(id: &str) -> Cell {
    Cell {
        id: id.into(),
        gnb_id: "gnb1".into(),
        position: Position::default(),
        tx_power_dbm: 30.0,
        frequency_mhz: 3500.0,
        prb_capacity: 100,
        prb_allocated_total: 0,
        cio: BTreeMap::new(),
        connected_ues: BTreeSet::new(),
    }
}

fn run(sim: &mut Simulator, ticks: u64) -> Vec<NetworkEvent> {
    (0..ticks).flat_map(|_| sim.tick()).collect()
}

#[test]
fn empty_network_has_no_ues() {
    let state = init_network(SimConfig::default()).unwrap();
    assert!(state.ues.is_empty());
    assert_eq!(state.tick, 0);
}

#[test]
fn init_is_deterministic() {
    let cfg = SimConfig {
        ue_count: 25,
        ..SimConfig::default()
    };
    let a = init_network(cfg.clone()).unwrap();
    let b = init_network(cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_vec(&a).unwrap(), serde_json::to_vec(&b).unwrap());
}

#[test]
fn cells_follow_naming_rule() {
    let cfg = SimConfig {
        gnbs: vec![gnb("gnb1", 500.0, 500.0), gnb("gnb2", 1500.0, 500.0)],
        cells_per_gnb: 3,
        ..SimConfig::default()
    };
    let state = init_network(cfg).unwrap();
    let ids: Vec<&str> = state.cells.keys().map(String::as_str).collect();
    assert_eq!(
        ids,
        [
            "cell_gnb1_0",
            "cell_gnb1_1",
            "cell_gnb1_2",
            "cell_gnb2_0",
            "cell_gnb2_1",
            "cell_gnb2_2"
        ]
    );
    assert!(check_state(&state).is_empty());
}

#[test]
fn invalid_config_names_field() {
    let cfg = SimConfig {
        prb_capacity_per_cell: 0,
        ..SimConfig::default()
    };
    assert_eq!(init_network(cfg).unwrap_err().field, "prb_capacity_per_cell");
}

#[test]
fn no_power_up_no_attach() {
    let cfg = SimConfig {
        ue_count: 10,
        ..SimConfig::default()
    };
    let mut sim = Simulator::new(cfg).unwrap();
    let events = run(&mut sim, 20);
    assert!(events.iter().all(|e| e.event_type != EventType::UeAttached));
    assert_eq!(sim.state().connected_count(), 0);
}

#[test]
fn single_ue_attaches_at_tick_one() {
    // UE 10 m from the only cell: rsrp = 30 - (32 + 35) = -37 dBm, above the floor.
    let cfg = static_config(vec![gnb("gnb1", 0.0, 0.0)], vec![Position::new(10.0, 0.0)]).with_power_up_at(1);
    let (state, events) = step(init_network(cfg).unwrap());
    assert_eq!(state.tick, 1);
    let attached: Vec<_> = events
        .iter()
        .filter(|e| e.event_type == EventType::UeAttached)
        .collect();
    assert_eq!(attached.len(), 1);
    assert_eq!(attached[0].tick, 1);
    assert_eq!(attached[0].subject, "IMSI_1");
    assert_eq!(attached[0].payload["cell"], "cell_gnb1_0");
    assert_eq!(attached[0].payload["rsrp_dbm"], "-37.00");
    let ue = &state.ues["IMSI_1"];
    assert_eq!(ue.serving_cell.as_deref(), Some("cell_gnb1_0"));
    assert_eq!(ue.connection_state, ConnectionState::Connected);
    // sinr 63 dB clamps to cqi 15
    assert_eq!(ue.cqi, 15);
    assert!(events.iter().all(|e| e.tick == 1));
}

#[test]
fn equal_rsrp_attaches_to_smaller_cell_id() {
    let cfg = static_config(
        vec![gnb("gnb2", 0.0, 0.0), gnb("gnb1", 200.0, 0.0)],
        vec![Position::new(100.0, 50.0)],
    );
    let mut state = init_network(cfg).unwrap();
    let r = &state.ues["IMSI_1"].rsrp_map;
    assert_eq!(r["cell_gnb1_0"], r["cell_gnb2_0"]);
    let events = attach::power_up(&mut state, "IMSI_1");
    assert_eq!(events[0].payload["cell"], "cell_gnb1_0");
}

#[test]
fn below_floor_stays_detached() {
    // 10 km: 30 - (32 + 35 * 4) = -142 dBm < -120 dBm
    let cfg =
        static_config(vec![gnb("gnb1", 0.0, 0.0)], vec![Position::new(10_000.0, 0.0)]).with_power_up_at(1);
    let (state, events) = step(init_network(cfg).unwrap());
    assert!(events.iter().all(|e| e.event_type != EventType::UeAttached));
    assert_eq!(state.ues["IMSI_1"].connection_state, ConnectionState::Detached);
    assert!(state.ues["IMSI_1"].serving_cell.is_none());
}

#[test]
fn a3_condition_examples() {
    let (s, n) = (blank_cell("a"), blank_cell("b"));
    let ue = blank_ue(&[("a", -90.0), ("b", -88.0)]);
    // -88 + 0 > -90 + 1
    assert!(a3_condition(&ue, &s, &n, 1.0));
    let ue = blank_ue(&[("a", -90.0), ("b", -90.0)]);
    assert!(!a3_condition(&ue, &s, &n, 0.0));
    let mut biased = blank_cell("a");
    biased.cio.insert("b".into(), 0.5);
    assert!(a3_condition(&ue, &biased, &n, 0.0));
}

#[test]
fn a3_counter_resets_before_ttt() {
    let policy = A3Policy {
        hysteresis_db: 1.0,
        ttt_ticks: 3,
    };
    let (s, n) = (blank_cell("a"), blank_cell("b"));
    let mut ue = blank_ue(&[("a", -90.0), ("b", -80.0)]);
    assert_eq!(evaluate_a3(&mut ue, &s, &n, policy), A3Decision::None);
    assert_eq!(evaluate_a3(&mut ue, &s, &n, policy), A3Decision::None);
    assert_eq!(ue.a3_counters["b"], 2);
    ue.rsrp_map.insert("b".into(), -95.0);
    assert_eq!(evaluate_a3(&mut ue, &s, &n, policy), A3Decision::None);
    assert_eq!(ue.a3_counters["b"], 0);
    ue.rsrp_map.insert("b".into(), -80.0);
    for _ in 0..2 {
        assert_eq!(evaluate_a3(&mut ue, &s, &n, policy), A3Decision::None);
    }
    assert_eq!(
        evaluate_a3(&mut ue, &s, &n, policy),
        A3Decision::Trigger("b".into())
    );
}

/// Two UEs on gnb1's cell, both far better served by gnb2's cell, which has
/// room for exactly one of them.
fn contention_sim() -> Simulator {
    let mut cfg = static_config(
        vec![gnb("gnb1", 0.0, 0.0), gnb("gnb2", 1000.0, 0.0)],
        vec![Position::new(900.0, 0.0), Position::new(910.0, 0.0)],
    )
    .with_power_up_at(1);
    cfg.prb_capacity_per_cell = 10;
    cfg.demand_prbs = DemandRange { min: 10, max: 10 };
    let mut sim = Simulator::new(cfg).unwrap();
    sim.enqueue(SimCommand::SetTxPower {
        cell: "cell_gnb2_0".into(),
        tx_power_dbm: -40.0,
    })
    .unwrap();
    sim.tick();
    assert_eq!(sim.state().cells["cell_gnb1_0"].connected_ues.len(), 2);
    sim.enqueue(SimCommand::SetTxPower {
        cell: "cell_gnb2_0".into(),
        tx_power_dbm: 30.0,
    })
    .unwrap();
    sim
}

#[test]
fn handover_admission_follows_id_order() {
    let mut sim = contention_sim();
    sim.tick();
    sim.tick();
    let before = sim.state().clone();

    // Oracle: both orders on the pre-trigger state; whichever goes first wins.
    for order in [["IMSI_1", "IMSI_2"], ["IMSI_2", "IMSI_1"]] {
        let mut s = before.clone();
        s.tick += 1;
        let first = execute_handover(&mut s, order[0], "cell_gnb2_0");
        let second = execute_handover(&mut s, order[1], "cell_gnb2_0");
        assert_eq!(first.last().unwrap().event_type, EventType::HandoverComplete);
        assert_eq!(second.len(), 1);
        assert_eq!(second[0].payload["admitted"], "false");
        assert_eq!(s.ues[order[1]].serving_cell.as_deref(), Some("cell_gnb1_0"));
    }

    let events = sim.tick();
    assert_eq!(sim.state().tick, 4);
    let ho: Vec<_> = events
        .iter()
        .filter(|e| {
            matches!(
                e.event_type,
                EventType::HandoverTriggered | EventType::HandoverComplete
            )
        })
        .map(|e| {
            (
                e.subject.as_str(),
                e.event_type,
                e.payload.get("admitted").cloned(),
            )
        })
        .collect();
    assert_eq!(
        ho,
        vec![
            ("IMSI_1", EventType::HandoverTriggered, Some("true".into())),
            ("IMSI_1", EventType::HandoverComplete, None),
            ("IMSI_2", EventType::HandoverTriggered, Some("false".into())),
        ]
    );
    let s = sim.state();
    assert_eq!(s.ues["IMSI_1"].serving_cell.as_deref(), Some("cell_gnb2_0"));
    assert_eq!(s.ues["IMSI_2"].serving_cell.as_deref(), Some("cell_gnb1_0"));
    assert!(check_state(s).is_empty(), "{:?}", check_state(s));
}

#[test]
fn handover_to_free_target_moves_membership() {
    let mut sim = contention_sim();
    sim.tick();
    let mut s = sim.state().clone();
    let events = execute_handover(&mut s, "IMSI_2", "cell_gnb2_0");
    assert_eq!(events.len(), 2);
    let holders: Vec<_> = s
        .cells
        .values()
        .filter(|c| c.connected_ues.contains("IMSI_2"))
        .map(|c| c.id.as_str())
        .collect();
    assert_eq!(holders, ["cell_gnb2_0"]);
}

#[test]
fn handover_to_saturated_target_is_rejected() {
    let mut sim = contention_sim();
    sim.tick();
    let mut s = sim.state().clone();
    s.cells.get_mut("cell_gnb2_0").unwrap().prb_allocated_total = 10;
    let before_cells = s.cells.clone();
    let events = execute_handover(&mut s, "IMSI_1", "cell_gnb2_0");
    assert_eq!(events.len(), 1);
    assert_eq!(events[0].event_type, EventType::HandoverTriggered);
    assert_eq!(events[0].payload["admitted"], "false");
    assert_eq!(s.cells, before_cells);
    assert_eq!(s.ues["IMSI_1"].serving_cell.as_deref(), Some("cell_gnb1_0"));
}

fn two_cell_state(alloc_s: u32, alloc_t: u32) -> NetworkState {
    let cfg = static_config(vec![gnb("gnb1", 0.0, 0.0), gnb("gnb2", 1000.0, 0.0)], vec![]);
    let mut s = init_network(cfg).unwrap();
    s.cells.get_mut("cell_gnb1_0").unwrap().prb_allocated_total = alloc_s;
    s.cells.get_mut("cell_gnb2_0").unwrap().prb_allocated_total = alloc_t;
    s
}

#[test]
fn load_balance_rules() {
    let (updates, events) = load_balance(&two_cell_state(50, 50));
    assert!(updates.is_empty() && events.is_empty());

    let (updates, events) = load_balance(&two_cell_state(90, 10));
    let got: Vec<_> = updates
        .iter()
        .map(|u| (u.source.as_str(), u.target.as_str(), u.cio_db))
        .collect();
    assert_eq!(
        got,
        [
            ("cell_gnb1_0", "cell_gnb2_0", 1.0),
            ("cell_gnb2_0", "cell_gnb1_0", -1.0)
        ]
    );
    assert_eq!(events.len(), 2);
    assert!(events.iter().all(|e| e.event_type == EventType::CioAdjusted));

    let mut s = two_cell_state(90, 10);
    s.cells
        .get_mut("cell_gnb1_0")
        .unwrap()
        .cio
        .insert("cell_gnb2_0".into(), 6.0);
    s.cells
        .get_mut("cell_gnb2_0")
        .unwrap()
        .cio
        .insert("cell_gnb1_0".into(), -6.0);
    let (updates, _) = load_balance(&s);
    assert!(updates.is_empty());
}

#[test]
fn replay_gives_identical_event_logs() {
    let cfg = SimConfig {
        ue_count: 30,
        seed: 7,
        ..SimConfig::default()
    }
    .with_staggered_power_up(1);
    let a = run(&mut Simulator::new(cfg.clone()).unwrap(), 300);
    let b = run(&mut Simulator::new(cfg).unwrap(), 300);
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let ticks: Vec<u64> = a.iter().map(|e| e.tick).collect();
    assert!(ticks.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn mobile_network_produces_handovers() {
    let cfg = SimConfig {
        ue_count: 40,
        seed: 3,
        mobility_speed_mps: SpeedRange { min: 20.0, max: 40.0 },
        ..SimConfig::default()
    }
    .with_power_up_at(1);
    let events = run(&mut Simulator::new(cfg).unwrap(), 400);
    assert!(events.iter().any(|e| e.event_type == EventType::HandoverComplete));
}

#[test]
fn bus_subscribers_see_tick_events() {
    use std::sync::{Arc, Mutex};
    let cfg = SimConfig {
        ue_count: 5,
        ..SimConfig::default()
    }
    .with_power_up_at(1);
    let mut sim = Simulator::new(cfg).unwrap();
    let seen = Arc::new(Mutex::new(Vec::new()));
    let sink = seen.clone();
    sim.bus_mut().subscribe(
        EventType::UeAttached,
        Arc::new(move |e: &NetworkEvent| sink.lock().unwrap().push(e.subject.clone())),
    );
    let emitted = sim.tick();
    let expected: Vec<String> = emitted
        .iter()
        .filter(|e| e.event_type == EventType::UeAttached)
        .map(|e| e.subject.clone())
        .collect();
    assert_eq!(*seen.lock().unwrap(), expected);
}

#[test]
fn enqueue_rejects_unknown_entities() {
    let mut sim = Simulator::new(SimConfig::default()).unwrap();
    assert!(sim.enqueue(SimCommand::PowerUp { ue: "IMSI_9".into() }).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn invariants_hold_over_random_runs(
        seed in 0u64..10_000,
        ues in 0u32..40,
        gnbs in 1u32..5,
        cells in 1u32..4,
        capacity in 5u32..60,
    ) {
        let cfg = SimConfig {
            seed,
            ue_count: ues,
            gnbs: kpa_core::sim::grid_gnbs(gnbs, SimConfig::default().area),
            cells_per_gnb: cells,
            prb_capacity_per_cell: capacity,
            mobility_speed_mps: SpeedRange { min: 5.0, max: 60.0 },
            ..SimConfig::default()
        }
        .with_staggered_power_up(1);
        let mut sim = Simulator::new(cfg).unwrap();
        let mut history = vec![sim.state().clone()];
        let mut log = Vec::new();
        for _ in 0..120 {
            log.extend(sim.tick());
            let v = check_state(sim.state());
            prop_assert!(v.is_empty(), "tick {}: {:?}", sim.state().tick, v);
            history.push(sim.state().clone());
        }
        let a3 = check_a3_soundness(&history, &log);
        prop_assert!(a3.is_empty(), "{:?}", a3);
    }
}
