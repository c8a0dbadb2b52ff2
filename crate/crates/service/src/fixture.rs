//! Small deterministic scenarios shared by tests, the harness and the CLI.

use kpa_core::sim::{GnbPlacement, Position, ScheduledPowerUp, SimConfig, SpeedRange};

/// Two gNBs with two cells each and three static UEs, all powered up at
/// tick 1. IMSI_1 sits next to gnb1 and IMSI_3 next to gnb2.
pub fn scenario_config() -> SimConfig {
    let ues = [
        Position { x: 260.0, y: 500.0 },
        Position { x: 480.0, y: 520.0 },
        Position { x: 740.0, y: 480.0 },
    ];
    SimConfig {
        seed: 7,
        tick_duration_ms: 100,
        area: kpa_core::sim::Area {
            width_m: 1000.0,
            height_m: 1000.0,
        },
        gnbs: vec![
            GnbPlacement {
                id: "gnb1".into(),
                position: Position { x: 250.0, y: 500.0 },
            },
            GnbPlacement {
                id: "gnb2".into(),
                position: Position { x: 750.0, y: 500.0 },
            },
        ],
        cells_per_gnb: 2,
        ue_count: ues.len() as u32,
        ue_positions: ues.to_vec(),
        mobility_speed_mps: SpeedRange { min: 0.0, max: 0.0 },
        power_up_schedule: (1..=ues.len() as u32)
            .map(|k| ScheduledPowerUp {
                tick: 1,
                ue: kpa_core::sim::ue_id(k),
            })
            .collect(),
        ..SimConfig::default()
    }
}

/// Mobile network for load and property tests: `ues` UEs with staggered
/// power-ups over `gnbs` x `cells_per_gnb` cells.
pub fn mobile_config(seed: u64, ues: u32, gnbs: u32, cells_per_gnb: u32) -> SimConfig {
    let base = SimConfig::default();
    SimConfig {
        seed,
        ue_count: ues,
        gnbs: kpa_core::sim::grid_gnbs(gnbs, base.area),
        cells_per_gnb,
        ..base
    }
    .with_staggered_power_up(1)
}
