//! Network construction and the per-tick pipeline.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::attach::{detach, power_up};
use super::bus::EventBus;
use super::config::{ConfigError, SimConfig};
use super::handover::{evaluate_a3, execute_handover, A3Decision};
use super::mobility::{move_ues, random_position, random_speed};
use super::model::{
    cell_id, ue_id, Cell, ConnectionState, EdgeServer, EventType, Gnb, NetworkEvent, NetworkState, RicPolicy,
    SimCommand, Ue,
};
use super::radio::{compute_cqi, compute_rsrp, sinr_db};
use super::ric::{apply_cio_updates, load_balance, XAPP_A3_HANDOVER, XAPP_LOAD_BALANCER};
use super::scheduler::{allocate_prbs, get_load};

/// Distance of each sector's reference point from its site, meters.
const SECTOR_OFFSET_M: f64 = 30.0;
const BASE_FREQUENCY_MHZ: f64 = 3500.0;
const CARRIER_SPACING_MHZ: f64 = 20.0;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown {kind} `{id}`")]
    UnknownEntity { kind: &'static str, id: String },
}

pub fn init_network(config: SimConfig) -> Result<NetworkState, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut gnbs = BTreeMap::new();
    let mut cells = BTreeMap::new();
    for placement in &config.gnbs {
        let mut cell_ids = Vec::new();
        for n in 0..config.cells_per_gnb {
            let id = cell_id(&placement.id, n);
            let offset = if config.cells_per_gnb > 1 {
                let angle = TAU * f64::from(n) / f64::from(config.cells_per_gnb);
                (SECTOR_OFFSET_M * angle.cos(), SECTOR_OFFSET_M * angle.sin())
            } else {
                (0.0, 0.0)
            };
            cells.insert(
                id.clone(),
                Cell {
                    id: id.clone(),
                    gnb_id: placement.id.clone(),
                    position: super::model::Position::new(
                        placement.position.x + offset.0,
                        placement.position.y + offset.1,
                    ),
                    tx_power_dbm: config.tx_power_dbm,
                    frequency_mhz: BASE_FREQUENCY_MHZ + CARRIER_SPACING_MHZ * f64::from(n),
                    prb_capacity: config.prb_capacity_per_cell,
                    prb_allocated_total: 0,
                    cio: BTreeMap::new(),
                    connected_ues: BTreeSet::new(),
                },
            );
            cell_ids.push(id);
        }
        gnbs.insert(
            placement.id.clone(),
            Gnb {
                id: placement.id.clone(),
                position: placement.position,
                cells: cell_ids,
            },
        );
    }

    let mut ues = BTreeMap::new();
    for k in 1..=config.ue_count {
        let position = match config.ue_positions.get(k as usize - 1) {
            Some(p) => *p,
            None => random_position(&mut rng, config.area),
        };
        let waypoint = random_position(&mut rng, config.area);
        let speed_mps = random_speed(&mut rng, config.mobility_speed_mps);
        let demand_prbs = rng.random_range(config.demand_prbs.min..=config.demand_prbs.max);
        let id = ue_id(k);
        ues.insert(
            id.clone(),
            Ue {
                id,
                position,
                serving_cell: None,
                connection_state: ConnectionState::Detached,
                cqi: 0,
                rsrp_map: BTreeMap::new(),
                prb_allocated: 0,
                demand_prbs,
                a3_counters: BTreeMap::new(),
                ai_subscriptions: Vec::new(),
                powered: false,
                waypoint,
                speed_mps,
            },
        );
    }

    let edge_servers = config
        .edge_servers
        .iter()
        .map(|e| {
            (
                e.id.clone(),
                EdgeServer {
                    id: e.id.clone(),
                    capacity: e.capacity,
                    used: 0,
                },
            )
        })
        .collect();

    let ric = RicPolicy {
        xapps: vec![XAPP_A3_HANDOVER.to_string(), XAPP_LOAD_BALANCER.to_string()],
        load_threshold: config.load_imbalance_threshold,
        cio_step_db: config.cio_step_db,
        cio_cap_db: config.cio_cap_db,
        a3_hysteresis_db: config.a3_hysteresis_db,
        a3_ttt_ticks: config.a3_ttt_ticks,
    };

    let mut state = NetworkState {
        tick: 0,
        ues,
        cells,
        gnbs,
        ric,
        edge_servers,
        ai_subscriptions: BTreeMap::new(),
        pending_commands: Vec::new(),
        config,
        rng,
    };
    measure(&mut state);
    Ok(state)
}

/// Refresh every UE's RSRP map against every cell.
pub fn measure(state: &mut NetworkState) {
    let cells = &state.cells;
    for ue in state.ues.values_mut() {
        ue.rsrp_map = cells
            .values()
            .map(|c| (c.id.clone(), compute_rsrp(&ue.position, c)))
            .collect();
    }
}

fn refresh_cqi(state: &mut NetworkState) {
    for ue in state.ues.values_mut() {
        ue.cqi = match (&ue.serving_cell, ue.is_connected()) {
            (Some(cell), true) => ue
                .rsrp_map
                .get(cell)
                .map_or(0, |&rsrp| compute_cqi(sinr_db(rsrp))),
            _ => 0,
        };
    }
}

fn apply_commands(state: &mut NetworkState, events: &mut Vec<NetworkEvent>) {
    let tick = state.tick;
    for command in std::mem::take(&mut state.pending_commands) {
        match command {
            SimCommand::PowerUp { ue } => {
                if let Some(u) = state.ues.get_mut(&ue) {
                    u.powered = true;
                }
            }
            SimCommand::PowerDown { ue } => {
                if let Some(u) = state.ues.get_mut(&ue) {
                    u.powered = false;
                }
                events.extend(detach(state, &ue, "power_down"));
            }
            SimCommand::Move { ue, position } => {
                if let Some(u) = state.ues.get_mut(&ue) {
                    u.position = position;
                }
            }
            SimCommand::SetTxPower { cell, tx_power_dbm } => {
                if let Some(c) = state.cells.get_mut(&cell) {
                    c.tx_power_dbm = tx_power_dbm;
                }
            }
        }
    }
    let due: Vec<String> = state
        .config
        .power_up_schedule
        .iter()
        .filter(|p| p.tick == tick)
        .map(|p| p.ue.clone())
        .collect();
    for id in due {
        if let Some(u) = state.ues.get_mut(&id) {
            u.powered = true;
        }
    }
}

/// UEs that attached during this tick are not evaluated until the next one.
fn a3_stage(state: &mut NetworkState, just_attached: &BTreeSet<String>) -> Vec<(String, String)> {
    if !state.ric.xapps.iter().any(|x| x == XAPP_A3_HANDOVER) {
        return Vec::new();
    }
    let policy = state.ric.a3_policy();
    let cells = &state.cells;
    let mut triggers = Vec::new();
    for ue in state.ues.values_mut() {
        if ue.connection_state != ConnectionState::Connected || just_attached.contains(&ue.id) {
            continue;
        }
        let Some(serving) = ue.serving_cell.as_ref().and_then(|id| cells.get(id)) else {
            continue;
        };
        let mut best: Option<(f64, String)> = None;
        for neighbor in cells.values() {
            if neighbor.id == serving.id {
                continue;
            }
            if let A3Decision::Trigger(target) = evaluate_a3(ue, serving, neighbor, policy) {
                let score = ue.rsrp_map[&neighbor.id] + serving.cio_towards(&neighbor.id);
                if best.as_ref().is_none_or(|(b, _)| score > *b) {
                    best = Some((score, target));
                }
            }
        }
        if let Some((_, target)) = best {
            triggers.push((ue.id.clone(), target));
        }
    }
    triggers
}

fn schedule_stage(state: &mut NetworkState, events: &mut Vec<NetworkEvent>) {
    let tick = state.tick;
    for cell in state.cells.values_mut() {
        let demands: BTreeMap<String, u32> = cell
            .connected_ues
            .iter()
            .filter_map(|id| state.ues.get(id).map(|u| (id.clone(), u.demand_prbs)))
            .collect();
        let grants = allocate_prbs(cell, &demands);
        cell.prb_allocated_total = grants.values().sum();
        for (id, grant) in grants {
            if let Some(ue) = state.ues.get_mut(&id) {
                ue.prb_allocated = grant;
            }
        }
        events.push(
            NetworkEvent::new(tick, EventType::CellLoadReport, &cell.id)
                .with("load", format!("{:.4}", get_load(cell)))
                .with("prb_allocated_total", cell.prb_allocated_total)
                .with("connected", cell.connected_ues.len()),
        );
    }
}

/// Advance the state by one tick and return the events it produced.
///
/// Stage order is fixed: external commands, mobility, measurements,
/// radio-link check and power-up, A3 evaluation, handover execution, PRB
/// scheduling, RIC xApps.
pub fn step_in_place(state: &mut NetworkState) -> Vec<NetworkEvent> {
    state.tick += 1;
    let mut events = Vec::new();

    apply_commands(state, &mut events);
    move_ues(state);
    measure(state);

    let floor = state.config.attach_floor_dbm;
    let lost: Vec<String> = state
        .ues
        .values()
        .filter(|u| u.is_connected())
        .filter(|u| {
            u.serving_cell
                .as_ref()
                .and_then(|c| u.rsrp_map.get(c))
                .is_none_or(|&rsrp| rsrp < floor)
        })
        .map(|u| u.id.clone())
        .collect();
    for id in lost {
        events.extend(detach(state, &id, "radio_link_failure"));
    }

    let waiting: Vec<String> = state
        .ues
        .values()
        .filter(|u| u.powered && u.connection_state == ConnectionState::Detached)
        .map(|u| u.id.clone())
        .collect();
    let mut just_attached = BTreeSet::new();
    for id in waiting {
        let attached = power_up(state, &id);
        if !attached.is_empty() {
            just_attached.insert(id);
        }
        events.extend(attached);
    }

    for (ue, target) in a3_stage(state, &just_attached) {
        events.extend(execute_handover(state, &ue, &target));
    }

    schedule_stage(state, &mut events);
    refresh_cqi(state);

    if state.ric.xapps.iter().any(|x| x == XAPP_LOAD_BALANCER) {
        let (updates, cio_events) = load_balance(state);
        apply_cio_updates(state, &updates);
        events.extend(cio_events);
    }
    events
}

pub fn step(mut state: NetworkState) -> (NetworkState, Vec<NetworkEvent>) {
    let events = step_in_place(&mut state);
    (state, events)
}

/// Owns the evolving state and the bus its events are published on.
#[derive(Debug)]
pub struct Simulator {
    state: NetworkState,
    bus: EventBus,
}

impl Simulator {
    pub fn new(config: SimConfig) -> Result<Self, ConfigError> {
        Ok(Self::from_state(init_network(config)?))
    }

    pub fn from_state(state: NetworkState) -> Self {
        Self {
            state,
            bus: EventBus::new(),
        }
    }

    pub fn state(&self) -> &NetworkState {
        &self.state
    }

    pub fn state_mut(&mut self) -> &mut NetworkState {
        &mut self.state
    }

    pub fn bus_mut(&mut self) -> &mut EventBus {
        &mut self.bus
    }

    /// Queue a command for the start of the next tick.
    pub fn enqueue(&mut self, command: SimCommand) -> Result<(), SimError> {
        let (kind, id) = match &command {
            SimCommand::PowerUp { ue } | SimCommand::PowerDown { ue } | SimCommand::Move { ue, .. } => {
                ("ue", ue)
            }
            SimCommand::SetTxPower { cell, .. } => ("cell", cell),
        };
        let known = match kind {
            "ue" => self.state.ues.contains_key(id),
            _ => self.state.cells.contains_key(id),
        };
        if !known {
            return Err(SimError::UnknownEntity { kind, id: id.clone() });
        }
        self.state.pending_commands.push(command);
        Ok(())
    }

    /// Step once and stage the events on the bus without delivering them.
    pub fn advance(&mut self) -> Vec<NetworkEvent> {
        let events = step_in_place(&mut self.state);
        self.bus.publish_batch(events.iter().cloned());
        events
    }

    pub fn publish(&mut self, events: &[NetworkEvent]) {
        self.bus.publish_batch(events.iter().cloned());
    }

    pub fn flush_events(&mut self) {
        self.bus.flush();
    }

    pub fn tick(&mut self) -> Vec<NetworkEvent> {
        let events = self.advance();
        self.flush_events();
        events
    }
}
