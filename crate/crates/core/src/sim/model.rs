//! Entity records making up a simulator snapshot.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::SimConfig;

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConnectionState {
    Detached,
    Attaching,
    Connected,
    Handover,
}

impl ConnectionState {
    /// States in which the UE holds a serving cell.
    pub fn has_serving_cell(self) -> bool {
        matches!(self, ConnectionState::Connected | ConnectionState::Handover)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ue {
    pub id: String,
    pub position: Position,
    pub serving_cell: Option<String>,
    pub connection_state: ConnectionState,
    pub cqi: u8,
    pub rsrp_map: BTreeMap<String, f64>,
    pub prb_allocated: u32,
    pub demand_prbs: u32,
    pub a3_counters: BTreeMap<String, u32>,
    pub ai_subscriptions: Vec<String>,
    /// Set once the UE has been powered up; a powered, detached UE retries
    /// attachment every tick.
    pub powered: bool,
    pub waypoint: Position,
    pub speed_mps: f64,
}

impl Ue {
    pub fn is_connected(&self) -> bool {
        self.connection_state.has_serving_cell()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: String,
    pub gnb_id: String,
    pub position: Position,
    pub tx_power_dbm: f64,
    pub frequency_mhz: f64,
    pub prb_capacity: u32,
    pub prb_allocated_total: u32,
    /// Offset applied when this cell serves and the keyed cell is the
    /// handover candidate, in dB.
    pub cio: BTreeMap<String, f64>,
    pub connected_ues: BTreeSet<String>,
}

impl Cell {
    pub fn cio_towards(&self, neighbor: &str) -> f64 {
        self.cio.get(neighbor).copied().unwrap_or(0.0)
    }

    pub fn free_prbs(&self) -> u32 {
        self.prb_capacity.saturating_sub(self.prb_allocated_total)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gnb {
    pub id: String,
    pub position: Position,
    pub cells: Vec<String>,
}

/// Hysteresis and time-to-trigger used by the A3 entry condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct A3Policy {
    pub hysteresis_db: f64,
    pub ttt_ticks: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RicPolicy {
    pub xapps: Vec<String>,
    pub load_threshold: f64,
    pub cio_step_db: f64,
    pub cio_cap_db: f64,
    pub a3_hysteresis_db: f64,
    pub a3_ttt_ticks: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeServer {
    pub id: String,
    pub capacity: u32,
    pub used: u32,
}

impl EdgeServer {
    pub fn headroom(&self) -> u32 {
        self.capacity.saturating_sub(self.used)
    }

    pub fn utilisation(&self) -> f64 {
        if self.capacity == 0 {
            1.0
        } else {
            f64::from(self.used) / f64::from(self.capacity)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SubscriptionStatus {
    Active,
    TornDown,
}

/// An AI service bound to a set of UEs and hosted on one edge server.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServiceSubscription {
    pub id: String,
    pub service_id: String,
    pub ue_ids: Vec<String>,
    pub edge_server_id: String,
    pub endpoint_url: String,
    pub status: SubscriptionStatus,
    pub created_tick: u64,
    pub resource_units: u32,
    /// Integration snippet rendered for each UE.
    pub integration_snippets: BTreeMap<String, String>,
}

impl ServiceSubscription {
    pub fn reserved_units(&self) -> u32 {
        self.resource_units * self.ue_ids.len() as u32
    }
}

/// External command applied at the start of the next tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum SimCommand {
    PowerUp { ue: String },
    PowerDown { ue: String },
    Move { ue: String, position: Position },
    SetTxPower { cell: String, tx_power_dbm: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventType {
    UeAttached,
    HandoverTriggered,
    HandoverComplete,
    CellLoadReport,
    CioAdjusted,
    UeDetached,
    AiSubCreated,
    AiSubTornDown,
}

impl EventType {
    pub const ALL: [EventType; 8] = [
        EventType::UeAttached,
        EventType::HandoverTriggered,
        EventType::HandoverComplete,
        EventType::CellLoadReport,
        EventType::CioAdjusted,
        EventType::UeDetached,
        EventType::AiSubCreated,
        EventType::AiSubTornDown,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventType::UeAttached => "UE_ATTACHED",
            EventType::HandoverTriggered => "HANDOVER_TRIGGERED",
            EventType::HandoverComplete => "HANDOVER_COMPLETE",
            EventType::CellLoadReport => "CELL_LOAD_REPORT",
            EventType::CioAdjusted => "CIO_ADJUSTED",
            EventType::UeDetached => "UE_DETACHED",
            EventType::AiSubCreated => "AI_SUB_CREATED",
            EventType::AiSubTornDown => "AI_SUB_TORN_DOWN",
        }
    }

    pub fn parse(s: &str) -> Option<EventType> {
        Self::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl fmt::Display for EventType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkEvent {
    pub tick: u64,
    #[serde(rename = "type")]
    pub event_type: EventType,
    pub subject: String,
    pub payload: BTreeMap<String, String>,
}

impl NetworkEvent {
    pub fn new(tick: u64, event_type: EventType, subject: impl Into<String>) -> Self {
        Self {
            tick,
            event_type,
            subject: subject.into(),
            payload: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.payload.insert(key.to_string(), value.to_string());
        self
    }
}

/// Complete simulator state at one tick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkState {
    pub tick: u64,
    pub ues: BTreeMap<String, Ue>,
    pub cells: BTreeMap<String, Cell>,
    pub gnbs: BTreeMap<String, Gnb>,
    pub ric: RicPolicy,
    pub edge_servers: BTreeMap<String, EdgeServer>,
    pub ai_subscriptions: BTreeMap<String, ServiceSubscription>,
    pub pending_commands: Vec<SimCommand>,
    pub config: SimConfig,
    pub rng: ChaCha8Rng,
}

impl NetworkState {
    pub fn connected_count(&self) -> usize {
        self.ues.values().filter(|u| u.is_connected()).count()
    }
}

pub fn ue_id(k: u32) -> String {
    format!("IMSI_{k}")
}

pub fn cell_id(gnb_id: &str, n: u32) -> String {
    format!("cell_{gnb_id}_{n}")
}
