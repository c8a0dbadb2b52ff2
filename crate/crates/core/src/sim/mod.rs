//! Discrete-tick RAN simulator: UE mobility, radio measurements, attach,
//! A3 handover, PRB scheduling and RIC load balancing.

pub mod attach;
pub mod bus;
pub mod config;
pub mod engine;
pub mod handover;
pub mod invariants;
pub mod mobility;
pub mod model;
pub mod radio;
pub mod ric;
pub mod scheduler;

pub use bus::{EventBus, EventConsumer, SubscriptionHandle};
pub use config::{
    grid_gnbs, Area, ConfigError, DemandRange, EdgeServerConfig, GnbPlacement, ScheduledPowerUp, SimConfig,
    SpeedRange,
};
pub use engine::{init_network, step, SimError, Simulator};
pub use model::*;
