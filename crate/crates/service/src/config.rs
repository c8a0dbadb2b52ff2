use std::path::PathBuf;
use std::time::Duration;

use crate::auth::AuthTable;
use crate::insights::InsightRule;

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// When set, the clock only advances through `POST /sim/tick`.
    pub manual_tick: bool,
    pub snapshot_capacity: usize,
    pub heartbeat: Duration,
    pub persist_dir: Option<PathBuf>,
    pub auth: AuthTable,
    pub insight_rules: Vec<InsightRule>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            manual_tick: false,
            snapshot_capacity: 10_000,
            heartbeat: Duration::from_secs(5),
            persist_dir: None,
            auth: AuthTable::default(),
            insight_rules: InsightRule::defaults(),
        }
    }
}
