//! RIC xApps: CIO-based load balancing and the A3 policy it steers.

use super::model::{A3Policy, EventType, NetworkEvent, NetworkState, RicPolicy};
use super::scheduler::get_load;

pub const XAPP_LOAD_BALANCER: &str = "load_balancer";
pub const XAPP_A3_HANDOVER: &str = "a3_handover";

/// Tolerance on the load-imbalance comparison; loads are PRB ratios.
const LOAD_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CioUpdate {
    pub source: String,
    pub target: String,
    pub cio_db: f64,
    pub delta_db: f64,
}

impl RicPolicy {
    pub fn a3_policy(&self) -> A3Policy {
        A3Policy {
            hysteresis_db: self.a3_hysteresis_db,
            ttt_ticks: self.a3_ttt_ticks,
        }
    }
}

/// For every ordered cell pair (s, t): when load(s) exceeds load(t) by more
/// than the threshold, raise cio(s -> t) by one step; when load(t) exceeds
/// load(s) by more than the threshold, lower it. Offsets saturate at the cap.
pub fn load_balance(state: &NetworkState) -> (Vec<CioUpdate>, Vec<NetworkEvent>) {
    let ric = &state.ric;
    let mut updates = Vec::new();
    let mut events = Vec::new();
    for (source_id, source) in &state.cells {
        let load_s = get_load(source);
        for (target_id, target) in &state.cells {
            if source_id == target_id {
                continue;
            }
            let imbalance = load_s - get_load(target);
            let current = source.cio_towards(target_id);
            let next = if imbalance > ric.load_threshold + LOAD_EPSILON {
                (current + ric.cio_step_db).min(ric.cio_cap_db)
            } else if -imbalance > ric.load_threshold + LOAD_EPSILON {
                (current - ric.cio_step_db).max(-ric.cio_cap_db)
            } else {
                current
            };
            if next != current {
                events.push(
                    NetworkEvent::new(state.tick, EventType::CioAdjusted, source_id)
                        .with("target", target_id)
                        .with("cio_db", next)
                        .with("delta_db", next - current),
                );
                updates.push(CioUpdate {
                    source: source_id.clone(),
                    target: target_id.clone(),
                    cio_db: next,
                    delta_db: next - current,
                });
            }
        }
    }
    (updates, events)
}

pub fn apply_cio_updates(state: &mut NetworkState, updates: &[CioUpdate]) {
    for u in updates {
        if let Some(cell) = state.cells.get_mut(&u.source) {
            cell.cio.insert(u.target.clone(), u.cio_db);
        }
    }
}
