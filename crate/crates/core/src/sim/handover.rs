//! A3-triggered handover.

use super::model::{A3Policy, Cell, ConnectionState, EventType, NetworkEvent, NetworkState, Ue};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum A3Decision {
    None,
    Trigger(String),
}

/// Entry condition of the A3 event for one serving/neighbor pair:
/// rsrp(neighbor) + cio(serving -> neighbor) > rsrp(serving) + hysteresis.
pub fn a3_condition(ue: &Ue, serving: &Cell, neighbor: &Cell, hysteresis_db: f64) -> bool {
    let (Some(&rsrp_s), Some(&rsrp_n)) = (ue.rsrp_map.get(&serving.id), ue.rsrp_map.get(&neighbor.id)) else {
        return false;
    };
    rsrp_n + serving.cio_towards(&neighbor.id) > rsrp_s + hysteresis_db
}

/// Advance the UE's time-to-trigger counter for `neighbor`. The counter
/// saturates at `ttt_ticks` and resets to zero whenever the condition fails;
/// the decision is a trigger whenever the counter stands at `ttt_ticks`.
pub fn evaluate_a3(ue: &mut Ue, serving: &Cell, neighbor: &Cell, policy: A3Policy) -> A3Decision {
    let holds = a3_condition(ue, serving, neighbor, policy.hysteresis_db);
    let counter = ue.a3_counters.entry(neighbor.id.clone()).or_insert(0);
    if !holds {
        *counter = 0;
        return A3Decision::None;
    }
    *counter = (*counter + 1).min(policy.ttt_ticks);
    if *counter == policy.ttt_ticks {
        A3Decision::Trigger(neighbor.id.clone())
    } else {
        A3Decision::None
    }
}

/// Move a connected UE from its serving cell to `target_id`.
///
/// The target admits the UE at min(demand, free PRBs) as long as at least
/// one PRB is free; otherwise the handover is rejected, the UE stays on its
/// serving cell and the time-to-trigger counter for the target restarts.
pub fn execute_handover(state: &mut NetworkState, ue_id: &str, target_id: &str) -> Vec<NetworkEvent> {
    let tick = state.tick;
    let Some(ue) = state.ues.get(ue_id) else {
        return Vec::new();
    };
    let Some(source_id) = ue.serving_cell.clone() else {
        return Vec::new();
    };
    if source_id == target_id || ue.connection_state != ConnectionState::Connected {
        return Vec::new();
    }
    let Some(target) = state.cells.get(target_id) else {
        return Vec::new();
    };
    let free = target.free_prbs();
    let triggered = NetworkEvent::new(tick, EventType::HandoverTriggered, ue_id)
        .with("source", &source_id)
        .with("target", target_id);

    if free == 0 {
        if let Some(ue) = state.ues.get_mut(ue_id) {
            ue.a3_counters.insert(target_id.to_string(), 0);
        }
        return vec![triggered.with("admitted", false).with("reason", "target_full")];
    }

    let ue = state.ues.get_mut(ue_id).expect("checked above");
    ue.connection_state = ConnectionState::Handover;
    let released = ue.prb_allocated;
    let grant = ue.demand_prbs.min(free);

    if let Some(source) = state.cells.get_mut(&source_id) {
        source.connected_ues.remove(ue_id);
        source.prb_allocated_total = source.prb_allocated_total.saturating_sub(released);
    }
    if let Some(target) = state.cells.get_mut(target_id) {
        target.connected_ues.insert(ue_id.to_string());
        target.prb_allocated_total += grant;
    }

    let ue = state.ues.get_mut(ue_id).expect("checked above");
    ue.serving_cell = Some(target_id.to_string());
    ue.prb_allocated = grant;
    ue.a3_counters.clear();
    ue.connection_state = ConnectionState::Connected;

    vec![
        triggered.with("admitted", true),
        NetworkEvent::new(tick, EventType::HandoverComplete, ue_id)
            .with("source", source_id)
            .with("target", target_id)
            .with("prb_allocated", grant),
    ]
}
