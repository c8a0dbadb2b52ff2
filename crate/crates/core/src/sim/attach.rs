//! UE power-up, attachment and detachment.

use super::model::{ConnectionState, EventType, NetworkEvent, NetworkState};
use super::radio::{compute_cqi, sinr_db};

/// Strongest measured cell at or above the attach floor; equal RSRP goes to
/// the lexicographically smaller cell id.
pub fn best_cell(state: &NetworkState, ue_id: &str) -> Option<(String, f64)> {
    let floor = state.config.attach_floor_dbm;
    let mut best: Option<(&String, f64)> = None;
    for (cell_id, &rsrp) in &state.ues.get(ue_id)?.rsrp_map {
        if rsrp < floor {
            continue;
        }
        if best.is_none_or(|(_, b)| rsrp > b) {
            best = Some((cell_id, rsrp));
        }
    }
    best.map(|(id, rsrp)| (id.clone(), rsrp))
}

/// Select the strongest cell for a detached UE and attach to it within the
/// current tick. A UE with no cell above the attach floor stays DETACHED.
pub fn power_up(state: &mut NetworkState, ue_id: &str) -> Vec<NetworkEvent> {
    match state.ues.get(ue_id) {
        Some(ue) if ue.connection_state == ConnectionState::Detached => {}
        _ => return Vec::new(),
    }
    let Some((cell_id, _rsrp)) = best_cell(state, ue_id) else {
        return Vec::new();
    };
    if let Some(ue) = state.ues.get_mut(ue_id) {
        ue.connection_state = ConnectionState::Attaching;
    }
    connect(state, ue_id, &cell_id)
}

/// Complete attachment of `ue_id` to `cell_id` with an initial PRB grant of
/// min(demand_prbs, free PRBs on the cell).
pub fn connect(state: &mut NetworkState, ue_id: &str, cell_id: &str) -> Vec<NetworkEvent> {
    let tick = state.tick;
    let (Some(ue), Some(cell)) = (state.ues.get_mut(ue_id), state.cells.get_mut(cell_id)) else {
        return Vec::new();
    };
    let grant = ue.demand_prbs.min(cell.free_prbs());
    cell.connected_ues.insert(ue_id.to_string());
    cell.prb_allocated_total += grant;

    let rsrp = ue.rsrp_map.get(cell_id).copied().unwrap_or(f64::NEG_INFINITY);
    ue.serving_cell = Some(cell_id.to_string());
    ue.connection_state = ConnectionState::Connected;
    ue.prb_allocated = grant;
    ue.a3_counters.clear();
    ue.cqi = compute_cqi(sinr_db(rsrp));

    vec![NetworkEvent::new(tick, EventType::UeAttached, ue_id)
        .with("cell", cell_id)
        .with("rsrp_dbm", format!("{rsrp:.2}"))
        .with("prb_allocated", grant)]
}

/// Release the UE from its serving cell.
pub fn detach(state: &mut NetworkState, ue_id: &str, reason: &str) -> Vec<NetworkEvent> {
    let tick = state.tick;
    let Some(ue) = state.ues.get_mut(ue_id) else {
        return Vec::new();
    };
    let Some(cell_id) = ue.serving_cell.take() else {
        ue.connection_state = ConnectionState::Detached;
        return Vec::new();
    };
    let released = std::mem::take(&mut ue.prb_allocated);
    ue.connection_state = ConnectionState::Detached;
    ue.a3_counters.clear();
    ue.cqi = 0;
    if let Some(cell) = state.cells.get_mut(&cell_id) {
        cell.connected_ues.remove(ue_id);
        cell.prb_allocated_total = cell.prb_allocated_total.saturating_sub(released);
    }
    vec![NetworkEvent::new(tick, EventType::UeDetached, ue_id)
        .with("cell", cell_id)
        .with("reason", reason)]
}
