//! Checkers for the state invariants, written against the recorded data
//! only so they can judge the pipeline from outside.

use std::collections::BTreeMap;

use super::model::{EventType, NetworkEvent, NetworkState, SubscriptionStatus};

/// Every violated invariant of a single snapshot, as readable messages.
pub fn check_state(state: &NetworkState) -> Vec<String> {
    let mut out = Vec::new();

    let mut membership: BTreeMap<&str, usize> = BTreeMap::new();
    for cell in state.cells.values() {
        for ue in &cell.connected_ues {
            *membership.entry(ue.as_str()).or_default() += 1;
            match state.ues.get(ue) {
                None => out.push(format!("{} lists unknown UE {ue}", cell.id)),
                Some(u) if u.serving_cell.as_deref() != Some(cell.id.as_str()) => out.push(format!(
                    "{} lists {ue} whose serving cell is {:?}",
                    cell.id, u.serving_cell
                )),
                _ => {}
            }
        }
        if !state.gnbs.contains_key(&cell.gnb_id) {
            out.push(format!("{} references unknown gNB {}", cell.id, cell.gnb_id));
        }
        let granted: u32 = cell
            .connected_ues
            .iter()
            .filter_map(|u| state.ues.get(u))
            .map(|u| u.prb_allocated)
            .sum();
        if granted != cell.prb_allocated_total {
            out.push(format!(
                "{}: per-UE grants sum to {granted}, total says {}",
                cell.id, cell.prb_allocated_total
            ));
        }
        if cell.prb_allocated_total > cell.prb_capacity {
            out.push(format!(
                "{}: {} PRBs exceed capacity {}",
                cell.id, cell.prb_allocated_total, cell.prb_capacity
            ));
        }
    }

    for ue in state.ues.values() {
        let count = membership.get(ue.id.as_str()).copied().unwrap_or(0);
        let connected = ue.connection_state.has_serving_cell();
        if connected != ue.serving_cell.is_some() {
            out.push(format!(
                "{}: state {:?} with serving {:?}",
                ue.id, ue.connection_state, ue.serving_cell
            ));
        }
        if (connected && count != 1) || (!connected && count != 0) {
            out.push(format!("{}: attached to {count} cells", ue.id));
        }
        if let Some(cell) = &ue.serving_cell {
            if !state.cells.contains_key(cell) {
                out.push(format!("{}: serving cell {cell} does not exist", ue.id));
            }
        }
        if ue.cqi > 15 {
            out.push(format!("{}: cqi {} out of range", ue.id, ue.cqi));
        }
        if !connected && ue.prb_allocated != 0 {
            out.push(format!("{}: detached but holds {} PRBs", ue.id, ue.prb_allocated));
        }
        for sub in &ue.ai_subscriptions {
            match state.ai_subscriptions.get(sub) {
                Some(s) if s.status == SubscriptionStatus::Active && s.ue_ids.contains(&ue.id) => {}
                _ => out.push(format!("{}: dangling AI subscription {sub}", ue.id)),
            }
        }
    }

    let mut reserved: BTreeMap<&str, u32> = BTreeMap::new();
    for sub in state.ai_subscriptions.values() {
        if sub.status != SubscriptionStatus::Active {
            continue;
        }
        *reserved.entry(sub.edge_server_id.as_str()).or_default() += sub.reserved_units();
        if !state.edge_servers.contains_key(&sub.edge_server_id) {
            out.push(format!("{}: unknown edge server {}", sub.id, sub.edge_server_id));
        }
        for ue in &sub.ue_ids {
            let listed = state
                .ues
                .get(ue)
                .is_some_and(|u| u.ai_subscriptions.contains(&sub.id));
            if !listed {
                out.push(format!("{}: UE {ue} missing or not linked", sub.id));
            }
        }
    }
    for edge in state.edge_servers.values() {
        let r = reserved.get(edge.id.as_str()).copied().unwrap_or(0);
        if r != edge.used || edge.used > edge.capacity {
            out.push(format!(
                "{}: used {} reserved {r} capacity {}",
                edge.id, edge.used, edge.capacity
            ));
        }
    }
    out
}

/// Check every HANDOVER_TRIGGERED event against the recorded history: the
/// A3 condition must have held on each of the `ttt` ticks ending at the
/// trigger tick. `history[t]` is the snapshot published at tick `t`; the
/// offset in force during tick `t` is the one published at `t - 1`.
pub fn check_a3_soundness(history: &[NetworkState], events: &[NetworkEvent]) -> Vec<String> {
    let mut out = Vec::new();
    for ev in events
        .iter()
        .filter(|e| e.event_type == EventType::HandoverTriggered)
    {
        let (Some(source), Some(target)) = (ev.payload.get("source"), ev.payload.get("target")) else {
            out.push(format!("tick {}: trigger without source/target", ev.tick));
            continue;
        };
        let t = ev.tick as usize;
        let Some(snapshot) = history.get(t) else {
            out.push(format!("tick {t}: no snapshot"));
            continue;
        };
        let ttt = snapshot.ric.a3_ttt_ticks as usize;
        let hys = snapshot.ric.a3_hysteresis_db;
        if t < ttt {
            out.push(format!("tick {t}: trigger before {ttt} ticks elapsed"));
            continue;
        }
        for k in (t + 1 - ttt)..=t {
            let (Some(now), Some(prev)) = (history.get(k), history.get(k - 1)) else {
                out.push(format!("tick {k}: missing history"));
                break;
            };
            let Some(ue) = now.ues.get(&ev.subject) else {
                out.push(format!("tick {k}: {} missing", ev.subject));
                break;
            };
            let served_by_source = prev
                .ues
                .get(&ev.subject)
                .is_some_and(|u| u.serving_cell.as_deref() == Some(source.as_str()));
            let cio = prev
                .cells
                .get(source)
                .and_then(|c| c.cio.get(target))
                .copied()
                .unwrap_or(0.0);
            let (Some(rs), Some(rn)) = (ue.rsrp_map.get(source), ue.rsrp_map.get(target)) else {
                out.push(format!("tick {k}: missing RSRP for {}", ev.subject));
                break;
            };
            if !(served_by_source && rn + cio > rs + hys) {
                out.push(format!(
                    "{} trigger at {t} towards {target}: condition false at tick {k}",
                    ev.subject
                ));
                break;
            }
        }
    }
    out
}
