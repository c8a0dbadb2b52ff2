use std::collections::BTreeMap;

use super::{endpoint_url, render_snippet, Catalog, CatalogError};
use crate::sim::{EventType, NetworkEvent, NetworkState, ServiceSubscription, SubscriptionStatus};

/// Reserve capacity for `service_id` on behalf of `ue_ids` and bind the
/// resulting subscription to every listed UE. Nothing changes on error.
pub fn create_subscription(
    state: &mut NetworkState,
    catalog: &Catalog,
    ue_ids: &[String],
    service_id: &str,
) -> Result<(ServiceSubscription, NetworkEvent), CatalogError> {
    let service = catalog
        .get(service_id)
        .ok_or_else(|| CatalogError::UnknownService(service_id.to_string()))?;
    if ue_ids.is_empty() {
        return Err(CatalogError::EmptyUeSet);
    }
    let mut ues: Vec<String> = Vec::with_capacity(ue_ids.len());
    for ue in ue_ids {
        if !state.ues.contains_key(ue) {
            return Err(CatalogError::UnknownUe(ue.clone()));
        }
        if !ues.contains(ue) {
            ues.push(ue.clone());
        }
    }

    let required = service.resource_units * ues.len() as u32;
    let edge_id = state
        .edge_servers
        .values()
        .filter(|e| e.headroom() >= required)
        .min_by(|a, b| {
            a.utilisation()
                .total_cmp(&b.utilisation())
                .then_with(|| a.id.cmp(&b.id))
        })
        .map(|e| e.id.clone())
        .ok_or_else(|| CatalogError::InsufficientCapacity {
            required,
            headroom: state
                .edge_servers
                .values()
                .map(|e| (e.id.clone(), e.headroom()))
                .collect(),
        })?;

    let id = format!("aisub-{}", state.ai_subscriptions.len() + 1);
    let url = endpoint_url(&edge_id, &id);
    let integration_snippets: BTreeMap<String, String> = ues
        .iter()
        .map(|ue| (ue.clone(), render_snippet(&service.snippet_template, &url, ue)))
        .collect();
    let sub = ServiceSubscription {
        id: id.clone(),
        service_id: service.id.clone(),
        ue_ids: ues.clone(),
        edge_server_id: edge_id.clone(),
        endpoint_url: url.clone(),
        status: SubscriptionStatus::Active,
        created_tick: state.tick,
        resource_units: service.resource_units,
        integration_snippets,
    };

    if let Some(edge) = state.edge_servers.get_mut(&edge_id) {
        edge.used += required;
    }
    for ue in &ues {
        if let Some(u) = state.ues.get_mut(ue) {
            u.ai_subscriptions.push(id.clone());
        }
    }
    state.ai_subscriptions.insert(id.clone(), sub.clone());

    let event = NetworkEvent::new(state.tick, EventType::AiSubCreated, &id)
        .with("service_id", &service.id)
        .with("edge_server", &edge_id)
        .with("ue_ids", ues.join(","))
        .with("endpoint_url", &url)
        .with("resource_units", required);
    Ok((sub, event))
}

/// Release the subscription's reservation and unbind it from its UEs.
pub fn teardown(state: &mut NetworkState, subscription_id: &str) -> Result<NetworkEvent, CatalogError> {
    let sub = state
        .ai_subscriptions
        .get_mut(subscription_id)
        .ok_or_else(|| CatalogError::UnknownSubscription(subscription_id.to_string()))?;
    if sub.status == SubscriptionStatus::TornDown {
        return Err(CatalogError::AlreadyTornDown(subscription_id.to_string()));
    }
    sub.status = SubscriptionStatus::TornDown;
    let released = sub.reserved_units();
    let edge_id = sub.edge_server_id.clone();
    let ue_ids = sub.ue_ids.clone();

    if let Some(edge) = state.edge_servers.get_mut(&edge_id) {
        edge.used = edge.used.saturating_sub(released);
    }
    for ue in &ue_ids {
        if let Some(u) = state.ues.get_mut(ue) {
            u.ai_subscriptions.retain(|s| s != subscription_id);
        }
    }
    Ok(
        NetworkEvent::new(state.tick, EventType::AiSubTornDown, subscription_id)
            .with("edge_server", &edge_id)
            .with("released_units", released),
    )
}

pub fn get_subscription<'a>(
    state: &'a NetworkState,
    subscription_id: &str,
) -> Result<&'a ServiceSubscription, CatalogError> {
    state
        .ai_subscriptions
        .get(subscription_id)
        .ok_or_else(|| CatalogError::UnknownSubscription(subscription_id.to_string()))
}

/// Active subscriptions that include `ue_id`, in id order.
pub fn list_for_ue<'a>(state: &'a NetworkState, ue_id: &str) -> Vec<&'a ServiceSubscription> {
    state
        .ai_subscriptions
        .values()
        .filter(|s| s.status == SubscriptionStatus::Active && s.ue_ids.iter().any(|u| u == ue_id))
        .collect()
}
