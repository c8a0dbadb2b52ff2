//! Rendering of live entity views from a snapshot.

use kpa_core::catalog::Catalog;
use kpa_core::ontology::Registry;
use kpa_core::sim::scheduler::get_load;
use serde_json::{json, Map, Value};

use crate::api::ApiError;
use crate::auth::{Principal, MASK};
use crate::store::Snapshot;

pub const RIC_ID: &str = "ric";
pub const LIVE_ENTITIES: [&str; 6] = ["ue", "cell", "gnb", "ric", "edge_server", "ai_service"];

/// Every field of an entity as JSON, keyed by attribute name.
fn raw_entity(snap: &Snapshot, catalog: &Catalog, entity: &str, id: &str) -> Option<Map<String, Value>> {
    let state = &snap.state;
    let value = match entity {
        "ue" => serde_json::to_value(state.ues.get(id)?),
        "cell" => {
            let cell = state.cells.get(id)?;
            let mut v = serde_json::to_value(cell).expect("cell serializes");
            v["load"] = json!(get_load(cell));
            Ok(v)
        }
        "gnb" => serde_json::to_value(state.gnbs.get(id)?),
        "ric" if id == RIC_ID => serde_json::to_value(&state.ric),
        "edge_server" => serde_json::to_value(state.edge_servers.get(id)?),
        "ai_service" => serde_json::to_value(catalog.get(id)?),
        _ => return None,
    };
    match value.expect("entity serializes") {
        Value::Object(m) => Some(m),
        _ => None,
    }
}

pub fn entity_ids(snap: &Snapshot, catalog: &Catalog, entity: &str) -> Option<Vec<String>> {
    let state = &snap.state;
    Some(match entity {
        "ue" => state.ues.keys().cloned().collect(),
        "cell" => state.cells.keys().cloned().collect(),
        "gnb" => state.gnbs.keys().cloned().collect(),
        "ric" => vec![RIC_ID.to_string()],
        "edge_server" => state.edge_servers.keys().cloned().collect(),
        "ai_service" => catalog
            .list_services(&Default::default())
            .into_iter()
            .map(|s| s.id.clone())
            .collect(),
        _ => return None,
    })
}

/// Whether an ontology live_path template can be served.
pub fn live_path_routable(registry: &Registry, template: &str) -> bool {
    let parts: Vec<&str> = template.split('/').collect();
    let ["", "live", entity, "{id}", "attributes", attr] = parts.as_slice() else {
        return false;
    };
    LIVE_ENTITIES.contains(entity)
        && registry
            .get_schema(entity)
            .is_ok_and(|s| s.attribute(attr).is_some())
}

fn masked(principal: &Principal, entity: &str, attr: &str, value: Value) -> Value {
    if principal.masks(entity, attr) {
        Value::String(MASK.to_string())
    } else {
        value
    }
}

pub fn summary(snap: &Snapshot) -> Value {
    let state = &snap.state;
    let cells: Map<String, Value> = state
        .cells
        .values()
        .map(|c| {
            (
                c.id.clone(),
                json!({ "load": get_load(c), "connected_count": c.connected_ues.len() }),
            )
        })
        .collect();
    json!({
        "tick": snap.tick,
        "ue_total": state.ues.len(),
        "ue_connected": state.connected_count(),
        "cells": cells,
        "active_insights": snap.insights.len(),
    })
}

pub fn list(snap: &Snapshot, catalog: &Catalog, entity: &str) -> Result<Value, ApiError> {
    let ids = entity_ids(snap, catalog, entity)
        .ok_or_else(|| ApiError::not_found(format!("unknown entity type `{entity}`")))?;
    let links: Vec<String> = ids.iter().map(|id| format!("/live/{entity}/{id}")).collect();
    Ok(json!({
        "tick": snap.tick,
        "entity_type": entity,
        "ids": ids,
        "links": links,
        "doc_link": format!("/docs/{entity}"),
    }))
}

pub fn entity(
    snap: &Snapshot,
    catalog: &Catalog,
    registry: &Registry,
    principal: &Principal,
    entity: &str,
    id: &str,
) -> Result<Value, ApiError> {
    let schema = registry
        .get_schema(entity)
        .map_err(|_| ApiError::not_found(format!("unknown entity type `{entity}`")))?;
    let raw = raw_entity(snap, catalog, entity, id)
        .ok_or_else(|| ApiError::not_found(format!("no {entity} `{id}` at tick {}", snap.tick)))?;
    let attributes: Map<String, Value> = schema
        .attributes
        .iter()
        .filter_map(|a| {
            let v = raw.get(&a.name)?.clone();
            Some((a.name.clone(), masked(principal, entity, &a.name, v)))
        })
        .collect();
    Ok(json!({
        "tick": snap.tick,
        "entity_type": entity,
        "id": id,
        "attributes": attributes,
        "doc_link": format!("/docs/{entity}"),
    }))
}

pub fn attribute(
    snap: &Snapshot,
    catalog: &Catalog,
    registry: &Registry,
    principal: &Principal,
    entity: &str,
    id: &str,
    attr: &str,
) -> Result<Value, ApiError> {
    let schema = registry
        .get_schema(entity)
        .map_err(|_| ApiError::not_found(format!("unknown entity type `{entity}`")))?;
    let descriptor = schema
        .attribute(attr)
        .ok_or_else(|| ApiError::not_found(format!("{entity} has no attribute `{attr}`")))?;
    let raw = raw_entity(snap, catalog, entity, id)
        .ok_or_else(|| ApiError::not_found(format!("no {entity} `{id}` at tick {}", snap.tick)))?;
    let value = raw
        .get(attr)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("{entity}.{attr} is not live")))?;
    Ok(json!({
        "tick": snap.tick,
        "entity_type": entity,
        "id": id,
        "attribute": attr,
        "value": masked(principal, entity, attr, value),
        "unit": descriptor.unit,
        "doc_link": format!("/docs/{entity}/attributes/{attr}"),
    }))
}
