//! The shipped ontology: schemas for the simulated RAN entities and the edge
//! AI catalog, with method snippets cut from the implementation sources.

use super::registry::{
    AttributeDescriptor, EdgeKind, EntitySchema, MethodDescriptor, NodeRef, Registry, RelationshipEdge,
};
use super::snippet::extract_fn;

pub(crate) const ATTACH_RS: &str = include_str!("../sim/attach.rs");
pub(crate) const HANDOVER_RS: &str = include_str!("../sim/handover.rs");
pub(crate) const RADIO_RS: &str = include_str!("../sim/radio.rs");
pub(crate) const MOBILITY_RS: &str = include_str!("../sim/mobility.rs");
pub(crate) const SCHEDULER_RS: &str = include_str!("../sim/scheduler.rs");
pub(crate) const ENGINE_RS: &str = include_str!("../sim/engine.rs");
pub(crate) const RIC_RS: &str = include_str!("../sim/ric.rs");
pub(crate) const MODEL_RS: &str = include_str!("../sim/model.rs");
pub(crate) const CATALOG_RS: &str = include_str!("../catalog/mod.rs");
pub(crate) const PROVISION_RS: &str = include_str!("../catalog/provision.rs");

/// Source file each seeded method is cut from, as (entity, method, source).
pub fn method_sources() -> Vec<(&'static str, &'static str, &'static str)> {
    vec![
        ("ue", "power_up", ATTACH_RS),
        ("ue", "connect", ATTACH_RS),
        ("ue", "detach", ATTACH_RS),
        ("ue", "execute_handover", HANDOVER_RS),
        ("ue", "compute_rsrp", RADIO_RS),
        ("ue", "compute_cqi", RADIO_RS),
        ("ue", "move_ues", MOBILITY_RS),
        ("cell", "get_load", SCHEDULER_RS),
        ("cell", "allocate_prbs", SCHEDULER_RS),
        ("cell", "evaluate_a3", HANDOVER_RS),
        ("cell", "a3_condition", HANDOVER_RS),
        ("gnb", "init_network", ENGINE_RS),
        ("ric", "load_balance", RIC_RS),
        ("ric", "a3_policy", RIC_RS),
        ("ric", "apply_cio_updates", RIC_RS),
        ("ric", "step_in_place", ENGINE_RS),
        ("edge_server", "headroom", MODEL_RS),
        ("edge_server", "utilisation", MODEL_RS),
        ("ai_service", "list_services", CATALOG_RS),
        ("ai_service", "match_services", CATALOG_RS),
        ("ai_service", "create_subscription", PROVISION_RS),
        ("ai_service", "teardown", PROVISION_RS),
    ]
}

fn snippet_for(entity: &str, method: &str) -> String {
    method_sources()
        .into_iter()
        .find(|(e, m, _)| *e == entity && *m == method)
        .and_then(|(_, m, src)| extract_fn(src, m))
        .unwrap_or_default()
}

fn edge(kind: EdgeKind, entity: &str, member: &str, attribute: bool) -> RelationshipEdge {
    RelationshipEdge {
        kind,
        target: if attribute {
            NodeRef::attribute(entity, member)
        } else {
            NodeRef::method(entity, member)
        },
    }
}

fn attr_edge(kind: EdgeKind, entity: &str, name: &str) -> RelationshipEdge {
    edge(kind, entity, name, true)
}

fn method_edge(kind: EdgeKind, entity: &str, name: &str) -> RelationshipEdge {
    edge(kind, entity, name, false)
}

struct Attr {
    name: &'static str,
    semantic_type: &'static str,
    unit: Option<&'static str>,
    explanation: &'static str,
    edges: Vec<RelationshipEdge>,
}

fn attr(
    name: &'static str,
    semantic_type: &'static str,
    unit: Option<&'static str>,
    explanation: &'static str,
    edges: Vec<RelationshipEdge>,
) -> Attr {
    Attr {
        name,
        semantic_type,
        unit,
        explanation,
        edges,
    }
}

struct Method {
    name: &'static str,
    signature: &'static str,
    explanation: &'static str,
    identifiers: &'static [&'static str],
    edges: Vec<RelationshipEdge>,
}

fn method(
    name: &'static str,
    signature: &'static str,
    explanation: &'static str,
    identifiers: &'static [&'static str],
    edges: Vec<RelationshipEdge>,
) -> Method {
    Method {
        name,
        signature,
        explanation,
        identifiers,
        edges,
    }
}

fn schema(entity_type: &str, description: &str, attrs: Vec<Attr>, methods: Vec<Method>) -> EntitySchema {
    EntitySchema {
        entity_type: entity_type.to_string(),
        description: description.to_string(),
        attributes: attrs
            .into_iter()
            .map(|a| AttributeDescriptor {
                name: a.name.to_string(),
                semantic_type: a.semantic_type.to_string(),
                unit: a.unit.map(str::to_string),
                explanation: a.explanation.to_string(),
                live_path: format!("/live/{entity_type}/{{id}}/attributes/{}", a.name),
                edges: a.edges,
            })
            .collect(),
        methods: methods
            .into_iter()
            .map(|m| MethodDescriptor {
                name: m.name.to_string(),
                signature: m.signature.to_string(),
                explanation: m.explanation.to_string(),
                source_snippet: snippet_for(entity_type, m.name),
                identifiers: m.identifiers.iter().map(|s| s.to_string()).collect(),
                edges: m.edges,
            })
            .collect(),
    }
}

use EdgeKind::{Affects, DerivedFrom, Triggers, UsedBy};

fn ue_schema() -> EntitySchema {
    schema(
        "ue",
        "User equipment such as a phone or drone. A UE measures every cell, attaches to the strongest one \
         and is handed over between cells by the A3 rule.",
        vec![
            attr(
                "position",
                "coordinate",
                Some("m"),
                "Planar (x, y) location inside the simulated area. Updated every tick by random-waypoint mobility.",
                vec![attr_edge(UsedBy, "ue", "rsrp_map")],
            ),
            attr(
                "serving_cell",
                "cell_reference",
                None,
                "Id of the cell the UE is attached to, or null while detached.",
                vec![],
            ),
            attr(
                "connection_state",
                "enum(DETACHED|ATTACHING|CONNECTED|HANDOVER)",
                None,
                "Radio connection state machine. CONNECTED and HANDOVER imply a serving cell.",
                vec![],
            ),
            attr(
                "cqi",
                "integer 0..15",
                None,
                "Channel quality indicator for the serving cell, mapped linearly from SINR and clamped to 0..15. \
                 Zero while detached.",
                vec![attr_edge(DerivedFrom, "ue", "rsrp_map")],
            ),
            attr(
                "rsrp_map",
                "map cell_id -> float",
                Some("dBm"),
                "Reference signal received power from every cell, refreshed each tick from the log-distance \
                 pathloss model.",
                vec![
                    method_edge(UsedBy, "ue", "execute_handover"),
                    method_edge(UsedBy, "ric", "a3_policy"),
                ],
            ),
            attr(
                "prb_allocated",
                "integer",
                Some("PRB"),
                "Physical resource blocks granted to this UE by its serving cell in the current tick.",
                vec![method_edge(DerivedFrom, "cell", "allocate_prbs")],
            ),
            attr(
                "demand_prbs",
                "integer",
                Some("PRB"),
                "PRBs the UE asks for every tick. Drawn once at network creation.",
                vec![method_edge(UsedBy, "cell", "allocate_prbs")],
            ),
            attr(
                "a3_counters",
                "map cell_id -> integer",
                Some("ticks"),
                "Consecutive ticks the A3 entry condition has held towards each neighbor. A handover fires once a \
                 counter reaches the time-to-trigger.",
                vec![method_edge(UsedBy, "cell", "evaluate_a3")],
            ),
            attr(
                "ai_subscriptions",
                "list of subscription ids",
                None,
                "Active edge AI service subscriptions that include this UE.",
                vec![method_edge(DerivedFrom, "ai_service", "create_subscription")],
            ),
        ],
        vec![
            method(
                "power_up",
                "power_up(state, ue_id) -> events",
                "Switch a detached UE on: pick the strongest cell at or above the attach floor and connect to it \
                 in the same tick.",
                &["best_cell", "connect", "Attaching"],
                vec![method_edge(Triggers, "ue", "connect")],
            ),
            method(
                "connect",
                "connect(state, ue_id, cell_id) -> events",
                "Finish attachment: join the cell, take an initial grant of min(demand, free PRBs), set CQI and \
                 emit UE_ATTACHED.",
                &["free_prbs", "connected_ues", "prb_allocated_total", "serving_cell"],
                vec![
                    method_edge(Triggers, "cell", "allocate_prbs"),
                    attr_edge(Affects, "ue", "serving_cell"),
                    attr_edge(Affects, "cell", "connected_ues"),
                ],
            ),
            method(
                "detach",
                "detach(state, ue_id, reason) -> events",
                "Release the serving cell and all PRBs and emit UE_DETACHED. Used on radio link failure and on \
                 power down.",
                &["serving_cell", "prb_allocated_total", "connected_ues"],
                vec![attr_edge(Affects, "ue", "connection_state")],
            ),
            method(
                "execute_handover",
                "execute_handover(state, ue_id, target_cell_id) -> events",
                "Move a connected UE to the target chosen by the A3 rule. The target admits the UE when it has a \
                 free PRB; a full target rejects it and restarts the time-to-trigger.",
                &["free_prbs", "a3_counters", "connected_ues", "serving_cell", "HandoverTriggered"],
                vec![
                    attr_edge(Affects, "ue", "serving_cell"),
                    attr_edge(Affects, "cell", "connected_ues"),
                    attr_edge(Affects, "cell", "prb_allocated_total"),
                ],
            ),
            method(
                "compute_rsrp",
                "compute_rsrp(ue_position, cell) -> dBm",
                "Transmit power minus log-distance pathloss (32 dB at 1 m, exponent 3.5).",
                &["tx_power_dbm", "pathloss_db", "distance_to"],
                vec![attr_edge(Affects, "ue", "rsrp_map")],
            ),
            method(
                "compute_cqi",
                "compute_cqi(sinr_db) -> 0..15",
                "Map SINR to CQI as round((sinr + 6) / 2) clamped to the 0..15 range.",
                &["CQI_MAX", "clamp"],
                vec![attr_edge(Affects, "ue", "cqi")],
            ),
            method(
                "move_ues",
                "move_ues(state)",
                "Random-waypoint mobility. Each UE walks towards its waypoint and draws a new waypoint and speed \
                 on arrival.",
                &["waypoint", "speed_mps", "random_position"],
                vec![attr_edge(Affects, "ue", "position")],
            ),
        ],
    )
}

fn cell_schema() -> EntitySchema {
    schema(
        "cell",
        "A sector of a gNB with a fixed PRB budget and per-neighbor CIO offsets that bias handover decisions.",
        vec![
            attr("gnb_id", "gnb_reference", None, "Base station hosting this cell.", vec![]),
            attr(
                "position",
                "coordinate",
                Some("m"),
                "Antenna location, offset from the gNB site by sector.",
                vec![method_edge(UsedBy, "ue", "compute_rsrp")],
            ),
            attr(
                "tx_power_dbm",
                "float",
                Some("dBm"),
                "Transmit power used in every RSRP computation for this cell.",
                vec![method_edge(UsedBy, "ue", "compute_rsrp")],
            ),
            attr("frequency_mhz", "float", Some("MHz"), "Carrier centre frequency.", vec![]),
            attr(
                "prb_capacity",
                "integer",
                Some("PRB"),
                "PRBs the cell can hand out per tick.",
                vec![method_edge(UsedBy, "cell", "allocate_prbs")],
            ),
            attr(
                "prb_allocated_total",
                "integer",
                Some("PRB"),
                "Sum of PRBs granted to connected UEs this tick. Never exceeds prb_capacity.",
                vec![method_edge(DerivedFrom, "cell", "allocate_prbs")],
            ),
            attr(
                "cio",
                "map neighbor_cell_id -> float",
                Some("dB"),
                "Cell individual offset towards each neighbor, added to the neighbor RSRP in the A3 check. \
                 Adjusted by the RIC load balancer within +/- 6 dB.",
                vec![method_edge(UsedBy, "cell", "evaluate_a3")],
            ),
            attr(
                "connected_ues",
                "set of ue ids",
                None,
                "UEs currently served by this cell.",
                vec![],
            ),
            attr(
                "load",
                "ratio 0..1",
                None,
                "prb_allocated_total divided by prb_capacity.",
                vec![
                    attr_edge(DerivedFrom, "cell", "prb_allocated_total"),
                    method_edge(UsedBy, "ric", "load_balance"),
                ],
            ),
        ],
        vec![
            method(
                "get_load",
                "get_load(cell) -> ratio",
                "Fraction of the PRB budget currently granted.",
                &["prb_allocated_total", "prb_capacity"],
                vec![attr_edge(Affects, "cell", "load")],
            ),
            method(
                "allocate_prbs",
                "allocate_prbs(cell, demands) -> grants",
                "Round-robin one PRB per UE per pass in UE id order until capacity or demand runs out.",
                &["prb_capacity", "demands"],
                vec![
                    attr_edge(Affects, "ue", "prb_allocated"),
                    attr_edge(Affects, "cell", "prb_allocated_total"),
                ],
            ),
            method(
                "evaluate_a3",
                "evaluate_a3(ue, serving, neighbor, policy) -> decision",
                "Advance the time-to-trigger counter for one neighbor and report a handover trigger once it \
                 reaches ttt_ticks.",
                &["a3_condition", "a3_counters", "ttt_ticks"],
                vec![
                    method_edge(Triggers, "ue", "execute_handover"),
                    method_edge(UsedBy, "ric", "a3_policy"),
                ],
            ),
            method(
                "a3_condition",
                "a3_condition(ue, serving, neighbor, hysteresis_db) -> bool",
                "True when neighbor RSRP plus the serving cell's CIO towards it beats serving RSRP plus \
                 hysteresis.",
                &["rsrp_map", "cio_towards", "hysteresis_db"],
                vec![method_edge(UsedBy, "cell", "evaluate_a3")],
            ),
        ],
    )
}

fn gnb_schema() -> EntitySchema {
    schema(
        "gnb",
        "A base station site hosting one or more sector cells.",
        vec![
            attr("position", "coordinate", Some("m"), "Site location.", vec![]),
            attr(
                "cells",
                "list of cell ids",
                None,
                "Cells hosted by this gNB.",
                vec![],
            ),
        ],
        vec![method(
            "init_network",
            "init_network(config) -> state",
            "Build gNBs, cells, UEs and edge servers from a validated configuration. All random draws come \
             from the seeded generator.",
            &["cells_per_gnb", "ue_count", "measure"],
            vec![attr_edge(Affects, "gnb", "cells")],
        )],
    )
}

fn ric_schema() -> EntitySchema {
    schema(
        "ric",
        "The RAN intelligent controller. It owns the A3 parameters and runs the load-balancing xApp at the \
         end of every tick.",
        vec![
            attr(
                "xapps",
                "list of names",
                None,
                "Enabled control applications: load_balancer and a3_handover.",
                vec![],
            ),
            attr(
                "load_threshold",
                "ratio",
                None,
                "Load difference between two cells above which their CIO is nudged.",
                vec![method_edge(UsedBy, "ric", "load_balance")],
            ),
            attr(
                "cio_step_db",
                "float",
                Some("dB"),
                "CIO change per adjustment.",
                vec![method_edge(UsedBy, "ric", "load_balance")],
            ),
            attr(
                "cio_cap_db",
                "float",
                Some("dB"),
                "Absolute bound on any CIO.",
                vec![method_edge(UsedBy, "ric", "load_balance")],
            ),
            attr(
                "a3_hysteresis_db",
                "float",
                Some("dB"),
                "Margin the neighbor must beat the serving cell by.",
                vec![method_edge(UsedBy, "ric", "a3_policy")],
            ),
            attr(
                "a3_ttt_ticks",
                "integer",
                Some("ticks"),
                "Time-to-trigger: consecutive ticks the A3 condition must hold.",
                vec![method_edge(UsedBy, "ric", "a3_policy")],
            ),
        ],
        vec![
            method(
                "load_balance",
                "load_balance(state) -> (cio_updates, events)",
                "For every ordered cell pair, raise the CIO from the busier cell towards the quieter one (and \
                 lower it in the other direction) when their loads differ by more than the threshold.",
                &["get_load", "load_threshold", "cio_step_db", "cio_cap_db", "CioAdjusted"],
                vec![
                    attr_edge(Affects, "cell", "cio"),
                    method_edge(Triggers, "ric", "apply_cio_updates"),
                ],
            ),
            method(
                "a3_policy",
                "a3_policy(ric) -> A3Policy",
                "Hysteresis and time-to-trigger handed to every A3 evaluation.",
                &["a3_hysteresis_db", "a3_ttt_ticks"],
                vec![method_edge(UsedBy, "cell", "evaluate_a3")],
            ),
            method(
                "apply_cio_updates",
                "apply_cio_updates(state, updates)",
                "Write CIO values decided by load_balance back onto the source cells.",
                &["cio"],
                vec![attr_edge(Affects, "cell", "cio")],
            ),
            method(
                "step_in_place",
                "step_in_place(state) -> events",
                "One simulation tick: commands, mobility, measurement, attach, A3, handover, scheduling and \
                 the RIC xApps, in that order.",
                &["move_ues", "measure", "power_up", "execute_handover", "load_balance"],
                vec![
                    method_edge(Triggers, "ue", "move_ues"),
                    method_edge(Triggers, "ue", "power_up"),
                    method_edge(Triggers, "ric", "load_balance"),
                ],
            ),
        ],
    )
}

fn edge_server_schema() -> EntitySchema {
    schema(
        "edge_server",
        "A compute node that hosts AI inference for subscribed UEs.",
        vec![
            attr(
                "capacity",
                "integer",
                Some("units"),
                "Resource units available for AI subscriptions.",
                vec![method_edge(UsedBy, "ai_service", "create_subscription")],
            ),
            attr(
                "used",
                "integer",
                Some("units"),
                "Units reserved by active subscriptions. Never exceeds capacity.",
                vec![method_edge(DerivedFrom, "ai_service", "create_subscription")],
            ),
        ],
        vec![
            method(
                "headroom",
                "headroom(edge_server) -> units",
                "Capacity not yet reserved.",
                &["capacity", "used"],
                vec![method_edge(UsedBy, "ai_service", "create_subscription")],
            ),
            method(
                "utilisation",
                "utilisation(edge_server) -> ratio",
                "Reserved fraction of capacity. Placement picks the least utilised feasible server.",
                &["capacity", "used"],
                vec![method_edge(UsedBy, "ai_service", "create_subscription")],
            ),
        ],
    )
}

fn ai_service_schema() -> EntitySchema {
    schema(
        "ai_service",
        "A ready-to-deploy inference service in the edge catalog.",
        vec![
            attr("name", "string", None, "Human readable service name.", vec![]),
            attr(
                "task",
                "enum(object_detection|classification|segmentation)",
                None,
                "What the model does.",
                vec![method_edge(UsedBy, "ai_service", "list_services")],
            ),
            attr(
                "modalities",
                "list of sensor types",
                None,
                "Sensor inputs the model accepts, for example rgb_camera or wide_angle_camera.",
                vec![method_edge(UsedBy, "ai_service", "match_services")],
            ),
            attr(
                "target_classes",
                "list of labels",
                None,
                "Labels the model recognises.",
                vec![method_edge(UsedBy, "ai_service", "match_services")],
            ),
            attr(
                "latency_class",
                "enum(realtime|near_realtime|batch)",
                None,
                "Serving latency tier. Real-time requests only match realtime services.",
                vec![method_edge(UsedBy, "ai_service", "match_services")],
            ),
            attr(
                "resource_units",
                "integer",
                Some("units per UE"),
                "Edge capacity reserved for every UE in a subscription.",
                vec![method_edge(UsedBy, "ai_service", "create_subscription")],
            ),
        ],
        vec![
            method(
                "list_services",
                "list_services(filter) -> services",
                "Catalog entries in id order, narrowed by every filter field that is set.",
                &["task", "latency_class", "modalities"],
                vec![],
            ),
            method(
                "match_services",
                "match_services(profile) -> ranked services",
                "Keep services that cover the requested modalities and classes and are realtime when asked; \
                 rank by fewest unused capabilities, then id.",
                &["modalities", "target_classes", "Realtime", "unused_capabilities"],
                vec![method_edge(Triggers, "ai_service", "create_subscription")],
            ),
            method(
                "create_subscription",
                "create_subscription(state, catalog, ue_ids, service_id) -> subscription",
                "Reserve resource_units per UE on the least utilised edge server that fits, render the \
                 integration snippet for each UE and emit AI_SUB_CREATED. Fails without side effects.",
                &[
                    "headroom",
                    "utilisation",
                    "endpoint_url",
                    "render_snippet",
                    "ai_subscriptions",
                ],
                vec![
                    attr_edge(Affects, "edge_server", "used"),
                    attr_edge(Affects, "ue", "ai_subscriptions"),
                ],
            ),
            method(
                "teardown",
                "teardown(state, subscription_id) -> event",
                "Mark a subscription torn down, release its reservation and unlink it from its UEs.",
                &["TornDown", "reserved_units", "ai_subscriptions"],
                vec![
                    attr_edge(Affects, "edge_server", "used"),
                    attr_edge(Affects, "ue", "ai_subscriptions"),
                ],
            ),
        ],
    )
}

/// The registry every service instance starts from.
pub fn seed_registry() -> Registry {
    let mut registry = Registry::new();
    for s in [
        ue_schema(),
        cell_schema(),
        gnb_schema(),
        ric_schema(),
        edge_server_schema(),
        ai_service_schema(),
    ] {
        registry.register_schema(s).expect("seed schemas are distinct");
    }
    registry
}
