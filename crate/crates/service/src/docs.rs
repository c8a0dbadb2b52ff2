//! Knowledge documents rendered from the ontology.

use kpa_core::ontology::{EdgeKind, MemberKind, NodeRef, Registry};
use serde::{Deserialize, Serialize};

use crate::api::ApiError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Out,
    In,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelatedLink {
    pub kind: String,
    pub path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node: Option<String>,
}

impl RelatedLink {
    fn plain(kind: &str, path: String) -> Self {
        Self {
            kind: kind.to_string(),
            path,
            direction: None,
            node: None,
        }
    }

    fn edge(kind: EdgeKind, node: &NodeRef, direction: Direction) -> Self {
        Self {
            kind: kind.as_str().to_string(),
            path: node.docs_path(),
            direction: Some(direction),
            node: Some(node.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnowledgeDocument {
    pub path: String,
    pub title: String,
    pub explanation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    /// Template for reading the attribute; `{id}` is an entity id.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub live_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_snippet: Option<String>,
    pub related: Vec<RelatedLink>,
    pub schema_version: String,
}

pub fn root(registry: &Registry) -> KnowledgeDocument {
    let mut related: Vec<RelatedLink> = registry
        .list_entity_types()
        .into_iter()
        .map(|e| RelatedLink::plain("entity", format!("/docs/{e}")))
        .collect();
    related.push(RelatedLink::plain("live", "/live/network/summary".into()));
    related.push(RelatedLink::plain("insights", "/insights/current".into()));
    related.push(RelatedLink::plain("catalog", "/catalog/services".into()));
    KnowledgeDocument {
        path: "/docs".into(),
        title: "Network knowledge index".into(),
        explanation:
            "Entity types known to the knowledge plane. Each entity document lists its attributes and \
                      methods; attribute documents carry a live_path template for reading current or \
                      historical values (append ?at=<tick>). /live/network/summary reports UE and cell \
                      counts for the latest tick."
                .into(),
        entity_type: None,
        signature: None,
        semantic_type: None,
        unit: None,
        live_path: None,
        source_snippet: None,
        related,
        schema_version: registry.schema_version.clone(),
    }
}

pub fn entity(registry: &Registry, entity: &str) -> Result<KnowledgeDocument, ApiError> {
    let schema = registry
        .get_schema(entity)
        .map_err(|_| ApiError::not_found(format!("entity type `{entity}` is not documented")))?;
    let mut related: Vec<RelatedLink> = schema
        .nodes()
        .map(|n| {
            let kind = match n.member {
                MemberKind::Attribute => "attribute",
                MemberKind::Method => "method",
            };
            RelatedLink::plain(kind, n.docs_path())
        })
        .collect();
    related.push(RelatedLink::plain("live", format!("/live/{entity}")));
    related.push(RelatedLink::plain("index", "/docs".into()));
    Ok(KnowledgeDocument {
        path: format!("/docs/{entity}"),
        title: entity.to_string(),
        explanation: schema.description.clone(),
        entity_type: Some(entity.to_string()),
        signature: None,
        semantic_type: None,
        unit: None,
        live_path: None,
        source_snippet: None,
        related,
        schema_version: registry.schema_version.clone(),
    })
}

fn edge_links(registry: &Registry, node: &NodeRef) -> Vec<RelatedLink> {
    let mut out: Vec<RelatedLink> = registry
        .get_related(node, None)
        .unwrap_or_default()
        .iter()
        .map(|e| RelatedLink::edge(e.kind, &e.target, Direction::Out))
        .collect();
    out.extend(
        registry
            .incoming(node)
            .iter()
            .map(|(src, kind)| RelatedLink::edge(*kind, src, Direction::In)),
    );
    out
}

pub fn member(
    registry: &Registry,
    entity: &str,
    member: MemberKind,
    name: &str,
) -> Result<KnowledgeDocument, ApiError> {
    let schema = registry
        .get_schema(entity)
        .map_err(|_| ApiError::not_found(format!("entity type `{entity}` is not documented")))?;
    let node = NodeRef {
        entity_type: entity.to_string(),
        member,
        name: name.to_string(),
    };
    let missing = || ApiError::not_found(format!("{entity} has no {} `{name}`", member.segment()));
    let mut doc = KnowledgeDocument {
        path: node.docs_path(),
        title: node.to_string(),
        explanation: String::new(),
        entity_type: Some(entity.to_string()),
        signature: None,
        semantic_type: None,
        unit: None,
        live_path: None,
        source_snippet: None,
        related: Vec::new(),
        schema_version: registry.schema_version.clone(),
    };
    match member {
        MemberKind::Attribute => {
            let a = schema.attribute(name).ok_or_else(missing)?;
            doc.explanation = a.explanation.clone();
            doc.semantic_type = Some(a.semantic_type.clone());
            doc.unit = a.unit.clone();
            doc.live_path = Some(a.live_path.clone());
        }
        MemberKind::Method => {
            let m = schema.method(name).ok_or_else(missing)?;
            doc.explanation = m.explanation.clone();
            doc.signature = Some(m.signature.clone());
            doc.source_snippet = Some(m.source_snippet.clone());
        }
    }
    doc.related = edge_links(registry, &node);
    if member == MemberKind::Attribute {
        doc.related
            .push(RelatedLink::plain("live", format!("/live/{entity}")));
    }
    doc.related
        .push(RelatedLink::plain("entity", format!("/docs/{entity}")));
    Ok(doc)
}
