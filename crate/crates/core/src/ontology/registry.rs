use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: &str = "kpa-ontology/1.0";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OntologyError {
    #[error("entity type `{0}` is already registered")]
    Conflict(String),
    #[error("`{name}` is declared twice in schema `{entity_type}`")]
    DuplicateMember { entity_type: String, name: String },
    #[error("{0} not found")]
    NotFound(String),
    #[error("bundle: {0}")]
    Bundle(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    DerivedFrom,
    UsedBy,
    Affects,
    Triggers,
}

impl EdgeKind {
    pub const ALL: [EdgeKind; 4] = [
        EdgeKind::DerivedFrom,
        EdgeKind::UsedBy,
        EdgeKind::Affects,
        EdgeKind::Triggers,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::DerivedFrom => "derived_from",
            EdgeKind::UsedBy => "used_by",
            EdgeKind::Affects => "affects",
            EdgeKind::Triggers => "triggers",
        }
    }

    pub fn parse(s: &str) -> Option<EdgeKind> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MemberKind {
    Attribute,
    Method,
}

impl MemberKind {
    /// Path segment used by the docs and live routes.
    pub fn segment(self) -> &'static str {
        match self {
            MemberKind::Attribute => "attributes",
            MemberKind::Method => "methods",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeRef {
    pub entity_type: String,
    pub member: MemberKind,
    pub name: String,
}

impl NodeRef {
    pub fn attribute(entity_type: &str, name: &str) -> Self {
        Self {
            entity_type: entity_type.into(),
            member: MemberKind::Attribute,
            name: name.into(),
        }
    }

    pub fn method(entity_type: &str, name: &str) -> Self {
        Self {
            entity_type: entity_type.into(),
            member: MemberKind::Method,
            name: name.into(),
        }
    }

    pub fn docs_path(&self) -> String {
        format!(
            "/docs/{}/{}/{}",
            self.entity_type,
            self.member.segment(),
            self.name
        )
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.entity_type, self.name)
    }
}

/// Directed edge stored on its source node: `source --kind--> target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationshipEdge {
    pub kind: EdgeKind,
    pub target: NodeRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeDescriptor {
    pub name: String,
    pub semantic_type: String,
    pub unit: Option<String>,
    pub explanation: String,
    pub live_path: String,
    pub edges: Vec<RelationshipEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDescriptor {
    pub name: String,
    pub signature: String,
    pub explanation: String,
    pub source_snippet: String,
    /// Identifiers the snippet must mention besides the method name.
    pub identifiers: Vec<String>,
    pub edges: Vec<RelationshipEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntitySchema {
    pub entity_type: String,
    pub description: String,
    pub attributes: Vec<AttributeDescriptor>,
    pub methods: Vec<MethodDescriptor>,
}

impl EntitySchema {
    pub fn attribute(&self, name: &str) -> Option<&AttributeDescriptor> {
        self.attributes.iter().find(|a| a.name == name)
    }

    pub fn method(&self, name: &str) -> Option<&MethodDescriptor> {
        self.methods.iter().find(|m| m.name == name)
    }

    /// Attribute and method nodes in declaration order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeRef> + '_ {
        self.attributes
            .iter()
            .map(|a| NodeRef::attribute(&self.entity_type, &a.name))
            .chain(
                self.methods
                    .iter()
                    .map(|m| NodeRef::method(&self.entity_type, &m.name)),
            )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum ValidationIssue {
    DanglingEdge { source: String, target: String },
    EmptyExplanation { node: String },
    SnippetMismatch { node: String, missing: String },
    UnroutableLivePath { node: String, live_path: String },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Ordered set of entity schemas. Built once, then read-only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Registry {
    pub schema_version: String,
    schemas: Vec<EntitySchema>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::new()
    }
}

impl Registry {
    pub fn new() -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            schemas: Vec::new(),
        }
    }

    /// Edge targets are not checked here; see [`Registry::validate_registry`].
    pub fn register_schema(&mut self, schema: EntitySchema) -> Result<(), OntologyError> {
        if self.schemas.iter().any(|s| s.entity_type == schema.entity_type) {
            return Err(OntologyError::Conflict(schema.entity_type));
        }
        let mut names = std::collections::BTreeSet::new();
        for name in schema
            .attributes
            .iter()
            .map(|a| &a.name)
            .chain(schema.methods.iter().map(|m| &m.name))
        {
            if !names.insert(name) {
                return Err(OntologyError::DuplicateMember {
                    entity_type: schema.entity_type.clone(),
                    name: name.clone(),
                });
            }
        }
        self.schemas.push(schema);
        Ok(())
    }

    pub fn get_schema(&self, entity_type: &str) -> Result<&EntitySchema, OntologyError> {
        self.schemas
            .iter()
            .find(|s| s.entity_type == entity_type)
            .ok_or_else(|| OntologyError::NotFound(format!("entity type `{entity_type}`")))
    }

    pub fn list_entity_types(&self) -> Vec<&str> {
        self.schemas.iter().map(|s| s.entity_type.as_str()).collect()
    }

    pub fn schemas(&self) -> &[EntitySchema] {
        &self.schemas
    }

    /// Resolve a member name (attribute or method) within an entity type.
    pub fn resolve(&self, entity_type: &str, name: &str) -> Option<NodeRef> {
        let schema = self.get_schema(entity_type).ok()?;
        if schema.attribute(name).is_some() {
            Some(NodeRef::attribute(entity_type, name))
        } else if schema.method(name).is_some() {
            Some(NodeRef::method(entity_type, name))
        } else {
            None
        }
    }

    pub fn contains(&self, node: &NodeRef) -> bool {
        self.edges_of(node).is_some()
    }

    fn edges_of(&self, node: &NodeRef) -> Option<&[RelationshipEdge]> {
        let schema = self.get_schema(&node.entity_type).ok()?;
        match node.member {
            MemberKind::Attribute => schema.attribute(&node.name).map(|a| a.edges.as_slice()),
            MemberKind::Method => schema.method(&node.name).map(|m| m.edges.as_slice()),
        }
    }

    /// Outgoing edges of `node` in declaration order, optionally of one kind.
    pub fn get_related(
        &self,
        node: &NodeRef,
        kind: Option<EdgeKind>,
    ) -> Result<Vec<RelationshipEdge>, OntologyError> {
        let edges = self
            .edges_of(node)
            .ok_or_else(|| OntologyError::NotFound(format!("node `{node}`")))?;
        Ok(edges
            .iter()
            .filter(|e| kind.is_none_or(|k| e.kind == k))
            .cloned()
            .collect())
    }

    /// Edges pointing at `node`, as (source, kind), in registry order.
    pub fn incoming(&self, node: &NodeRef) -> Vec<(NodeRef, EdgeKind)> {
        let mut out = Vec::new();
        for schema in &self.schemas {
            for source in schema.nodes() {
                for edge in self.edges_of(&source).unwrap_or_default() {
                    if &edge.target == node {
                        out.push((source.clone(), edge.kind));
                    }
                }
            }
        }
        out
    }

    /// Report dangling edges, empty explanations, snippets that do not
    /// mention their method (or declared identifiers), and live paths the
    /// `live_routable` predicate rejects.
    pub fn validate_registry(&self, live_routable: &dyn Fn(&str) -> bool) -> ValidationReport {
        let mut issues = Vec::new();
        for schema in &self.schemas {
            if schema.description.trim().is_empty() {
                issues.push(ValidationIssue::EmptyExplanation {
                    node: schema.entity_type.clone(),
                });
            }
            for attr in &schema.attributes {
                let node = NodeRef::attribute(&schema.entity_type, &attr.name);
                if attr.explanation.trim().is_empty() {
                    issues.push(ValidationIssue::EmptyExplanation {
                        node: node.to_string(),
                    });
                }
                if !live_routable(&attr.live_path) {
                    issues.push(ValidationIssue::UnroutableLivePath {
                        node: node.to_string(),
                        live_path: attr.live_path.clone(),
                    });
                }
                self.check_edges(&node, &attr.edges, &mut issues);
            }
            for method in &schema.methods {
                let node = NodeRef::method(&schema.entity_type, &method.name);
                if method.explanation.trim().is_empty() {
                    issues.push(ValidationIssue::EmptyExplanation {
                        node: node.to_string(),
                    });
                }
                for ident in std::iter::once(&method.name).chain(&method.identifiers) {
                    if method.source_snippet.trim().is_empty()
                        || !method.source_snippet.contains(ident.as_str())
                    {
                        issues.push(ValidationIssue::SnippetMismatch {
                            node: node.to_string(),
                            missing: ident.clone(),
                        });
                    }
                }
                self.check_edges(&node, &method.edges, &mut issues);
            }
        }
        ValidationReport { issues }
    }

    fn check_edges(&self, source: &NodeRef, edges: &[RelationshipEdge], issues: &mut Vec<ValidationIssue>) {
        for edge in edges {
            if !self.contains(&edge.target) {
                issues.push(ValidationIssue::DanglingEdge {
                    source: source.to_string(),
                    target: edge.target.to_string(),
                });
            }
        }
    }

    /// Versioned structured-text bundle of the whole registry.
    pub fn to_bundle(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry is always serializable")
    }

    pub fn from_bundle(text: &str) -> Result<Self, OntologyError> {
        let registry: Registry =
            serde_json::from_str(text).map_err(|e| OntologyError::Bundle(e.to_string()))?;
        if registry.schema_version != SCHEMA_VERSION {
            return Err(OntologyError::Bundle(format!(
                "unsupported schema_version `{}`",
                registry.schema_version
            )));
        }
        Ok(registry)
    }
}
