//! Catalog of ready-to-deploy edge AI services and the provisioning path
//! that binds a service to a set of UEs on an edge server.

mod provision;
mod seed;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use provision::{create_subscription, get_subscription, list_for_ue, teardown};
pub use seed::seed_services;

pub const ENDPOINT_PLACEHOLDER: &str = "{ENDPOINT_URL}";
pub const UE_PLACEHOLDER: &str = "{UE_ID}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    ObjectDetection,
    Classification,
    Segmentation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatencyClass {
    Realtime,
    NearRealtime,
    Batch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AiServiceDescriptor {
    pub id: String,
    pub name: String,
    pub task: Task,
    pub modalities: Vec<String>,
    pub target_classes: Vec<String>,
    pub latency_class: LatencyClass,
    pub resource_units: u32,
    pub snippet_template: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ServiceFilter {
    pub task: Option<Task>,
    pub latency_class: Option<LatencyClass>,
    pub modality: Option<String>,
    pub target_class: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct RequirementProfile {
    pub modalities: Vec<String>,
    pub realtime: bool,
    pub target_classes: Vec<String>,
    pub ue_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceMatch {
    pub service: AiServiceDescriptor,
    /// Offered modalities and classes the profile did not ask for.
    pub unused_capabilities: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CatalogError {
    #[error("duplicate service id `{0}`")]
    DuplicateService(String),
    #[error("service `{0}` is malformed: {1}")]
    InvalidService(String, String),
    #[error("unknown service `{0}`")]
    UnknownService(String),
    #[error("unknown UE `{0}`")]
    UnknownUe(String),
    #[error("unknown subscription `{0}`")]
    UnknownSubscription(String),
    #[error("subscription `{0}` is already torn down")]
    AlreadyTornDown(String),
    #[error("a subscription needs at least one UE")]
    EmptyUeSet,
    #[error("no edge server has {required} free units")]
    InsufficientCapacity {
        required: u32,
        headroom: BTreeMap<String, u32>,
    },
}

/// Immutable set of service descriptors, ordered by id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    services: BTreeMap<String, AiServiceDescriptor>,
}

impl Default for Catalog {
    fn default() -> Self {
        Self::seeded()
    }
}

impl Catalog {
    pub fn new(services: Vec<AiServiceDescriptor>) -> Result<Self, CatalogError> {
        let mut map = BTreeMap::new();
        for s in services {
            if s.resource_units < 1 {
                return Err(CatalogError::InvalidService(
                    s.id,
                    "resource_units must be >= 1".into(),
                ));
            }
            if !s.snippet_template.contains(ENDPOINT_PLACEHOLDER)
                || !s.snippet_template.contains(UE_PLACEHOLDER)
            {
                return Err(CatalogError::InvalidService(
                    s.id,
                    "snippet_template lacks a placeholder".into(),
                ));
            }
            if map.contains_key(&s.id) {
                return Err(CatalogError::DuplicateService(s.id));
            }
            map.insert(s.id.clone(), s);
        }
        Ok(Self { services: map })
    }

    pub fn seeded() -> Self {
        Self::new(seed_services()).expect("seed catalog is well-formed")
    }

    pub fn get(&self, id: &str) -> Option<&AiServiceDescriptor> {
        self.services.get(id)
    }

    /// Id-ordered services satisfying every set field of the filter.
    pub fn list_services(&self, filter: &ServiceFilter) -> Vec<&AiServiceDescriptor> {
        self.services
            .values()
            .filter(|s| filter.task.is_none_or(|t| s.task == t))
            .filter(|s| filter.latency_class.is_none_or(|l| s.latency_class == l))
            .filter(|s| filter.modality.as_ref().is_none_or(|m| s.modalities.contains(m)))
            .filter(|s| {
                filter
                    .target_class
                    .as_ref()
                    .is_none_or(|c| s.target_classes.contains(c))
            })
            .collect()
    }

    /// Services meeting every hard constraint of the profile, ranked by fewest
    /// unused capabilities and then by id.
    pub fn match_services(&self, profile: &RequirementProfile) -> Vec<ServiceMatch> {
        let wanted_modalities: BTreeSet<&String> = profile.modalities.iter().collect();
        let wanted_classes: BTreeSet<&String> = profile.target_classes.iter().collect();
        let mut matches: Vec<ServiceMatch> = self
            .services
            .values()
            .filter(|s| wanted_modalities.iter().all(|m| s.modalities.contains(m)))
            .filter(|s| !profile.realtime || s.latency_class == LatencyClass::Realtime)
            .filter(|s| wanted_classes.iter().all(|c| s.target_classes.contains(c)))
            .map(|s| {
                let unused = s
                    .modalities
                    .iter()
                    .filter(|m| !wanted_modalities.contains(m))
                    .count()
                    + s.target_classes
                        .iter()
                        .filter(|c| !wanted_classes.contains(c))
                        .count();
                ServiceMatch {
                    service: s.clone(),
                    unused_capabilities: unused,
                }
            })
            .collect();
        matches.sort_by(|a, b| {
            a.unused_capabilities
                .cmp(&b.unused_capabilities)
                .then_with(|| a.service.id.cmp(&b.service.id))
        });
        matches
    }
}

/// Substitute the endpoint URL and UE id into a service's snippet template.
pub fn render_snippet(template: &str, endpoint_url: &str, ue_id: &str) -> String {
    template
        .replace(ENDPOINT_PLACEHOLDER, endpoint_url)
        .replace(UE_PLACEHOLDER, ue_id)
}

pub fn endpoint_url(edge_server_id: &str, subscription_id: &str) -> String {
    format!("http://{edge_server_id}.edge.local/infer/{subscription_id}")
}
