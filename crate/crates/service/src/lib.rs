//! Knowledge plane over the RAN simulator: live and historical state, linked
//! documentation, a relationship graph, insights, deduplicated event
//! subscriptions, edge AI provisioning, RBAC with masking, audit and metrics.

pub mod api;
pub mod audit;
pub mod auth;
pub mod broker;
pub mod config;
pub mod docs;
pub mod fixture;
pub mod http;
pub mod insights;
pub mod live;
pub mod metrics;
pub mod persist;
pub mod plane;
pub mod store;

pub use api::{Body, Request, Response};
pub use auth::{AuthTable, Role};
pub use config::ServiceConfig;
pub use http::Server;
pub use plane::{KnowledgePlane, ServiceError};
