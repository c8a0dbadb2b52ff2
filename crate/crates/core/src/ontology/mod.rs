//! Entity schemas, their relationship graph and the shipped seed registry.

mod registry;
mod seed;
pub mod snippet;

pub use registry::*;
pub use seed::{method_sources, seed_registry};
