//! Deterministic agent harness for the knowledge plane: a query tool that
//! records transcripts, a link-following explorer and scripted scenarios.
//! An optional external completion provider can drive the explorer instead
//! of the scripted one.

pub mod checks;
pub mod client;
pub mod explore;
pub mod provider;
pub mod scenario;
pub mod tool;
pub mod transcript;

pub use client::{HttpClient, InProcessClient, KnowledgeClient, Reply};
pub use explore::{explore, Goal, Outcome};
pub use provider::{CompletionProvider, ExternalProvider, ScriptedProvider};
pub use scenario::{run_scenario, ScenarioId};
pub use tool::KnowledgeTool;
pub use transcript::Transcript;
