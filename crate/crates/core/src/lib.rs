//! Core of the knowledge plane: the RAN simulator, the entity ontology with
//! its relationship graph, and the edge AI service catalog.

pub mod catalog;
pub mod ontology;
pub mod sim;
