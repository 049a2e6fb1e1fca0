//! Identity registry, proof replay and report formats on top of `qdissect_core`.

pub mod pipeline;
pub mod registry;
pub mod report;
pub mod terms;
