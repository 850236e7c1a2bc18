//! Topology synthesis and simulation batch tooling for multicore
//! cache-hierarchy exploration.
//!
//! The crate turns compact topology names such as `5C_5DL1_2IL1_2DL2_BP`
//! into validated component/connection graphs, emits them as INI-style
//! simulator configuration files, and drives batches of (topology x
//! benchmark) simulation jobs through pluggable backends with functional
//! pre-checks, metric-based early termination, and CSV result extraction.

pub mod classify;
pub mod cli;
pub mod emit;
pub mod graph;
pub mod ini;
pub mod orchestrate;
pub mod report;
pub mod topo;
pub mod validate;

pub use classify::{classify, TopologyKind};
pub use graph::{generate, ArchGraph, Component, ComponentId, ComponentKind, Connection, Stream};
pub use topo::{parse_topology, CacheGroup, CacheRole, TopologySpec};
pub use validate::{validate_graph, ValidationReport};
