//! Higher-order species-flow network.
//!
//! Ballast carried forward over several port calls turns a ship's itinerary
//! into weighted source→sink paths ([`extract_paths`]). Variable-order rules
//! are grown from those paths ([`grow_rules`]): a longer history is kept only
//! when it changes the next-port distribution enough to matter. The rules are
//! rewired into a network of (port, history) states ([`build_hon_network`]),
//! which is finally collapsed back onto a port×port matrix
//! ([`project_physical`], [`normalize_edges`]).
//!
//! Ports are referred to by [`PortIdx`], their position in
//! [`Dataset::ports`](crate::ingest::Dataset::ports).

mod adjacency;
mod network;
mod paths;
mod rules;

pub use adjacency::{normalize_edges, project_physical, PhysicalAdjacency};
pub use network::{build_hon_network, HonEdge, HonNetwork};
pub use paths::{extract_paths, merge_paths, PathObservation};
pub use rules::{grow_rules, write_rules_csv, Flow, HonRule, RuleSet};

pub type PortIdx = u32;
