//! Balanced component discovery in signed graphs.
//!
//! The pipeline samples BFS spanning trees, turns each into a near-balanced
//! state by switching the off-tree edges that close negative cycles, keeps the
//! `K` states with the fewest switches, then deletes one endpoint of every
//! switched edge and returns the largest balanced connected component found.

pub mod dsu;
pub mod graph;
pub mod ingest;
pub mod purge;
pub mod rng;
pub mod states;
pub mod verify;

pub use graph::{canonicalize, Edge, EdgeId, GraphError, GraphStats, Sign, SignedGraph, VertexId};
pub use ingest::{RawEdgeList, SourceFormat};
pub use purge::{run_abcd, AbcdParams, AbcdResult, Criterion, Profile, TopK};
pub use states::{collect_topk_states, BalancedState, StateSet};
pub use verify::{is_balanced, BalanceReport};
