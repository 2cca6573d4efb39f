//! Graphs derived from programs: dependency graphs, single-world
//! intervention graphs, primal graphs and treewidth.

mod causal;
mod digraph;
mod undirected;

pub use causal::{d_separated, descendants, screening_independence, single_world_d_separated, swig, SwigGraph, SwigNode};
pub use digraph::{dot_id, DiGraph};
pub use undirected::{primal_graph, treewidth_estimate, treewidth_exact_small, UGraph, MAX_EXACT_VERTICES};
