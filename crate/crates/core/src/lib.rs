//! Node-removal planning that pushes a network toward a star.
//!
//! The score being maximized is the degree centralization of the graph left
//! after deleting a set of nodes: 1 for a star, 0 for any regular graph.
//! [`solvers::greedy_fragile`] is the practical planner,
//! [`solvers::ExactSolver`] the ground truth on small graphs and
//! [`ip::IpModel`] the integer-programming formulation for external solvers.

pub mod baselines;
pub mod cli;
pub mod graph;
pub mod harness;
pub mod io;
pub mod ip;
pub mod solvers;
pub mod synth;

pub use baselines::{static_removal_schedule, Centrality, NodeRanking};
pub use graph::{
    centralization, fragile, induced_subgraph, marginal_gain, network_degree_centrality,
    FragilityState, Graph, GraphBuilder, GraphError, NoStrikeSet, NodeId, RemovalSet,
};
pub use solvers::{
    exact_opt, fragility_decision, greedy_fragile, ExactSolver, RemovalSolution, SolverError,
};
