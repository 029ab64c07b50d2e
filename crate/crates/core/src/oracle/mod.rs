//! Numerical certification of the closed-form trees.

mod ft;
mod network;
mod topology;

pub use ft::{
    weighted_distance_gradient, weighted_distance_sum, weighted_ft_point, weighted_median, FtOptions, FtSolution,
};
pub use network::{
    first_order_residual, gradient_residual, minimize_two_node_network, minimize_two_node_network_with,
    run_alternating, NetworkProblem, OracleOptions, OracleResult,
};
pub use topology::{full_steiner_4pt_planar, full_steiner_4pt_planar_with, Candidate, Topology, TopologyReport};
