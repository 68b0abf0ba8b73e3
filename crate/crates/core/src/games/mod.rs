//! Compact game representations and seeded random generators.

mod dist;
mod graph;
mod io;
mod mcn;
mod tabular;
mod wvg;

pub use dist::WeightDistribution;
pub use graph::{
    assign_edge_weights, generate_graph, Edge, GraphModel, InducedSubgraphGame, WeightedGraph,
};
pub use io::{read_game, write_graph, write_mcn, write_wvg, GameFile};
pub use mcn::{MarginalContributionNetwork, Rule};
pub use tabular::TabularGame;
pub use wvg::WeightedVotingGame;
