//! Exact small-instance oracles: dense two-phase simplex, the full and
//! sampled least-core LPs, and exact Shapley values.

mod least_core;
mod shapley;
mod simplex;

pub use least_core::{least_core_exact, sampled_lp_least_core, MAX_EXACT_LP_PLAYERS};
pub use shapley::{shapley_exact, MAX_EXACT_SHAPLEY_PLAYERS};
pub use simplex::{simplex_solve, DenseLP, LPSolution, LPStatus, Sense};
