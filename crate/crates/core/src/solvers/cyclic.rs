//! ε-core via cyclic alternating projections.

use std::time::Instant;

use rand::seq::SliceRandom;

use crate::coalition::Coalition;
use crate::error::Result;
use crate::game::{enumerate_coalitions, sample_coalitions, NormalizedGame};
use crate::imputation::Imputation;

use super::projection::{project_halfspace_with_value, project_simplex};
use super::{
    heldout_estimate, stream_rng, LeastCoreResult, SolverConfig, TracePoint, STREAM_ORDER,
};

/// Alternates a halfspace projection onto one coalition constraint with a
/// projection back onto the simplex, starting from the uniform imputation.
///
/// With `n <= 20` the constraints are visited in a true cycle over the full
/// enumeration; beyond that the cycle runs over a seeded random pool,
/// reshuffled per epoch, and the fallback is recorded in the result note.
pub fn cyclic_projection_solve(
    game: &NormalizedGame,
    epsilon: f64,
    cfg: &SolverConfig,
) -> Result<LeastCoreResult> {
    let start = Instant::now();
    let calls_before = game.calls();
    let n = game.player_count();
    let mut rng = stream_rng(cfg.seed, STREAM_ORDER);

    let (mut order, note): (Vec<Coalition>, Option<String>) = if n <= 20 {
        (enumerate_coalitions(n)?.collect(), None)
    } else {
        let pool_size = (16 * n).max(1024);
        let pool = sample_coalitions(n, pool_size, &mut rng);
        (
            pool,
            Some(format!(
                "cyclic order fallback: seeded random pool of {} coalitions, reshuffled per epoch",
                (16 * n).max(1024)
            )),
        )
    };
    let shuffle_per_epoch = n > 20;

    let mut p = Imputation::uniform(n);
    let mut trace = Vec::new();
    let mut iterations_run = 0;

    for t in 1..=cfg.iterations {
        if let Some(limit) = cfg.time_limit {
            if start.elapsed() >= limit {
                break;
            }
        }
        if let Some(budget) = cfg.call_budget {
            if game.calls() - calls_before + 1 > budget {
                break;
            }
        }
        let idx = (t - 1) % order.len();
        if idx == 0 && shuffle_per_epoch && t > 1 {
            order.shuffle(&mut rng);
        }
        let coalition = &order[idx];
        let value = game.value(coalition);
        let moved = project_halfspace_with_value(&p, coalition, epsilon, value)?;
        p = project_simplex(&moved)?;
        iterations_run = t;
        if let Some(every) = cfg.trace_every {
            if t % every == 0 {
                trace.push(TracePoint {
                    iteration: t,
                    epsilon,
                    mu: 0.0,
                    eta: 1.0,
                });
            }
        }
    }

    let epsilon_hat = heldout_estimate(&p, game, cfg);
    Ok(LeastCoreResult {
        payoffs: p,
        epsilon_final: epsilon,
        epsilon_hat,
        trace,
        oracle_calls: game.calls() - calls_before,
        seed: cfg.seed,
        wall_secs: start.elapsed().as_secs_f64(),
        iterations_run,
        note,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{normalize, CharacteristicOracle};
    use crate::games::WeightedVotingGame;

    fn solve_config(iterations: usize) -> SolverConfig {
        SolverConfig {
            iterations,
            heldout_samples: 500,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn majority_three_reaches_the_third_core() {
        let ng =
            normalize(CharacteristicOracle::new(WeightedVotingGame::threshold(3, 2))).unwrap();
        let res = cyclic_projection_solve(&ng, 1.0 / 3.0, &solve_config(80)).unwrap();
        let max_excess = crate::game::enumerate_coalitions(3)
            .unwrap()
            .map(|c| ng.value(&c) - res.payoffs.payoff(&c))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max_excess <= 1.0 / 3.0 + 1e-3, "max excess {max_excess}");
    }

    #[test]
    fn unanimity_keeps_uniform() {
        let n = 4;
        let ng =
            normalize(CharacteristicOracle::new(WeightedVotingGame::threshold(n, n))).unwrap();
        let res = cyclic_projection_solve(&ng, 0.0, &solve_config(64)).unwrap();
        for i in 0..n {
            assert!((res.payoffs[i] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn slack_epsilon_is_a_fixed_point() {
        let ng =
            normalize(CharacteristicOracle::new(WeightedVotingGame::threshold(3, 2))).unwrap();
        let res = cyclic_projection_solve(&ng, 1.0, &solve_config(30)).unwrap();
        for i in 0..3 {
            assert!((res.payoffs[i] - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn large_n_uses_random_pool_and_notes_it() {
        let weights = vec![1.0; 24];
        let ng = normalize(CharacteristicOracle::new(WeightedVotingGame::new(
            weights, 12.0,
        )))
        .unwrap();
        let cfg = SolverConfig {
            iterations: 50,
            heldout_samples: 100,
            ..SolverConfig::default()
        };
        let res = cyclic_projection_solve(&ng, 0.6, &cfg).unwrap();
        assert!(res.note.unwrap().contains("random pool"));
    }
}
