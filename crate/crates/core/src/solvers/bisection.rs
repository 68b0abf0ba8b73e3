//! Least-core value by bisection over ε with an ε-core inner solver.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::game::{deficit_with_value, sample_coalitions, NormalizedGame};

use super::{
    cyclic_projection_solve, heldout_estimate, resolve_epsilon_bounds, sgd_solve, stream_rng,
    LeastCoreResult, SolverConfig, STREAM_HELDOUT,
};

/// Which ε-core solver probes feasibility.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerSolver {
    Cyclic,
    Sgd,
}

/// Bisects ε over `[ε_lo, ε_hi]`, judging a probe feasible when the inner
/// solver's held-out max deficit falls below γ, and returns the smallest
/// feasible probe found.
pub fn lcv_via_bisection(
    game: &NormalizedGame,
    inner: InnerSolver,
    tolerance: f64,
    cfg: &SolverConfig,
) -> Result<LeastCoreResult> {
    assert!(tolerance > 0.0);
    let start = Instant::now();
    let calls_before = game.calls();
    let n = game.player_count();
    let (mut lo, mut hi) = resolve_epsilon_bounds(cfg, game, None);

    let probe_sample = {
        let mut rng = stream_rng(cfg.seed, STREAM_HELDOUT ^ 0xb15ec7);
        sample_coalitions(n, cfg.heldout_samples.max(1), &mut rng)
    };
    let probe_values: Vec<f64> = probe_sample.iter().map(|c| game.value(c)).collect();

    let mut best: Option<LeastCoreResult> = None;
    let mut probe_index = 0u64;
    while hi - lo > tolerance {
        if let Some(budget) = cfg.call_budget {
            if game.calls() - calls_before >= budget {
                return Err(Error::BudgetExhausted {
                    spent: game.calls() - calls_before,
                    budget,
                });
            }
        }
        let mid = 0.5 * (lo + hi);
        let probe_cfg = SolverConfig {
            seed: crate::derive_seed(cfg.seed, 0x6000 + probe_index),
            ..cfg.clone()
        };
        probe_index += 1;
        let run = match inner {
            InnerSolver::Cyclic => cyclic_projection_solve(game, mid, &probe_cfg)?,
            InnerSolver::Sgd => sgd_solve(game, mid, &probe_cfg)?,
        };
        let max_deficit = probe_sample
            .iter()
            .zip(&probe_values)
            .map(|(c, &v)| deficit_with_value(&run.payoffs, c, mid, v))
            .fold(0.0f64, f64::max);
        if max_deficit < cfg.gamma {
            hi = mid;
            best = Some(run);
        } else {
            lo = mid;
        }
    }

    let mut result = match best {
        Some(run) => run,
        None => {
            // no probe succeeded: report the trivially feasible upper bound
            match inner {
                InnerSolver::Cyclic => cyclic_projection_solve(game, hi, cfg)?,
                InnerSolver::Sgd => sgd_solve(game, hi, cfg)?,
            }
        }
    };
    result.epsilon_final = hi;
    result.epsilon_hat = heldout_estimate(&result.payoffs, game, cfg);
    result.oracle_calls = game.calls() - calls_before;
    result.wall_secs = start.elapsed().as_secs_f64();
    result.seed = cfg.seed;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{normalize, CharacteristicOracle};
    use crate::games::WeightedVotingGame;
    use crate::solvers::{BatchMode, StepSchedule};

    fn cfg() -> SolverConfig {
        SolverConfig {
            iterations: 600,
            batch: BatchMode::Sampled(16),
            schedule: StepSchedule::Constant(0.5),
            gamma: 0.01,
            heldout_samples: 400,
            use_last_iterate: true,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn unanimity_bisects_to_zero() {
        let ng =
            normalize(CharacteristicOracle::new(WeightedVotingGame::threshold(4, 4))).unwrap();
        let res = lcv_via_bisection(&ng, InnerSolver::Cyclic, 0.01, &cfg()).unwrap();
        assert!(res.epsilon_final <= 0.011, "eps {}", res.epsilon_final);
    }

    #[test]
    fn majority_three_bisects_to_a_third() {
        let ng =
            normalize(CharacteristicOracle::new(WeightedVotingGame::threshold(3, 2))).unwrap();
        for inner in [InnerSolver::Cyclic, InnerSolver::Sgd] {
            let res = lcv_via_bisection(&ng, inner, 0.01, &cfg()).unwrap();
            // smallest feasible probe: within tolerance plus the gamma slack
            assert!(
                (res.epsilon_final - 1.0 / 3.0).abs() <= 0.01 + 0.011,
                "{inner:?} eps {}",
                res.epsilon_final
            );
        }
    }

    #[test]
    fn singleton_win_bisects_to_three_quarters() {
        let ng =
            normalize(CharacteristicOracle::new(WeightedVotingGame::threshold(4, 1))).unwrap();
        let res = lcv_via_bisection(&ng, InnerSolver::Cyclic, 0.01, &cfg()).unwrap();
        assert!((res.epsilon_final - 0.75).abs() <= 0.025, "eps {}", res.epsilon_final);
    }

    #[test]
    fn tiny_budget_exhausts() {
        let ng =
            normalize(CharacteristicOracle::new(WeightedVotingGame::threshold(3, 2))).unwrap();
        let mut c = cfg();
        c.call_budget = Some(50);
        let res = lcv_via_bisection(&ng, InnerSolver::Cyclic, 1e-4, &c);
        assert!(matches!(res, Err(Error::BudgetExhausted { .. })));
    }
}
