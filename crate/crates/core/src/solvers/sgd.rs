//! ε-core via projected stochastic subgradient descent.

use std::time::Instant;

use rand::Rng;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{deficit_with_value, sample_coalitions, NormalizedGame};
use crate::imputation::Imputation;

use super::projection::project_simplex;
use super::{
    heldout_estimate, stream_rng, BatchMode, LeastCoreResult, SolverConfig, TracePoint,
    STREAM_BATCH, STREAM_RESERVOIR,
};

/// Averaged descent direction of the batch-mean coalition loss:
/// `(1/B) Σ_C (d_C/|C|)·c`, the negated subgradient. With a single
/// coalition this is exactly the halfspace-projection displacement.
pub fn subgradient_batch(
    p: &Imputation,
    epsilon: f64,
    batch: &[Coalition],
    game: &NormalizedGame,
) -> Result<Vec<f64>> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let mut direction = vec![0.0; p.len()];
    let inv_b = 1.0 / batch.len() as f64;
    for c in batch {
        if c.is_empty() {
            return Err(Error::EmptyCoalition);
        }
        let d = deficit_with_value(p, c, epsilon, game.value(c));
        if d > 0.0 {
            let step = d / c.size() as f64 * inv_b;
            for i in c.members() {
                direction[i] += step;
            }
        }
    }
    Ok(direction)
}

/// Runs projected SGD on the batch-mean coalition loss at a fixed ε and
/// returns the iterate drawn with probability `η_t / Σ η` (or the last
/// iterate when `cfg.use_last_iterate` is set).
pub fn sgd_solve(
    game: &NormalizedGame,
    epsilon: f64,
    cfg: &SolverConfig,
) -> Result<LeastCoreResult> {
    let start = Instant::now();
    let calls_before = game.calls();
    let n = game.player_count();
    let batch_size = match cfg.batch {
        BatchMode::Sampled(b) => b,
        BatchMode::FullEnumeration => (1usize << n) - 1,
    };
    let full_batch: Option<Vec<Coalition>> = match cfg.batch {
        BatchMode::FullEnumeration => Some(crate::game::enumerate_coalitions(n)?.collect()),
        BatchMode::Sampled(_) => None,
    };

    let mut rng_batch = stream_rng(cfg.seed, STREAM_BATCH);
    let mut rng_reservoir = stream_rng(cfg.seed, STREAM_RESERVOIR);

    let mut p = Imputation::uniform(n);
    // weighted reservoir over iterates 0..T realizes P(t* = t) = eta_t / sum
    let mut weight_total = cfg.schedule.eta(0);
    let mut drawn = p.clone();
    let mut trace = Vec::new();
    let mut iterations_run = 0;

    for t in 1..=cfg.iterations {
        if let Some(limit) = cfg.time_limit {
            if start.elapsed() >= limit {
                break;
            }
        }
        if let Some(budget) = cfg.call_budget {
            let spent = game.calls() - calls_before;
            if spent + batch_size as u64 > budget {
                break;
            }
        }
        let eta = cfg.schedule.eta(t);
        let direction = match &full_batch {
            Some(batch) => subgradient_batch(&p, epsilon, batch, game)?,
            None => {
                let batch = sample_coalitions(n, batch_size, &mut rng_batch);
                subgradient_batch(&p, epsilon, &batch, game)?
            }
        };
        let moved: Vec<f64> = p
            .as_slice()
            .iter()
            .zip(&direction)
            .map(|(pi, di)| pi + eta * di)
            .collect();
        p = project_simplex(&moved)?;
        iterations_run = t;

        weight_total += eta;
        if rng_reservoir.gen::<f64>() < eta / weight_total {
            drawn = p.clone();
        }
        if let Some(every) = cfg.trace_every {
            if t % every == 0 {
                trace.push(TracePoint {
                    iteration: t,
                    epsilon,
                    mu: 0.0,
                    eta,
                });
            }
        }
    }

    let payoffs = if cfg.use_last_iterate { p } else { drawn };
    let epsilon_hat = heldout_estimate(&payoffs, game, cfg);
    Ok(LeastCoreResult {
        payoffs,
        epsilon_final: epsilon,
        epsilon_hat,
        trace,
        oracle_calls: game.calls() - calls_before,
        seed: cfg.seed,
        wall_secs: start.elapsed().as_secs_f64(),
        iterations_run,
        note: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{enumerate_coalitions, normalize, CharacteristicOracle};
    use crate::games::{TabularGame, WeightedVotingGame};
    use crate::solvers::projection::project_halfspace;
    use crate::solvers::StepSchedule;

    fn majority3() -> NormalizedGame {
        normalize(CharacteristicOracle::new(WeightedVotingGame::threshold(3, 2))).unwrap()
    }

    #[test]
    fn satisfied_batch_gives_zero_direction() {
        let ng = majority3();
        let p = Imputation::uniform(3);
        let batch: Vec<Coalition> = enumerate_coalitions(3).unwrap().collect();
        let dir = subgradient_batch(&p, 1.0, &batch, &ng).unwrap();
        assert!(dir.iter().all(|&d| d == 0.0));
    }

    #[test]
    fn single_coalition_matches_halfspace_displacement() {
        let ng = majority3();
        let p = Imputation::new(vec![0.8, 0.1, 0.1]).unwrap();
        let c = Coalition::from_members(3, &[1, 2]);
        let dir = subgradient_batch(&p, 0.1, std::slice::from_ref(&c), &ng).unwrap();
        let projected = project_halfspace(&p, &c, 0.1, &ng).unwrap();
        for i in 0..3 {
            assert!((p[i] + dir[i] - projected[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn two_coalition_batch_averages_directions() {
        let g = TabularGame::from_fn(3, |c| match c.bits() {
            0b011 => 0.9,
            0b101 => 0.6,
            0b111 => 1.0,
            _ => 0.0,
        });
        let ng = normalize(CharacteristicOracle::new(g)).unwrap();
        let p = Imputation::new(vec![0.1, 0.1, 0.8]).unwrap();
        let a = Coalition::from_bits(3, 0b011);
        let b = Coalition::from_bits(3, 0b101);
        let da = subgradient_batch(&p, 0.0, std::slice::from_ref(&a), &ng).unwrap();
        let db = subgradient_batch(&p, 0.0, std::slice::from_ref(&b), &ng).unwrap();
        let dab = subgradient_batch(&p, 0.0, &[a, b], &ng).unwrap();
        for i in 0..3 {
            assert!((dab[i] - 0.5 * (da[i] + db[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_batch_is_an_error() {
        let ng = majority3();
        let p = Imputation::uniform(3);
        assert!(matches!(
            subgradient_batch(&p, 0.0, &[], &ng),
            Err(Error::EmptyBatch)
        ));
    }

    #[test]
    fn symmetric_singleton_win_stays_uniform() {
        // every nonempty coalition wins; eps = 1 - 1/n keeps uniform feasible
        let n = 6;
        let ng =
            normalize(CharacteristicOracle::new(WeightedVotingGame::threshold(n, 1))).unwrap();
        let cfg = SolverConfig {
            iterations: 400,
            batch: BatchMode::FullEnumeration,
            schedule: StepSchedule::Constant(0.5),
            heldout_samples: 2000,
            use_last_iterate: true,
            ..SolverConfig::default()
        };
        let eps = 1.0 - 1.0 / n as f64;
        let res = sgd_solve(&ng, eps, &cfg).unwrap();
        for i in 0..n {
            assert!((res.payoffs[i] - 1.0 / n as f64).abs() < 1e-9);
        }
        assert!(res.epsilon_hat.epsilon_hat <= eps + 1e-3);
    }

    #[test]
    fn infeasible_epsilon_keeps_residual_excess() {
        // majority game at eps = 0.2 < 1/3: max excess stays >= 1/3 - 0.2
        let ng = majority3();
        let cfg = SolverConfig {
            iterations: 2000,
            batch: BatchMode::FullEnumeration,
            schedule: StepSchedule::Constant(0.2),
            heldout_samples: 100,
            use_last_iterate: true,
            ..SolverConfig::default()
        };
        let res = sgd_solve(&ng, 0.2, &cfg).unwrap();
        let batch: Vec<Coalition> = enumerate_coalitions(3).unwrap().collect();
        let max_excess = batch
            .iter()
            .map(|c| ng.value(c) - res.payoffs.payoff(c))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max_excess >= 1.0 / 3.0 - 0.2 - 1e-9);
    }

    #[test]
    fn unit_step_single_sample_equals_cyclic_step() {
        // eta = 1, B = 1: the SGD update is exactly Algorithm 1's step
        let ng = majority3();
        let p = Imputation::new(vec![0.7, 0.2, 0.1]).unwrap();
        let c = Coalition::from_members(3, &[1, 2]);
        let dir = subgradient_batch(&p, 0.05, std::slice::from_ref(&c), &ng).unwrap();
        let stepped: Vec<f64> = p.as_slice().iter().zip(&dir).map(|(a, b)| a + b).collect();
        let via_projection = project_halfspace(&p, &c, 0.05, &ng).unwrap();
        assert_eq!(stepped, via_projection);
    }

    #[test]
    fn deterministic_under_seed() {
        let ng = majority3();
        let cfg = SolverConfig {
            iterations: 200,
            batch: BatchMode::Sampled(4),
            heldout_samples: 50,
            seed: 123,
            ..SolverConfig::default()
        };
        let a = sgd_solve(&ng, 0.4, &cfg).unwrap();
        let b = sgd_solve(&ng, 0.4, &cfg).unwrap();
        assert_eq!(a.payoffs.as_slice(), b.payoffs.as_slice());
        assert_eq!(a.epsilon_hat.epsilon_hat, b.epsilon_hat.epsilon_hat);
    }
}
