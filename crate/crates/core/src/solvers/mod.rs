//! Iterative ε-core and least-core solvers.
//!
//! Three families share the configuration and result types here:
//!
//! * [`cyclic_projection_solve`] — alternating halfspace/simplex projections,
//! * [`sgd_solve`] — projected stochastic subgradient on the coalition loss,
//! * [`mirror_prox_solve`] / [`adam_softmax_solve`] — extragradient on the
//!   core Lagrangian saddle problem, returning the least-core value and an
//!   imputation together.

mod bisection;
mod cyclic;
mod projection;
mod saddle;
mod sgd;

pub use bisection::{lcv_via_bisection, InnerSolver};
pub use cyclic::cyclic_projection_solve;
pub use projection::{project_halfspace, project_simplex};
pub use saddle::{adam_softmax_solve, f_map, mirror_prox_solve, prox_tailored, MapEstimate};
pub use sgd::{sgd_solve, subgradient_batch};

use crate::game::{sample_coalitions, NormalizedGame, SampleEstimate};
use crate::imputation::Imputation;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Step-size schedule `η_t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepSchedule {
    Constant(f64),
    /// `η_t = max(end, start·(1 − t/horizon) + end·(t/horizon))`.
    Linear { start: f64, end: f64, horizon: usize },
}

impl StepSchedule {
    pub fn eta(&self, t: usize) -> f64 {
        match *self {
            StepSchedule::Constant(eta) => eta,
            StepSchedule::Linear { start, end, horizon } => {
                let frac = t as f64 / horizon as f64;
                end.max(start * (1.0 - frac) + end * frac)
            }
        }
    }
}

/// How each map evaluation obtains its coalition batch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BatchMode {
    /// Fresh batch of this size per map evaluation.
    Sampled(usize),
    /// All `2^n − 1` coalitions, values evaluated once (`n <= 20`).
    FullEnumeration,
}

/// Primal update rule of the saddle solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProxKind {
    /// Entropic step on the simplex, Euclidean clipped steps on ε and μ.
    Tailored,
    /// Payoffs as `softmax(s)`; adaptive-moment updates on the logits.
    AdamSoftmax,
}

/// Shared solver configuration.
///
/// `Default` carries the standard experiment settings: constant η = 0.1,
/// batch 1000, γ = 0.01, μ₀ = 1000 capped by the μ upper bound, T = 10⁴,
/// Adam-softmax primal updates.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Iteration count `T`.
    pub iterations: usize,
    pub batch: BatchMode,
    pub schedule: StepSchedule,
    /// Constraint-violation threshold γ.
    pub gamma: f64,
    pub seed: u64,
    pub prox: ProxKind,
    /// `[ε_lo, ε_hi]`; `None` resolves ε_hi to `max(1, observed max v)` —
    /// exact under full enumeration, over `10·n` sampled coalitions
    /// otherwise.
    pub epsilon_bounds: Option<(f64, f64)>,
    /// Upper bound μ̄; `None` resolves to `B_eff · n / γ`, the single-
    /// violated-constraint bound under batch-mean normalization.
    pub mu_upper: Option<f64>,
    /// Initial multiplier; `None` starts at μ̄. Explicit values are capped
    /// at μ̄.
    pub mu_init: Option<f64>,
    /// Record a trace point every k-th iteration.
    pub trace_every: Option<usize>,
    /// Held-out sample size for the final ε̂ estimate.
    pub heldout_samples: usize,
    /// Stop before an iteration whose oracle calls would exceed this.
    pub call_budget: Option<u64>,
    /// Stop once this much wall-clock time has elapsed.
    pub time_limit: Option<std::time::Duration>,
    /// SGD: return the last iterate instead of the η-weighted draw.
    pub use_last_iterate: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            iterations: 10_000,
            batch: BatchMode::Sampled(1000),
            schedule: StepSchedule::Constant(0.1),
            gamma: 0.01,
            seed: 0,
            prox: ProxKind::AdamSoftmax,
            epsilon_bounds: None,
            mu_upper: None,
            mu_init: Some(1000.0),
            trace_every: None,
            heldout_samples: 50_000,
            call_budget: None,
            time_limit: None,
            use_last_iterate: false,
        }
    }
}

impl SolverConfig {
    /// Settings used for the wall-clock race: linearly decayed step
    /// 0.1 → 0.01 over 1000 iterations, batch 100, γ = 0.001.
    pub fn timing_defaults() -> Self {
        SolverConfig {
            batch: BatchMode::Sampled(100),
            schedule: StepSchedule::Linear {
                start: 0.1,
                end: 0.01,
                horizon: 1000,
            },
            gamma: 0.001,
            ..SolverConfig::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Primal/dual iterate of the core Lagrangian.
#[derive(Clone, Debug)]
pub struct SaddleState {
    pub payoffs: Imputation,
    pub epsilon: f64,
    pub mu: f64,
}

/// Box constraints the saddle iterates live in.
#[derive(Clone, Copy, Debug)]
pub struct SaddleBounds {
    pub epsilon_lo: f64,
    pub epsilon_hi: f64,
    pub mu_upper: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct TracePoint {
    pub iteration: usize,
    pub epsilon: f64,
    pub mu: f64,
    pub eta: f64,
}

/// Outcome of a least-core solve.
#[derive(Clone, Debug)]
pub struct LeastCoreResult {
    /// Returned imputation (weighted average for the saddle solvers).
    pub payoffs: Imputation,
    /// Final ε iterate (saddle solvers) or the ε the run was asked to
    /// satisfy (ε-core solvers).
    pub epsilon_final: f64,
    /// Sampled max-excess of `payoffs` on a held-out coalition sample drawn
    /// from a stream disjoint from the training batches.
    pub epsilon_hat: SampleEstimate,
    pub trace: Vec<TracePoint>,
    /// Oracle calls spent by this solve, held-out evaluation included.
    pub oracle_calls: u64,
    pub seed: u64,
    pub wall_secs: f64,
    pub iterations_run: usize,
    /// Extra run facts (e.g. the cyclic solver's coalition-order fallback).
    pub note: Option<String>,
}

// rng stream indices; spread apart so derived streams never collide
pub(crate) const STREAM_BATCH: u64 = 0x10;
pub(crate) const STREAM_HELDOUT: u64 = 0x20;
pub(crate) const STREAM_BOUNDS: u64 = 0x30;
pub(crate) const STREAM_RESERVOIR: u64 = 0x40;
pub(crate) const STREAM_ORDER: u64 = 0x50;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(crate::derive_seed(seed, stream))
}

/// Resolves `[ε_lo, ε_hi]`; `known_max_value` is supplied by full-
/// enumeration callers, otherwise `10·n` coalitions are sampled.
pub(crate) fn resolve_epsilon_bounds(
    cfg: &SolverConfig,
    game: &NormalizedGame,
    known_max_value: Option<f64>,
) -> (f64, f64) {
    if let Some(bounds) = cfg.epsilon_bounds {
        return bounds;
    }
    let hi = match known_max_value {
        Some(v) => v.max(1.0),
        None => {
            let n = game.player_count();
            let mut rng = stream_rng(cfg.seed, STREAM_BOUNDS);
            let sample = sample_coalitions(n, 10 * n, &mut rng);
            sample
                .iter()
                .map(|c| game.value(c))
                .fold(1.0f64, f64::max)
        }
    };
    (0.0, hi)
}

/// Evaluates the held-out ε̂ of an imputation on a fresh sample.
pub(crate) fn heldout_estimate(
    payoffs: &Imputation,
    game: &NormalizedGame,
    cfg: &SolverConfig,
) -> SampleEstimate {
    let n = game.player_count();
    let mut rng = stream_rng(cfg.seed, STREAM_HELDOUT);
    let sample = sample_coalitions(n, cfg.heldout_samples.max(1), &mut rng);
    crate::game::epsilon_hat(payoffs, &sample, game).expect("nonempty sample")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_schedule_matches_closed_form() {
        let s = StepSchedule::Linear {
            start: 0.1,
            end: 0.01,
            horizon: 1000,
        };
        assert!((s.eta(0) - 0.1).abs() < 1e-15);
        assert!((s.eta(500) - 0.055).abs() < 1e-15);
        assert!((s.eta(1000) - 0.01).abs() < 1e-15);
        // clamps at the floor beyond the horizon
        assert!((s.eta(5000) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn schedule_stays_positive_and_nonincreasing() {
        let s = StepSchedule::Linear {
            start: 0.2,
            end: 0.05,
            horizon: 100,
        };
        let mut prev = f64::INFINITY;
        for t in 0..300 {
            let e = s.eta(t);
            assert!(e > 0.0);
            assert!(e <= prev + 1e-15);
            prev = e;
        }
    }
}
