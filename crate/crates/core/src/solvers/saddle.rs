//! Least-core via extragradient steps on the core Lagrangian
//!
//! ```text
//!   min_{p ∈ Δ, ε ∈ [ε_lo, ε_hi]}  max_{μ ∈ [0, μ̄]}
//!       ε + μ·(mean_C ℓ_C(p, ε) − γ²)
//! ```
//!
//! Each iteration evaluates the monotone map `F` on a fresh batch, probes
//! with a prox step, re-evaluates `F` at the probe on a second batch, and
//! commits the second step from the original iterate. The returned
//! imputation is the η-weighted average of the committed iterates.
//!
//! Batch sums are normalized to means, so the multiplier bound consistent
//! with the single-violated-constraint argument is `B·n/γ` rather than
//! `n/γ`, and the multiplier starts at that bound. The ε step is clamped by
//! an annealed trust region: the map is only piecewise smooth in ε, and an
//! uncapped step of size η repeatedly overshoots the kink, leaving the
//! final iterate anywhere in an O(η) band instead of near the solution.

use std::time::Instant;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{deficit_with_value, sample_coalitions, NormalizedGame};
use crate::imputation::Imputation;
use crate::numeric::softmax;

use super::{
    heldout_estimate, resolve_epsilon_bounds, stream_rng, BatchMode, LeastCoreResult, ProxKind,
    SaddleBounds, SaddleState, SolverConfig, TracePoint, STREAM_BATCH,
};

/// Batch-mean estimate of the saddle map `F = [∇_p L, ∇_ε L, −∇_μ L]`.
#[derive(Clone, Debug)]
pub struct MapEstimate {
    pub g_payoffs: Vec<f64>,
    pub g_epsilon: f64,
    pub g_mu: f64,
}

/// Evaluates the map on a coalition batch (one oracle call per coalition):
///
/// * `g_p = −μ · (1/B) Σ (d_C/|C|)·c`
/// * `g_ε = 1 − μ · (1/B) Σ (d_C/|C|)`
/// * `g_μ = −((1/B) Σ ℓ_C − γ²)`
pub fn f_map(
    state: &SaddleState,
    batch: &[Coalition],
    game: &NormalizedGame,
    gamma: f64,
) -> Result<MapEstimate> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    let values: Vec<f64> = batch.iter().map(|c| game.value(c)).collect();
    Ok(f_map_with_values(state, batch, &values, gamma))
}

/// Map evaluation with coalition values already known (no oracle calls).
pub(crate) fn f_map_with_values(
    state: &SaddleState,
    batch: &[Coalition],
    values: &[f64],
    gamma: f64,
) -> MapEstimate {
    let n = state.payoffs.len();
    let inv_b = 1.0 / batch.len() as f64;
    let mut g_payoffs = vec![0.0; n];
    let mut deficit_sum = 0.0;
    let mut loss_sum = 0.0;
    for (c, &v) in batch.iter().zip(values) {
        let d = deficit_with_value(&state.payoffs, c, state.epsilon, v);
        if d > 0.0 {
            let size = c.size() as f64;
            let scaled = d / size;
            deficit_sum += scaled;
            loss_sum += d * scaled / 2.0;
            for i in c.members() {
                g_payoffs[i] -= state.mu * scaled * inv_b;
            }
        }
    }
    MapEstimate {
        g_payoffs,
        g_epsilon: 1.0 - state.mu * deficit_sum * inv_b,
        g_mu: -(loss_sum * inv_b - gamma * gamma),
    }
}

/// The tailored prox step: entropic on the simplex, Euclidean clipped on
/// the box variables.
///
/// * `p' = softmax(log p − η·g_p)` (entries clamped at 1e-300 before log)
/// * `ε' = clip(ε − η·g_ε, ε_lo, ε_hi)`
/// * `μ' = clip(μ − η·g_μ, 0, μ̄)`
pub fn prox_tailored(
    state: &SaddleState,
    g: &MapEstimate,
    eta: f64,
    bounds: &SaddleBounds,
) -> SaddleState {
    let logits: Vec<f64> = state
        .payoffs
        .as_slice()
        .iter()
        .zip(&g.g_payoffs)
        .map(|(&p, &gp)| p.max(1e-300).ln() - eta * gp)
        .collect();
    SaddleState {
        payoffs: Imputation::new_unchecked(softmax(&logits)),
        epsilon: (state.epsilon - eta * g.g_epsilon).clamp(bounds.epsilon_lo, bounds.epsilon_hi),
        mu: (state.mu - eta * g.g_mu).clamp(0.0, bounds.mu_upper),
    }
}

/// Least-core solve with the prox kind taken from the configuration.
pub fn mirror_prox_solve(game: &NormalizedGame, cfg: &SolverConfig) -> Result<LeastCoreResult> {
    saddle_solve(game, cfg, cfg.prox)
}

/// Least-core solve with the payoffs reparameterized as `softmax(s)` and
/// the logits updated by Adam (β₁ = 0.9, β₂ = 0.999, stabilizer 1e-8).
pub fn adam_softmax_solve(game: &NormalizedGame, cfg: &SolverConfig) -> Result<LeastCoreResult> {
    saddle_solve(game, cfg, ProxKind::AdamSoftmax)
}

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
// logit steps beyond this make softmax saturate and stall recovery
const LOGIT_STEP_CAP: f64 = 2.0;

struct AdamMoments {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamMoments {
    fn new(n: usize) -> Self {
        AdamMoments {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    /// One Adam step on the logits. `commit` advances the stored moments;
    /// probe steps preview with tentative moments instead.
    fn step(&mut self, logits: &[f64], grad: &[f64], eta: f64, commit: bool) -> Vec<f64> {
        let t = self.t + 1;
        let bc1 = 1.0 - ADAM_BETA1.powi(t as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(t as i32);
        let mut out = Vec::with_capacity(logits.len());
        for i in 0..logits.len() {
            let m = ADAM_BETA1 * self.m[i] + (1.0 - ADAM_BETA1) * grad[i];
            let v = ADAM_BETA2 * self.v[i] + (1.0 - ADAM_BETA2) * grad[i] * grad[i];
            let step = eta * (m / bc1) / ((v / bc2).sqrt() + ADAM_EPS);
            out.push(logits[i] - step.clamp(-LOGIT_STEP_CAP, LOGIT_STEP_CAP));
            if commit {
                self.m[i] = m;
                self.v[i] = v;
            }
        }
        if commit {
            self.t = t;
        }
        out
    }
}

/// Pushes the payoff-space direction through the softmax Jacobian:
/// `g_s = p ⊙ g_p − (pᵀ g_p)·p`.
fn softmax_jacobian(p: &[f64], g_p: &[f64]) -> Vec<f64> {
    let dot: f64 = p.iter().zip(g_p).map(|(a, b)| a * b).sum();
    p.iter().zip(g_p).map(|(&pi, &gi)| pi * (gi - dot)).collect()
}

/// Annealed trust region for the ε step at iteration `t`.
fn epsilon_cap(eta: f64, t: usize) -> f64 {
    eta * (2.0 / (t as f64).sqrt()).max(0.02)
}

struct PrimalIterate {
    logits: Vec<f64>,
    state: SaddleState,
}

fn saddle_solve(
    game: &NormalizedGame,
    cfg: &SolverConfig,
    prox: ProxKind,
) -> Result<LeastCoreResult> {
    let start = Instant::now();
    let calls_before = game.calls();
    let n = game.player_count();

    // batch setup; full enumeration evaluates every value exactly once
    let full: Option<(Vec<Coalition>, Vec<f64>)> = match cfg.batch {
        BatchMode::FullEnumeration => {
            let coalitions: Vec<Coalition> = crate::game::enumerate_coalitions(n)?.collect();
            let values: Vec<f64> = coalitions.iter().map(|c| game.value(c)).collect();
            Some((coalitions, values))
        }
        BatchMode::Sampled(_) => None,
    };
    let batch_size = match cfg.batch {
        BatchMode::Sampled(b) => b,
        BatchMode::FullEnumeration => full.as_ref().map(|(c, _)| c.len()).unwrap_or(1),
    };

    let known_max = full
        .as_ref()
        .map(|(_, values)| values.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
    let (epsilon_lo, epsilon_hi) = resolve_epsilon_bounds(cfg, game, known_max);
    let mu_upper = cfg
        .mu_upper
        .unwrap_or(batch_size as f64 * n as f64 / cfg.gamma);
    let mu_init = cfg.mu_init.unwrap_or(mu_upper).min(mu_upper);
    let bounds = SaddleBounds {
        epsilon_lo,
        epsilon_hi,
        mu_upper,
    };

    let mut rng_batch = stream_rng(cfg.seed, STREAM_BATCH);
    let mut current = PrimalIterate {
        logits: vec![0.0; n],
        state: SaddleState {
            payoffs: Imputation::uniform(n),
            epsilon: epsilon_hi,
            mu: mu_init,
        },
    };
    let mut adam = AdamMoments::new(n);

    let mut averaged = vec![0.0; n];
    let mut weight_sum = 0.0;
    let mut trace = Vec::new();
    let mut iterations_run = 0;

    let eval = |state: &SaddleState,
                rng: &mut rand_chacha::ChaCha8Rng|
     -> MapEstimate {
        match &full {
            Some((coalitions, values)) => {
                f_map_with_values(state, coalitions, values, cfg.gamma)
            }
            None => {
                let batch = sample_coalitions(n, batch_size, rng);
                let values: Vec<f64> = batch.iter().map(|c| game.value(c)).collect();
                f_map_with_values(state, &batch, &values, cfg.gamma)
            }
        }
    };

    for t in 1..=cfg.iterations {
        if let Some(limit) = cfg.time_limit {
            if start.elapsed() >= limit {
                break;
            }
        }
        if let Some(budget) = cfg.call_budget {
            let per_iter = if full.is_some() { 0 } else { 2 * batch_size as u64 };
            if game.calls() - calls_before + per_iter > budget {
                break;
            }
        }
        let eta = cfg.schedule.eta(t);
        let cap = epsilon_cap(eta, t);

        let g_here = eval(&current.state, &mut rng_batch);
        let probe = prox_step(&current, &g_here, eta, cap, &bounds, prox, &mut adam, false);
        let g_probe = eval(&probe.state, &mut rng_batch);
        current = prox_step(&current, &g_probe, eta, cap, &bounds, prox, &mut adam, true);
        iterations_run = t;

        weight_sum += eta;
        for (a, &p) in averaged.iter_mut().zip(current.state.payoffs.as_slice()) {
            *a += eta * p;
        }
        if let Some(every) = cfg.trace_every {
            if t % every == 0 {
                trace.push(TracePoint {
                    iteration: t,
                    epsilon: current.state.epsilon,
                    mu: current.state.mu,
                    eta,
                });
            }
        }
    }

    let payoffs = if weight_sum > 0.0 {
        let total: f64 = averaged.iter().sum();
        Imputation::new_unchecked(averaged.iter().map(|a| a / total).collect())
    } else {
        current.state.payoffs.clone()
    };

    let epsilon_hat = heldout_estimate(&payoffs, game, cfg);
    Ok(LeastCoreResult {
        payoffs,
        epsilon_final: current.state.epsilon,
        epsilon_hat,
        trace,
        oracle_calls: game.calls() - calls_before,
        seed: cfg.seed,
        wall_secs: start.elapsed().as_secs_f64(),
        iterations_run,
        note: None,
    })
}

#[allow(clippy::too_many_arguments)]
fn prox_step(
    from: &PrimalIterate,
    g: &MapEstimate,
    eta: f64,
    epsilon_step_cap: f64,
    bounds: &SaddleBounds,
    prox: ProxKind,
    adam: &mut AdamMoments,
    commit: bool,
) -> PrimalIterate {
    let epsilon_step = (eta * g.g_epsilon).clamp(-epsilon_step_cap, epsilon_step_cap);
    let epsilon = (from.state.epsilon - epsilon_step).clamp(bounds.epsilon_lo, bounds.epsilon_hi);
    let mu = (from.state.mu - eta * g.g_mu).clamp(0.0, bounds.mu_upper);
    let (logits, payoffs) = match prox {
        ProxKind::Tailored => {
            let logits: Vec<f64> = from
                .state
                .payoffs
                .as_slice()
                .iter()
                .zip(&g.g_payoffs)
                .map(|(&p, &gp)| {
                    p.max(1e-300).ln() - (eta * gp).clamp(-LOGIT_STEP_CAP, LOGIT_STEP_CAP)
                })
                .collect();
            let payoffs = softmax(&logits);
            (logits, payoffs)
        }
        ProxKind::AdamSoftmax => {
            let g_s = softmax_jacobian(from.state.payoffs.as_slice(), &g.g_payoffs);
            let logits = adam.step(&from.logits, &g_s, eta, commit);
            let payoffs = softmax(&logits);
            (logits, payoffs)
        }
    };
    PrimalIterate {
        logits,
        state: SaddleState {
            payoffs: Imputation::new_unchecked(payoffs),
            epsilon,
            mu,
        },
    }
}
