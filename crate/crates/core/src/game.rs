//! Characteristic-function oracles, normalization, deficit/loss primitives,
//! coalition enumeration and sampling, and the sampled stability estimator.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rand::Rng;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::imputation::Imputation;

/// Cap on exact enumeration (2^20 coalitions).
pub const MAX_ENUMERATION_PLAYERS: usize = 20;

/// A transferable-utility game `v : 2^I -> R` with `v(∅) = 0`.
///
/// Implementations must be deterministic given their construction seed and
/// safe to query from several threads at once.
pub trait Game: Send + Sync {
    fn player_count(&self) -> usize;

    /// The value of a coalition. `v(∅)` must be exactly 0.
    fn value(&self, coalition: &Coalition) -> f64;
}

impl<G: Game + ?Sized> Game for &G {
    fn player_count(&self) -> usize {
        (**self).player_count()
    }
    fn value(&self, coalition: &Coalition) -> f64 {
        (**self).value(coalition)
    }
}

impl<G: Game + ?Sized> Game for Arc<G> {
    fn player_count(&self) -> usize {
        (**self).player_count()
    }
    fn value(&self, coalition: &Coalition) -> f64 {
        (**self).value(coalition)
    }
}

/// Wraps a game with an atomic call counter and a cached raw grand value.
///
/// All solvers and estimators query through an oracle, so call budgets
/// (e.g. Shapley vs least-core comparisons at a fixed budget) are enforced
/// at one place.
pub struct CharacteristicOracle {
    inner: Arc<dyn Game>,
    n: usize,
    calls: AtomicU64,
    grand_value: f64,
}

impl CharacteristicOracle {
    /// Wraps `game`, evaluating and caching the raw `v(I)` (counted as one
    /// call).
    pub fn new(game: impl Game + 'static) -> Self {
        Self::from_arc(Arc::new(game))
    }

    pub fn from_arc(game: Arc<dyn Game>) -> Self {
        let n = game.player_count();
        let grand_value = game.value(&Coalition::grand(n));
        CharacteristicOracle {
            inner: game,
            n,
            calls: AtomicU64::new(1),
            grand_value,
        }
    }

    pub fn player_count(&self) -> usize {
        self.n
    }

    /// Queries `v(C)`, incrementing the call counter by one.
    pub fn value(&self, coalition: &Coalition) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.value(coalition)
    }

    /// Total value queries so far (including the cached grand evaluation).
    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    /// Raw `v(I)` cached at construction.
    pub fn grand_value(&self) -> f64 {
        self.grand_value
    }
}

/// A game rescaled so the grand coalition is worth exactly 1.
pub struct NormalizedGame {
    oracle: CharacteristicOracle,
    scale: f64,
}

/// Rescales `v` by `1 / v(I)`.
///
/// Fails with [`Error::NonPositiveGrandValue`] when `v(I) <= 0`, where the
/// least-core normalization is undefined.
pub fn normalize(oracle: CharacteristicOracle) -> Result<NormalizedGame> {
    let grand = oracle.grand_value();
    if !(grand > 0.0) {
        return Err(Error::NonPositiveGrandValue(grand));
    }
    Ok(NormalizedGame {
        scale: 1.0 / grand,
        oracle,
    })
}

impl NormalizedGame {
    pub fn player_count(&self) -> usize {
        self.oracle.player_count()
    }

    /// Normalized value `v(C) / v(I)`; the grand coalition returns exactly 1.
    pub fn value(&self, coalition: &Coalition) -> f64 {
        self.oracle.value(coalition) * self.scale
    }

    pub fn calls(&self) -> u64 {
        self.oracle.calls()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn oracle(&self) -> &CharacteristicOracle {
        &self.oracle
    }
}

impl Game for NormalizedGame {
    fn player_count(&self) -> usize {
        self.player_count()
    }
    fn value(&self, coalition: &Coalition) -> f64 {
        NormalizedGame::value(self, coalition)
    }
}

/// Deficit `d_C = max(0, v(C) − ε − p(C))` of a coalition at slack `ε`.
pub fn deficit(p: &Imputation, coalition: &Coalition, epsilon: f64, game: &NormalizedGame) -> f64 {
    deficit_with_value(p, coalition, epsilon, game.value(coalition))
}

/// Deficit with `v(C)` already evaluated (no oracle call).
pub fn deficit_with_value(p: &Imputation, coalition: &Coalition, epsilon: f64, value: f64) -> f64 {
    debug_assert_eq!(p.len(), coalition.player_count());
    (value - epsilon - p.payoff(coalition)).max(0.0)
}

/// Squared-hinge coalition loss `ℓ_C = d_C² / (2|C|)`.
///
/// Zero exactly when the ε-core constraint for `C` holds.
pub fn coalition_loss(
    p: &Imputation,
    coalition: &Coalition,
    epsilon: f64,
    game: &NormalizedGame,
) -> Result<f64> {
    if coalition.is_empty() {
        return Err(Error::EmptyCoalition);
    }
    let d = deficit(p, coalition, epsilon, game);
    Ok(d * d / (2.0 * coalition.size() as f64))
}

/// Result of the sampled max-excess estimator.
#[derive(Clone, Debug)]
pub struct SampleEstimate {
    /// `max_{C in sample} v(C) − p(C)`.
    pub epsilon_hat: f64,
    pub sample_size: usize,
    /// First coalition attaining the maximum, in sample order.
    pub argmax: Coalition,
}

/// Estimates the stability of `p` as the maximum excess over a coalition
/// sample; the sampled proxy for the least-core value at scale.
pub fn epsilon_hat(
    p: &Imputation,
    sample: &[Coalition],
    game: &NormalizedGame,
) -> Result<SampleEstimate> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut best = f64::NEG_INFINITY;
    let mut argmax = 0usize;
    for (i, c) in sample.iter().enumerate() {
        let excess = game.value(c) - p.payoff(c);
        if excess > best {
            best = excess;
            argmax = i;
        }
    }
    Ok(SampleEstimate {
        epsilon_hat: best,
        sample_size: sample.len(),
        argmax: sample[argmax].clone(),
    })
}

/// Yields all `2^n − 1` nonempty coalitions in lexicographic bitmask order.
pub fn enumerate_coalitions(n: usize) -> Result<impl Iterator<Item = Coalition>> {
    if n > MAX_ENUMERATION_PLAYERS {
        return Err(Error::TooManyPlayers {
            n,
            max: MAX_ENUMERATION_PLAYERS,
        });
    }
    Ok((1u64..(1u64 << n)).map(move |mask| Coalition::from_bits(n, mask)))
}

/// Draws one nonempty coalition: every player included independently with
/// probability 1/2, empty draws redrawn.
pub fn sample_coalition(n: usize, rng: &mut impl Rng) -> Coalition {
    loop {
        let mut c = Coalition::empty(n);
        for i in 0..n {
            if rng.gen::<bool>() {
                c.insert(i);
            }
        }
        if !c.is_empty() {
            return c;
        }
    }
}

/// Draws a batch of `batch_size` coalitions (see [`sample_coalition`]).
pub fn sample_coalitions(n: usize, batch_size: usize, rng: &mut impl Rng) -> Vec<Coalition> {
    assert!(batch_size >= 1);
    (0..batch_size).map(|_| sample_coalition(n, rng)).collect()
}
