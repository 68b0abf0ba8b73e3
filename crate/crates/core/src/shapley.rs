//! Monte-Carlo Shapley estimation under a characteristic-function call
//! budget.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::CharacteristicOracle;

/// Monte-Carlo Shapley estimate.
#[derive(Clone, Debug)]
pub struct ShapleyEstimate {
    pub values: Vec<f64>,
    pub permutations: usize,
    pub oracle_calls: u64,
    pub seed: u64,
}

/// Marginal contributions along one permutation:
/// `m_i = v(prefix ∪ {i}) − v(prefix)`.
///
/// Prefix values are reused, so a full traversal costs exactly `n` oracle
/// calls and the marginals telescope to `v(I) − v(∅)`.
pub fn permutation_marginals(
    game: &CharacteristicOracle,
    permutation: &[usize],
) -> Result<Vec<f64>> {
    let n = game.player_count();
    if permutation.len() != n {
        return Err(Error::InvalidPermutation(n));
    }
    let mut seen = vec![false; n];
    for &i in permutation {
        if i >= n || seen[i] {
            return Err(Error::InvalidPermutation(n));
        }
        seen[i] = true;
    }
    let mut marginals = vec![0.0; n];
    let mut prefix = Coalition::empty(n);
    let mut previous = 0.0; // v(∅) pinned at zero by convention
    for &i in permutation {
        prefix.insert(i);
        let value = game.value(&prefix);
        marginals[i] = value - previous;
        previous = value;
    }
    Ok(marginals)
}

/// Samples uniform permutations until the next full traversal would exceed
/// `budget` oracle calls and averages the per-permutation marginals.
///
/// Permutations are drawn from per-index derived seeds and evaluated in
/// parallel; the reduction runs in index order, so results are
/// deterministic for a fixed seed.
pub fn shapley_mc(
    game: &CharacteristicOracle,
    budget: u64,
    seed: u64,
) -> Result<ShapleyEstimate> {
    let n = game.player_count();
    let needed = n as u64 + 1;
    if budget < needed {
        return Err(Error::BudgetTooSmall { budget, needed });
    }
    let calls_before = game.calls();
    let permutations = (budget / n as u64) as usize;

    let per_perm: Vec<Vec<f64>> = (0..permutations)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(crate::derive_seed(seed, k as u64));
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            permutation_marginals(game, &order).expect("order is a permutation")
        })
        .collect();

    let mut values = vec![0.0; n];
    for marginals in &per_perm {
        for (acc, m) in values.iter_mut().zip(marginals) {
            *acc += m;
        }
    }
    for v in &mut values {
        *v /= permutations as f64;
    }
    Ok(ShapleyEstimate {
        values,
        permutations,
        oracle_calls: game.calls() - calls_before,
        seed,
    })
}
