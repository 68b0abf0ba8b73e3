//! Exact Shapley values by subset enumeration.

use crate::error::{Error, Result};
use crate::game::Game;
use crate::games::TabularGame;

/// Exact enumeration cap for Shapley values (n·2^n work).
pub const MAX_EXACT_SHAPLEY_PLAYERS: usize = 12;

/// Exact Shapley values
/// `Φ_i = Σ_{C ⊆ I∖{i}} |C|!(n−1−|C|)!/n! · (v(C∪{i}) − v(C))`,
/// equal to the average marginal contribution over all player orderings.
pub fn shapley_exact(game: &impl Game) -> Result<Vec<f64>> {
    let n = game.player_count();
    if n > MAX_EXACT_SHAPLEY_PLAYERS {
        return Err(Error::TooManyPlayers {
            n,
            max: MAX_EXACT_SHAPLEY_PLAYERS,
        });
    }
    let table = TabularGame::from_game(game)?;
    let values = table.values();

    // weight by coalition size: |C|! (n-1-|C|)! / n!
    let mut factorial = vec![1.0f64; n + 1];
    for k in 1..=n {
        factorial[k] = factorial[k - 1] * k as f64;
    }
    let weight: Vec<f64> = (0..n)
        .map(|s| factorial[s] * factorial[n - 1 - s] / factorial[n])
        .collect();

    let mut phi = vec![0.0; n];
    for mask in 0u64..(1 << n) {
        let size = mask.count_ones() as usize;
        let v_base = values[mask as usize];
        for (i, phi_i) in phi.iter_mut().enumerate() {
            if mask >> i & 1 == 0 {
                let with = values[(mask | 1 << i) as usize];
                *phi_i += weight[size] * (with - v_base);
            }
        }
    }
    Ok(phi)
}
