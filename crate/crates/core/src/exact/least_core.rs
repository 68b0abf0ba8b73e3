//! Exact and sampled-constraint least-core linear programs.

use rand::Rng;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{enumerate_coalitions, sample_coalitions, NormalizedGame};
use crate::imputation::Imputation;

use super::simplex::{simplex_solve, DenseLP, LPStatus, Sense};

/// Exact enumeration cap for the full least-core LP.
pub const MAX_EXACT_LP_PLAYERS: usize = 16;

/// Builds and solves `min ε` subject to `p(C) + ε >= v(C)` for the given
/// coalitions plus `Σp = 1`, `p, ε >= 0`.
fn solve_rows(
    game: &NormalizedGame,
    coalitions: impl Iterator<Item = Coalition>,
) -> Result<(f64, Imputation)> {
    let n = game.player_count();
    // variables p_0..p_{n-1}, eps
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = DenseLP::new(objective);
    for c in coalitions {
        let mut row = vec![0.0; n + 1];
        for i in c.members() {
            row[i] = 1.0;
        }
        row[n] = 1.0;
        lp.push_row(row, Sense::Geq, game.value(&c));
    }
    let mut simplex_row = vec![1.0; n + 1];
    simplex_row[n] = 0.0;
    lp.push_row(simplex_row, Sense::Eq, 1.0);

    let sol = simplex_solve(&lp)?;
    match sol.status {
        LPStatus::Optimal => {}
        other => {
            return Err(Error::NumericalBreakdown(format!(
                "least-core LP ended {other:?}; it should always be feasible and bounded"
            )))
        }
    }
    let epsilon = sol.x[n];
    // clean tiny LP residuals so the witness is a valid imputation
    let mut p: Vec<f64> = sol.x[..n].iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = p.iter().sum();
    for v in &mut p {
        *v /= total;
    }
    Ok((epsilon, Imputation::new_unchecked(p)))
}

/// The exact least-core value and a witness imputation, from the LP over
/// all `2^n − 1` coalition constraints (`n <= 16`).
pub fn least_core_exact(game: &NormalizedGame) -> Result<(f64, Imputation)> {
    let n = game.player_count();
    if n > MAX_EXACT_LP_PLAYERS {
        return Err(Error::TooManyPlayers {
            n,
            max: MAX_EXACT_LP_PLAYERS,
        });
    }
    solve_rows(game, enumerate_coalitions(n)?)
}

/// Least-core LP restricted to `k` sampled coalition rows plus the grand
/// coalition. A relaxation, so the value never exceeds the exact one.
pub fn sampled_lp_least_core(
    game: &NormalizedGame,
    k: usize,
    rng: &mut impl Rng,
) -> Result<(f64, Imputation)> {
    assert!(k >= 1);
    let n = game.player_count();
    let sample = sample_coalitions(n, k, rng);
    solve_rows(
        game,
        sample.into_iter().chain(std::iter::once(Coalition::grand(n))),
    )
}
