//! Dense table-backed games for fixtures, oracles and fast small-game
//! solving.

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::{Game, MAX_ENUMERATION_PLAYERS};

/// A game over `n <= 20` players stored as a dense table of `2^n` values
/// indexed by membership bitmask. Entry 0 is always 0.
#[derive(Clone, Debug)]
pub struct TabularGame {
    n: usize,
    values: Vec<f64>,
}

impl TabularGame {
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self> {
        if n > MAX_ENUMERATION_PLAYERS {
            return Err(Error::TooManyPlayers {
                n,
                max: MAX_ENUMERATION_PLAYERS,
            });
        }
        assert_eq!(values.len(), 1usize << n);
        assert_eq!(values[0], 0.0, "v(∅) must be 0");
        Ok(TabularGame { n, values })
    }

    /// Fills the table from a closure over coalitions.
    pub fn from_fn(n: usize, f: impl Fn(&Coalition) -> f64) -> Self {
        assert!(n <= MAX_ENUMERATION_PLAYERS);
        let values = (0u64..(1 << n))
            .map(|mask| {
                if mask == 0 {
                    0.0
                } else {
                    f(&Coalition::from_bits(n, mask))
                }
            })
            .collect();
        TabularGame { n, values }
    }

    /// Materializes any small game (2^n value queries).
    pub fn from_game(game: &impl Game) -> Result<Self> {
        let n = game.player_count();
        if n > MAX_ENUMERATION_PLAYERS {
            return Err(Error::TooManyPlayers {
                n,
                max: MAX_ENUMERATION_PLAYERS,
            });
        }
        Ok(TabularGame::from_fn(n, |c| game.value(c)))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value lookup by bitmask.
    pub fn value_at(&self, mask: u64) -> f64 {
        self.values[mask as usize]
    }
}

impl Game for TabularGame {
    fn player_count(&self) -> usize {
        self.n
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        self.values[coalition.bits() as usize]
    }
}
