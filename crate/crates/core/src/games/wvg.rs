//! Weighted voting games.

use rand::Rng;

use crate::coalition::Coalition;
use crate::error::Result;
use crate::game::Game;

use super::WeightDistribution;

/// A weighted voting game: a coalition wins (value 1) iff its total weight
/// meets the quota.
#[derive(Clone, Debug)]
pub struct WeightedVotingGame {
    weights: Vec<f64>,
    quota: f64,
}

impl WeightedVotingGame {
    /// Panics if a weight is nonpositive or the quota is nonpositive
    /// (`q > 0` keeps `v(∅) = 0`).
    pub fn new(weights: Vec<f64>, quota: f64) -> Self {
        assert!(!weights.is_empty());
        assert!(weights.iter().all(|&w| w > 0.0), "weights must be positive");
        assert!(quota > 0.0, "quota must be positive");
        WeightedVotingGame { weights, quota }
    }

    /// Draws i.i.d. weights from `dist` and sets the quota to
    /// `q = ξ · n · E[w]` with the distribution's analytic mean.
    pub fn generate(
        n: usize,
        dist: WeightDistribution,
        xi: f64,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        assert!(n >= 1);
        assert!(xi > 0.0 && xi <= 1.0, "proportional threshold must be in (0,1]");
        dist.validate()?;
        let weights: Vec<f64> = (0..n).map(|_| dist.sample(rng)).collect();
        let quota = xi * n as f64 * dist.mean();
        Ok(WeightedVotingGame { weights, quota })
    }

    /// All weights 1, quota `k`: the coalition wins iff it has >= k members.
    /// `k = 1` is the singleton-win game, `k = n` the unanimity game.
    pub fn threshold(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n);
        WeightedVotingGame::new(vec![1.0; n], k as f64 - 0.5)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn quota(&self) -> f64 {
        self.quota
    }
}

impl Game for WeightedVotingGame {
    fn player_count(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        if coalition.payoff(&self.weights) >= self.quota {
            1.0
        } else {
            0.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn threshold_indicator() {
        let g = WeightedVotingGame::new(vec![4.0, 3.0, 2.0], 5.0);
        assert_eq!(g.value(&Coalition::from_members(3, &[0, 1])), 1.0);
        assert_eq!(g.value(&Coalition::from_members(3, &[2])), 0.0);
        assert_eq!(g.value(&Coalition::empty(3)), 0.0);
    }

    #[test]
    fn tiny_quota_makes_every_singleton_win() {
        let g = WeightedVotingGame::new(vec![1.0, 2.0, 3.0], 0.1);
        for i in 0..3 {
            assert_eq!(g.value(&Coalition::from_members(3, &[i])), 1.0);
        }
    }

    #[test]
    fn generated_quota_uses_analytic_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let g = WeightedVotingGame::generate(
            100,
            WeightDistribution::UniformInt { lo: 1, hi: 100 },
            0.5,
            &mut rng,
        )
        .unwrap();
        assert_eq!(g.quota(), 2525.0);

        let g = WeightedVotingGame::generate(
            15,
            WeightDistribution::Gaussian { mu: 1.0, sigma: 0.01 },
            0.5,
            &mut rng,
        )
        .unwrap();
        assert!((g.quota() - 7.5).abs() < 1e-12);

        let g = WeightedVotingGame::generate(
            15,
            WeightDistribution::Beta { alpha: 2.0, beta: 2.0 },
            0.25,
            &mut rng,
        )
        .unwrap();
        assert!((g.quota() - 1.875).abs() < 1e-12);
    }

    #[test]
    fn monotone_in_supersets() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = WeightedVotingGame::generate(
            8,
            WeightDistribution::UniformInt { lo: 1, hi: 10 },
            0.6,
            &mut rng,
        )
        .unwrap();
        for mask in 1u64..(1 << 8) {
            let c = Coalition::from_bits(8, mask);
            for add in 0..8 {
                if !c.contains(add) {
                    let mut bigger = c.clone();
                    bigger.insert(add);
                    assert!(g.value(&c) <= g.value(&bigger));
                }
            }
        }
    }
}
