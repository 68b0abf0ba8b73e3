//! Marginal contribution networks.

use rand::Rng;

use crate::coalition::Coalition;
use crate::error::{Error, Result};
use crate::game::Game;

use super::WeightDistribution;

const RESAMPLE_LIMIT: u64 = 1_000_000;

/// A rule `(P, N, w)`: pays `w` to any coalition containing all of `P` and
/// none of `N`.
#[derive(Clone, Debug)]
pub struct Rule {
    pub positive: Coalition,
    pub negative: Coalition,
    pub weight: f64,
}

impl Rule {
    pub fn applies_to(&self, coalition: &Coalition) -> bool {
        self.positive.is_subset_of(coalition) && !self.negative.intersects(coalition)
    }
}

/// A marginal contribution network over `n` players.
///
/// Rules with `P = ∅` apply to the empty coalition, so the raw rule sum at
/// `∅` is stored once and subtracted from every value, restoring `v(∅) = 0`
/// while preserving all relative excesses.
#[derive(Clone, Debug)]
pub struct MarginalContributionNetwork {
    n: usize,
    rules: Vec<Rule>,
    empty_offset: f64,
}

impl MarginalContributionNetwork {
    /// Panics if a rule's positive and negative parts overlap.
    pub fn new(n: usize, rules: Vec<Rule>) -> Self {
        for r in &rules {
            assert!(
                !r.positive.intersects(&r.negative),
                "rule has a player in both P and N"
            );
        }
        let empty_offset = rules
            .iter()
            .filter(|r| r.positive.is_empty())
            .map(|r| r.weight)
            .sum();
        MarginalContributionNetwork {
            n,
            rules,
            empty_offset,
        }
    }

    /// Generates `k` rules; each player enters `P` with probability `p` and
    /// `N` with probability `q`, and a rule drawing a player into both is
    /// discarded and resampled whole.
    pub fn generate(
        n: usize,
        k: usize,
        p: f64,
        q: f64,
        weights: WeightDistribution,
        rng: &mut impl Rng,
    ) -> Result<Self> {
        assert!(k >= 1);
        assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&q));
        weights.validate()?;
        let mut rules = Vec::with_capacity(k);
        let mut discards = 0u64;
        while rules.len() < k {
            let mut positive = Coalition::empty(n);
            let mut negative = Coalition::empty(n);
            let mut overlap = false;
            for i in 0..n {
                let in_p = rng.gen::<f64>() < p;
                let in_q = rng.gen::<f64>() < q;
                if in_p && in_q {
                    overlap = true;
                }
                if in_p {
                    positive.insert(i);
                }
                if in_q {
                    negative.insert(i);
                }
            }
            if overlap {
                discards += 1;
                if discards >= RESAMPLE_LIMIT {
                    return Err(Error::ResampleLimitExceeded(RESAMPLE_LIMIT));
                }
                continue;
            }
            discards = 0;
            rules.push(Rule {
                positive,
                negative,
                weight: weights.sample(rng),
            });
        }
        Ok(MarginalContributionNetwork::new(n, rules))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }
}

impl Game for MarginalContributionNetwork {
    fn player_count(&self) -> usize {
        self.n
    }

    fn value(&self, coalition: &Coalition) -> f64 {
        let raw: f64 = self
            .rules
            .iter()
            .filter(|r| r.applies_to(coalition))
            .map(|r| r.weight)
            .sum();
        if coalition.is_empty() {
            0.0
        } else {
            raw - self.empty_offset
        }
    }
}
