//! Payoff vectors on the probability simplex.

use crate::coalition::Coalition;
use crate::error::{Error, Result};

/// How far Σp may stray from 1 before a vector is rejected.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// A nonnegative payoff vector with Σp = 1 (the game is normalized so that
/// the grand coalition is worth exactly 1).
#[derive(Clone, Debug, PartialEq)]
pub struct Imputation(Vec<f64>);

impl Imputation {
    /// Validates and wraps a payoff vector.
    pub fn new(payoffs: Vec<f64>) -> Result<Self> {
        if payoffs.is_empty() || payoffs.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        if let Some(bad) = payoffs.iter().find(|&&x| x < 0.0) {
            return Err(Error::OffSimplex(format!("negative payoff {bad}")));
        }
        let sum: f64 = payoffs.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::OffSimplex(format!("sums to {sum}")));
        }
        Ok(Imputation(payoffs))
    }

    /// The uniform imputation `1/n`.
    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Imputation(vec![1.0 / n as f64; n])
    }

    /// Wraps a vector that is already known to lie on the simplex
    /// (projection and softmax outputs). Debug builds still validate.
    pub(crate) fn new_unchecked(payoffs: Vec<f64>) -> Self {
        debug_assert!(
            payoffs.iter().all(|&x| x >= 0.0 && x.is_finite())
                && (payoffs.iter().sum::<f64>() - 1.0).abs() <= 1e-6,
            "vector off the simplex: sum={}",
            payoffs.iter().sum::<f64>()
        );
        Imputation(payoffs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// The coalition payoff `p(C)`.
    pub fn payoff(&self, coalition: &Coalition) -> f64 {
        coalition.payoff(&self.0)
    }
}

impl std::ops::Index<usize> for Imputation {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl AsRef<[f64]> for Imputation {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}
