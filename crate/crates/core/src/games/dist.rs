//! Weight distributions for game generators.

use rand::Rng;
use rand_distr::{Beta, Distribution, Exp, Normal};

use crate::error::{Error, Result};

/// Distribution of player/edge/rule weights, with an analytic mean.
///
/// Draws are clamped to be strictly positive: nonpositive samples are
/// redrawn (weights are conventionally positive; a Gaussian at μ=1, σ=0.3
/// truncates ~4e-4 of its mass).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightDistribution {
    /// Uniform over the integers `lo..=hi`.
    UniformInt { lo: u32, hi: u32 },
    Gaussian { mu: f64, sigma: f64 },
    Exponential { lambda: f64 },
    Beta { alpha: f64, beta: f64 },
}

impl WeightDistribution {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDistributionParams(msg));
        match *self {
            WeightDistribution::UniformInt { lo, hi } => {
                if lo == 0 || hi < lo {
                    return bad(format!("uniform-int needs 1 <= lo <= hi, got {lo}..={hi}"));
                }
            }
            WeightDistribution::Gaussian { sigma, .. } => {
                if !(sigma > 0.0) {
                    return bad(format!("gaussian sigma must be > 0, got {sigma}"));
                }
            }
            WeightDistribution::Exponential { lambda } => {
                if !(lambda > 0.0) {
                    return bad(format!("exponential lambda must be > 0, got {lambda}"));
                }
            }
            WeightDistribution::Beta { alpha, beta } => {
                if !(alpha > 0.0) || !(beta > 0.0) {
                    return bad(format!("beta needs alpha, beta > 0, got ({alpha}, {beta})"));
                }
            }
        }
        Ok(())
    }

    /// Analytic mean of the (unclamped) distribution.
    pub fn mean(&self) -> f64 {
        match *self {
            WeightDistribution::UniformInt { lo, hi } => (lo as f64 + hi as f64) / 2.0,
            WeightDistribution::Gaussian { mu, .. } => mu,
            WeightDistribution::Exponential { lambda } => 1.0 / lambda,
            WeightDistribution::Beta { alpha, beta } => alpha / (alpha + beta),
        }
    }

    /// One strictly positive draw.
    pub fn sample(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            WeightDistribution::UniformInt { lo, hi } => rng.gen_range(lo..=hi) as f64,
            WeightDistribution::Gaussian { mu, sigma } => {
                let normal = Normal::new(mu, sigma).expect("validated");
                loop {
                    let w = normal.sample(rng);
                    if w > 0.0 {
                        return w;
                    }
                }
            }
            WeightDistribution::Exponential { lambda } => {
                let exp = Exp::new(lambda).expect("validated");
                loop {
                    let w = exp.sample(rng);
                    if w > 0.0 {
                        return w;
                    }
                }
            }
            WeightDistribution::Beta { alpha, beta } => {
                let b = Beta::new(alpha, beta).expect("validated");
                loop {
                    let w = b.sample(rng);
                    if w > 0.0 {
                        return w;
                    }
                }
            }
        }
    }
}
