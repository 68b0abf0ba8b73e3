//! Small self-contained numeric kernels: error function, normal quantile,
//! stable softmax.

/// Error function, accurate to ~1e-13 over the real line.
///
/// Taylor series for |x| <= 2, Lentz continued fraction for erfc beyond.
pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        return -erf(-x);
    }
    if x <= 2.0 {
        // erf(x) = 2/sqrt(pi) * sum (-1)^k x^(2k+1) / (k! (2k+1))
        let mut term = x;
        let mut sum = x;
        let x2 = x * x;
        for k in 1..200 {
            term *= -x2 / k as f64;
            let add = term / (2 * k + 1) as f64;
            sum += add;
            if add.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum * std::f64::consts::FRAC_2_SQRT_PI
    } else {
        1.0 - erfc_cf(x)
    }
}

/// Complementary error function for x > 0 via a continued fraction.
fn erfc_cf(x: f64) -> f64 {
    // erfc(x) = exp(-x^2)/(x sqrt(pi)) * 1/(1 + 1/(2x^2 + 2/(1 + 3/(2x^2 + ...))))
    // evaluated with the modified Lentz algorithm.
    let tiny = 1e-300;
    let x2 = 2.0 * x * x;
    let mut f = tiny;
    let mut c = f;
    let mut d = 0.0;
    let mut k = 0u32;
    loop {
        // coefficients a_1 = 1; a_{2j} = (2j-1)/x2-ish pattern below
        let (a, b) = if k == 0 {
            (1.0, x2 + 1.0)
        } else {
            (-(2 * k) as f64 * ((2 * k) as f64 - 1.0), x2 + 4.0 * k as f64 + 1.0)
        };
        d = b + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        k += 1;
        if (delta - 1.0).abs() < 1e-16 || k > 300 {
            break;
        }
    }
    2.0 * x * (-x * x).exp() / std::f64::consts::PI.sqrt() * f
}

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + erf(z / std::f64::consts::SQRT_2))
}

/// Standard normal quantile by bisection on the CDF.
///
/// `p` must lie strictly inside (0, 1).
pub fn normal_quantile(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1), got {p}");
    let (mut lo, mut hi) = (-12.0f64, 12.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Numerically stable softmax (max subtraction).
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Logistic sigmoid.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn erf_reference_values() {
        // frozen from high-precision tables
        assert!((erf(0.5) - 0.5204998778130465).abs() < 1e-12);
        assert!((erf(1.0) - 0.8427007929497149).abs() < 1e-12);
        assert!((erf(2.5) - 0.999593047982555).abs() < 1e-12);
        assert!((erf(-1.0) + 0.8427007929497149).abs() < 1e-12);
    }

    #[test]
    fn quantile_matches_known_points() {
        assert!(normal_quantile(0.5).abs() < 1e-10);
        // z such that Phi(z) = 0.6
        assert!((normal_quantile(0.6) - 0.2533471031357997).abs() < 1e-9);
        assert!((normal_quantile(0.975) - 1.959963984540054).abs() < 1e-8);
    }

    #[test]
    fn quantile_inverts_cdf() {
        for &p in &[0.01, 0.1, 0.3, 0.6, 0.9, 0.999] {
            assert!((normal_cdf(normal_quantile(p)) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn softmax_sums_to_one_and_orders() {
        let p = softmax(&[1.0, 2.0, 3.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(p[0] < p[1] && p[1] < p[2]);
        // extreme logits stay finite
        let q = softmax(&[-1e4, 0.0, 1e4]);
        assert!((q[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sigmoid_symmetry() {
        assert!((sigmoid(1.0) + sigmoid(-1.0) - 1.0).abs() < 1e-15);
        assert!((sigmoid(0.0) - 0.5).abs() < 1e-15);
    }
}
