//! Media-wide collective slant: DerSimonian-Laird random-effects pooling of
//! per-outlet scores, with a normal-approximation confidence interval.

use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::measures::SlantScore;

/// Normal-approximation multiplier for the 95% confidence interval.
pub const CI_MULTIPLIER: f64 = 1.96;

/// A pooled, media-wide slant estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectiveSlant {
    /// Random-effects pooled mean.
    pub theta: f64,
    /// Variance of the pooled mean (1 / sum of random-effect weights).
    pub variance: f64,
    /// Between-outlet variance, truncated at zero.
    pub tau2: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_outlets: usize,
}

/// DerSimonian-Laird random-effects pooling.
///
/// Fixed-effect weights `w_i = 1/v_i` give the heterogeneity statistic
/// `Q = sum w_i (theta_i - theta_FE)^2`; the between-outlet variance is
/// `tau2 = max(0, (Q - (n-1)) / (sum w - sum w^2 / sum w))`; random-effect
/// weights `w*_i = 1/(v_i + tau2)` then give the pooled mean and its
/// variance `1 / sum w*`.
pub fn pool(scores: &[SlantScore]) -> Result<CollectiveSlant, Error> {
    let pairs: Vec<(f64, f64)> = scores.iter().map(|s| (s.theta, s.variance)).collect();
    pool_estimates(&pairs)
}

/// [`pool`] over bare (theta, variance) pairs.
pub fn pool_estimates(pairs: &[(f64, f64)]) -> Result<CollectiveSlant, Error> {
    let n = pairs.len();
    if n < 2 {
        return Err(Error::TooFewScores { got: n });
    }
    for &(theta, v) in pairs {
        if !theta.is_finite() {
            return Err(Error::NonFiniteScore { value: theta });
        }
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidVariance { value: v });
        }
    }

    let w: Vec<f64> = pairs.iter().map(|&(_, v)| 1.0 / v).collect();
    let w_sum: f64 = w.iter().sum();
    let fixed_mean = pairs
        .iter()
        .zip(&w)
        .map(|(&(t, _), &wi)| wi * t)
        .sum::<f64>()
        / w_sum;
    let q: f64 = pairs
        .iter()
        .zip(&w)
        .map(|(&(t, _), &wi)| wi * (t - fixed_mean) * (t - fixed_mean))
        .sum();
    let w2_sum: f64 = w.iter().map(|&wi| wi * wi).sum();
    let denom = w_sum - w2_sum / w_sum;
    if !(denom.is_finite() && denom > 0.0) {
        return Err(Error::DegenerateHeterogeneity);
    }
    let tau2 = ((q - (n as f64 - 1.0)) / denom).max(0.0);

    let w_star: Vec<f64> = pairs.iter().map(|&(_, v)| 1.0 / (v + tau2)).collect();
    let w_star_sum: f64 = w_star.iter().sum();
    let theta = pairs
        .iter()
        .zip(&w_star)
        .map(|(&(t, _), &wi)| wi * t)
        .sum::<f64>()
        / w_star_sum;
    let variance = 1.0 / w_star_sum;
    let half_width = CI_MULTIPLIER * math::sqrt(variance);
    Ok(CollectiveSlant {
        theta,
        variance,
        tau2,
        ci_low: theta - half_width,
        ci_high: theta + half_width,
        n_outlets: n,
    })
}
