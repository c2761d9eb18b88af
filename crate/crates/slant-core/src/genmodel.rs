//! The one-parameter rich-get-richer reference process: simulation,
//! grid-search estimation of the mixing parameter q, comparison fits
//! (Poisson, log-normal), and tail-exponent estimation.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::math;
use crate::special;

/// Parameters of the reference-generation process.
///
/// Each of `total_references` steps attributes one reference: with
/// probability `q` to a legislator drawn proportionally to current counts,
/// otherwise to a uniformly random legislator. The asymptotic count tail is
/// a power law with exponent `1 + 1/q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Preferential-attachment probability, in [0, 1].
    pub q: f64,
    pub n_legislators: usize,
    /// Total references to generate (the process timespan).
    pub total_references: u64,
    pub seed: u64,
    /// Realizations per ensemble; realization i runs with seed `seed + i`.
    pub ensemble_size: usize,
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.q.is_finite() && (0.0..=1.0).contains(&self.q)) {
            return Err(Error::InvalidSimConfig {
                reason: alloc::format!("q = {} outside [0, 1]", self.q),
            });
        }
        if self.n_legislators == 0 {
            return Err(Error::InvalidSimConfig {
                reason: "need at least 1 legislator".into(),
            });
        }
        if self.n_legislators as u64 > u32::MAX as u64 {
            return Err(Error::InvalidSimConfig {
                reason: "more than 2^32 - 1 legislators".into(),
            });
        }
        if self.total_references == 0 {
            return Err(Error::InvalidSimConfig {
                reason: "need at least 1 reference".into(),
            });
        }
        if self.ensemble_size == 0 {
            return Err(Error::InvalidSimConfig {
                reason: "need at least 1 realization".into(),
            });
        }
        Ok(())
    }
}

/// One realization: per-legislator reference counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    pub counts: Vec<u64>,
}

/// Pooled per-legislator count distribution over an ensemble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsembleDistribution {
    /// count value n -> number of (legislator, realization) slots with n.
    pub histogram: BTreeMap<u64, u64>,
    pub realizations: usize,
    pub n_legislators: usize,
}

impl EnsembleDistribution {
    /// Probability that a legislator slot carries exactly n references.
    pub fn probability(&self, n: u64) -> f64 {
        let total = (self.realizations * self.n_legislators) as f64;
        self.histogram.get(&n).copied().unwrap_or(0) as f64 / total
    }
}

/// Runs realization `index` of the configured process.
///
/// Starts with a single reference to one uniformly chosen legislator, then
/// draws the remaining `total_references - 1` one at a time. Proportional
/// selection picks a uniform element of the reference log, which is
/// proportional-to-count by construction.
pub fn simulate_realization(config: &SimConfig, index: usize) -> Result<SimResult, Error> {
    config.validate()?;
    let v = config.n_legislators;
    let t = config.total_references;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(index as u64));
    let mut counts = alloc::vec![0u64; v];
    let mut log: Vec<u32> = Vec::with_capacity(t as usize);

    let first = rng.random_range(0..v);
    counts[first] += 1;
    log.push(first as u32);
    for _ in 1..t {
        let k = if rng.random_bool(config.q) {
            log[rng.random_range(0..log.len())] as usize
        } else {
            rng.random_range(0..v)
        };
        counts[k] += 1;
        log.push(k as u32);
    }
    Ok(SimResult { counts })
}

/// Runs realization 0 only.
pub fn simulate(config: &SimConfig) -> Result<SimResult, Error> {
    simulate_realization(config, 0)
}

/// Runs the whole ensemble and pools the per-legislator count histogram.
pub fn simulate_ensemble(config: &SimConfig) -> Result<EnsembleDistribution, Error> {
    config.validate()?;
    let mut histogram = BTreeMap::new();
    for i in 0..config.ensemble_size {
        let result = simulate_realization(config, i)?;
        for &c in &result.counts {
            *histogram.entry(c).or_insert(0u64) += 1;
        }
    }
    Ok(EnsembleDistribution {
        histogram,
        realizations: config.ensemble_size,
        n_legislators: config.n_legislators,
    })
}

fn histogram_of(samples: &[u64]) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for &s in samples {
        *h.entry(s).or_insert(0u64) += 1;
    }
    h
}

/// Two-sample Kolmogorov-Smirnov distance between count histograms:
/// sup over the merged support of |F_a - F_b| with right-continuous CDFs.
fn two_sample_ks(a: &BTreeMap<u64, u64>, b: &BTreeMap<u64, u64>) -> f64 {
    let total_a: u64 = a.values().sum();
    let total_b: u64 = b.values().sum();
    let mut iter_a = a.iter().peekable();
    let mut iter_b = b.iter().peekable();
    let (mut cum_a, mut cum_b) = (0u64, 0u64);
    let mut d: f64 = 0.0;
    loop {
        let next_key = match (iter_a.peek(), iter_b.peek()) {
            (Some(&(&ka, _)), Some(&(&kb, _))) => ka.min(kb),
            (Some(&(&ka, _)), None) => ka,
            (None, Some(&(&kb, _))) => kb,
            (None, None) => break,
        };
        if let Some(&(&k, &n)) = iter_a.peek() {
            if k == next_key {
                cum_a += n;
                iter_a.next();
            }
        }
        if let Some(&(&k, &n)) = iter_b.peek() {
            if k == next_key {
                cum_b += n;
                iter_b.next();
            }
        }
        let fa = cum_a as f64 / total_a as f64;
        let fb = cum_b as f64 / total_b as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

/// One-sample KS distance between a count histogram and a Poisson CDF,
/// evaluated where the supremum over all integers can occur: at each support
/// point and just below each support point.
fn poisson_ks(hist: &BTreeMap<u64, u64>, lambda: f64) -> f64 {
    let total: u64 = hist.values().sum();
    let mut d: f64 = 0.0;
    let mut cum = 0u64;
    let mut previous_f = 0.0f64; // empirical CDF before the current key
    for (&k, &n) in hist {
        let model = special::poisson_cdf(k, lambda);
        if k > 0 {
            // At k-1 the empirical CDF still holds its previous value.
            d = d.max((special::poisson_cdf(k - 1, lambda) - previous_f).abs());
        }
        cum += n;
        let f = cum as f64 / total as f64;
        d = d.max((model - f).abs());
        previous_f = f;
    }
    d
}

/// One-sample KS distance between positive samples and a log-normal CDF,
/// using both one-sided empirical limits at each sorted sample.
fn lognormal_ks(sorted_positive: &[u64], mu: f64, sigma: f64) -> f64 {
    if sigma == 0.0 {
        // All positive counts identical: the fit degenerates to a point mass
        // sitting exactly on the sample, which matches its ECDF everywhere.
        return 0.0;
    }
    let n = sorted_positive.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted_positive.iter().enumerate() {
        let model = special::lognormal_cdf(x as f64, mu, sigma);
        let lower = i as f64 / n;
        let upper = (i + 1) as f64 / n;
        d = d.max((model - lower).abs()).max((model - upper).abs());
    }
    d
}

/// Best-fit q with its distribution distance, plus comparison fits.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFit {
    pub q_hat: f64,
    /// KS distance between the data and the ensemble at `q_hat`.
    pub ks_model: f64,
    /// KS distance at every grid point, in the scanned (ascending-q) order.
    pub grid_ks: Vec<(f64, f64)>,
    /// Poisson maximum-likelihood rate (the sample mean).
    pub poisson_lambda: f64,
    pub poisson_ks: f64,
    /// Log-normal log-moment parameters fitted on counts >= 1.
    pub lognormal_mu: f64,
    pub lognormal_sigma: f64,
    pub lognormal_ks: f64,
}

/// Fits q by grid search: for each candidate, simulates an ensemble with the
/// empirical total reference count and takes the q minimizing the two-sample
/// KS distance between empirical and pooled simulated count distributions.
/// Ties break toward smaller q. Poisson and log-normal maximum-likelihood
/// fits are reported alongside for comparison.
pub fn fit_q(
    empirical: &[u64],
    n_legislators: usize,
    grid: &[f64],
    ensemble_size: usize,
    seed: u64,
) -> Result<ModelFit, Error> {
    let total: u64 = empirical.iter().sum();
    if total == 0 {
        return Err(Error::AllZeroCounts);
    }
    if grid.is_empty() {
        return Err(Error::InvalidGrid {
            reason: "empty grid".into(),
        });
    }
    for &q in grid {
        if !(q.is_finite() && (0.0..=1.0).contains(&q)) {
            return Err(Error::InvalidGrid {
                reason: alloc::format!("grid value {q} outside [0, 1]"),
            });
        }
    }
    let mut ascending: Vec<f64> = grid.to_vec();
    ascending.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ascending.dedup();

    let empirical_hist = histogram_of(empirical);
    let mut grid_ks = Vec::with_capacity(ascending.len());
    let (mut q_hat, mut ks_model) = (ascending[0], f64::INFINITY);
    for &q in &ascending {
        let ensemble = simulate_ensemble(&SimConfig {
            q,
            n_legislators,
            total_references: total,
            seed,
            ensemble_size,
        })?;
        let ks = two_sample_ks(&empirical_hist, &ensemble.histogram);
        grid_ks.push((q, ks));
        // Strict improvement only: ties keep the smaller q already held.
        if ks < ks_model {
            ks_model = ks;
            q_hat = q;
        }
    }

    let n = empirical.len() as f64;
    let poisson_lambda = total as f64 / n;
    let p_ks = poisson_ks(&empirical_hist, poisson_lambda);

    let mut positive: Vec<u64> = empirical.iter().copied().filter(|&c| c >= 1).collect();
    positive.sort_unstable();
    let logs: Vec<f64> = positive.iter().map(|&c| math::ln(c as f64)).collect();
    let m = logs.len() as f64;
    let mu = logs.iter().sum::<f64>() / m;
    let sigma = math::sqrt(logs.iter().map(|&l| (l - mu) * (l - mu)).sum::<f64>() / m);
    let ln_ks = lognormal_ks(&positive, mu, sigma);

    Ok(ModelFit {
        q_hat,
        ks_model,
        grid_ks,
        poisson_lambda,
        poisson_ks: p_ks,
        lognormal_mu: mu,
        lognormal_sigma: sigma,
        lognormal_ks: ln_ks,
    })
}

/// The default estimation grid: 0.00, 0.05, ..., 1.00.
pub fn default_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// Continuous-approximation maximum-likelihood tail exponent
/// `1 + N / sum(ln(n_i / n_min))` over histogram entries with n >= n_min.
/// Requires at least 10 distinct count values in the tail.
pub fn tail_exponent_hist(hist: &BTreeMap<u64, u64>, n_min: u64) -> Result<f64, Error> {
    if n_min == 0 {
        return Err(Error::InvalidTailCutoff);
    }
    let mut n = 0u64;
    let mut distinct = 0usize;
    let mut log_sum = 0.0f64;
    for (&value, &count) in hist.range(n_min..) {
        distinct += 1;
        n += count;
        log_sum += count as f64 * math::ln(value as f64 / n_min as f64);
    }
    if distinct < 10 {
        return Err(Error::InsufficientTail {
            got: distinct,
            need: 10,
            n_min,
        });
    }
    Ok(1.0 + n as f64 / log_sum)
}

/// [`tail_exponent_hist`] over raw per-legislator counts.
pub fn tail_exponent(samples: &[u64], n_min: u64) -> Result<f64, Error> {
    tail_exponent_hist(&histogram_of(samples), n_min)
}
