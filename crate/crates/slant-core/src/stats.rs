//! Small descriptive-statistics and regression kit shared by the analysis
//! modules.

use crate::error::Error;
use crate::math;
use crate::special;

/// Arithmetic mean; 0 for an empty slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance (moments over n).
pub fn population_variance(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (moments over n - 1); 0 when fewer than two points.
pub fn sample_variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Excess kurtosis from population moments: m4 / m2^2 - 3.
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let n = xs.len() as f64;
    let m2 = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n;
    if m2 == 0.0 {
        return 0.0;
    }
    let m4 = xs
        .iter()
        .map(|x| {
            let d = x - m;
            d * d * d * d
        })
        .sum::<f64>()
        / n;
    m4 / (m2 * m2) - 3.0
}

/// Pearson correlation with a two-sided p-value from the t-statistic
/// `t = r sqrt((n-2) / (1-r^2))` on `n - 2` degrees of freedom.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<(f64, f64), Error> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewPoints { got: n });
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance { axis: "x" });
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance { axis: "y" });
    }
    let r = (sxy / math::sqrt(sxx * syy)).clamp(-1.0, 1.0);
    let dof = (n - 2) as f64;
    let p = if r.abs() >= 1.0 {
        0.0
    } else {
        let t = r * math::sqrt(dof / (1.0 - r * r));
        special::student_t_two_sided_p(t, dof)
    };
    Ok((r, p))
}

/// A fitted straight line with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
}

/// Least-squares line `y = intercept + slope * x`, optionally weighted.
///
/// Weights are precisions: residual variance is modeled as `sigma^2 / w_i`.
/// Standard errors use the weighted residual variance on `n - 2` degrees of
/// freedom.
pub fn line_fit(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<LineFit, Error> {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewShiftPoints { got: n, need: 3 });
    }
    let unit = [1.0];
    let w_iter = |i: usize| -> f64 {
        match weights {
            Some(w) => w[i],
            None => unit[0],
        }
    };
    let w_sum: f64 = (0..n).map(w_iter).sum();
    if w_sum <= 0.0 {
        return Err(Error::ZeroPredictorVariance);
    }
    let xb: f64 = (0..n).map(|i| w_iter(i) * x[i]).sum::<f64>() / w_sum;
    let yb: f64 = (0..n).map(|i| w_iter(i) * y[i]).sum::<f64>() / w_sum;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let w = w_iter(i);
        sxx += w * (x[i] - xb) * (x[i] - xb);
        sxy += w * (x[i] - xb) * (y[i] - yb);
    }
    if sxx == 0.0 {
        return Err(Error::ZeroPredictorVariance);
    }
    let slope = sxy / sxx;
    let intercept = yb - slope * xb;
    let ssr: f64 = (0..n)
        .map(|i| {
            let e = y[i] - intercept - slope * x[i];
            w_iter(i) * e * e
        })
        .sum();
    let s2 = ssr / (n - 2) as f64;
    let slope_se = math::sqrt(s2 / sxx);
    let intercept_se = math::sqrt(s2 * (1.0 / w_sum + xb * xb / sxx));
    Ok(LineFit {
        slope,
        intercept,
        slope_se,
        intercept_se,
    })
}
