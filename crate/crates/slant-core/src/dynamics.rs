//! Slant over time: collective slant on a running day-window, and the
//! two-period per-outlet shift regression.

use alloc::string::String;
use alloc::vec::Vec;

use crate::corpus::Corpus;
use crate::date::{DateWindow, Day};
use crate::error::Error;
use crate::measures::{measure_outlets, BaselineChoice, Correction, MeasureKind, ScoreFilter};
use crate::pooling::{pool, CollectiveSlant};
use crate::stats;

/// One window position in a slant series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    /// Label: the window's inclusive end day.
    pub window_end: Day,
    pub pooled: CollectiveSlant,
}

/// Collective slant evaluated on a running window.
#[derive(Debug, Clone, PartialEq)]
pub struct SlantSeries {
    pub window_days: i32,
    pub step_days: i32,
    /// Points in ascending date order.
    pub points: Vec<SeriesPoint>,
    /// Window-end days skipped because fewer than 2 outlets were scoreable.
    pub gaps: Vec<Day>,
}

/// Pools outlet scores within each `window_days`-long window, advancing the
/// window by `step_days` across the corpus date range (or `filter.window`
/// when set). Windows are inclusive of both endpoints and labeled by their
/// end day; positions with fewer than 2 scoreable outlets become gaps.
pub fn slant_series(
    corpus: &Corpus,
    measure: MeasureKind,
    baseline: &BaselineChoice,
    window_days: i32,
    step_days: i32,
    filter: &ScoreFilter,
    correction: Correction,
) -> Result<SlantSeries, Error> {
    if window_days < 1 {
        return Err(Error::InvalidWindow {
            reason: alloc::format!("window length {window_days} days; need at least 1"),
        });
    }
    if step_days < 1 {
        return Err(Error::InvalidWindow {
            reason: alloc::format!("step {step_days} days; need at least 1"),
        });
    }
    let span = filter.window.unwrap_or_else(|| corpus.date_range());
    if window_days > span.len_days() {
        return Err(Error::WindowTooLong {
            window_days: window_days as i64,
            range_days: span.len_days() as i64,
        });
    }

    let mut points = Vec::new();
    let mut gaps = Vec::new();
    let mut end = span.start.plus(window_days - 1);
    while end.0 <= span.end.0 {
        let window = DateWindow::new(end.plus(1 - window_days), end)
            .expect("window bounds are ordered by construction");
        let scores = match measure_outlets(
            corpus,
            measure,
            baseline,
            &ScoreFilter {
                window: Some(window),
                ..*filter
            },
            correction,
        ) {
            Ok(set) => set.scores,
            // An empty window means zero scoreable outlets, hence a gap.
            Err(Error::NoObservations) => Vec::new(),
            Err(e) => return Err(e),
        };
        if scores.len() < 2 {
            gaps.push(end);
        } else {
            points.push(SeriesPoint {
                window_end: end,
                pooled: pool(&scores)?,
            });
        }
        end = end.plus(step_days);
    }
    Ok(SlantSeries {
        window_days,
        step_days,
        points,
        gaps,
    })
}

/// Regression weighting for the two-period shift fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// Ordinary least squares.
    #[default]
    None,
    /// Weighted least squares with weights = period-2 reference counts.
    PostCounts,
}

/// One outlet's before/after pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftPoint {
    pub outlet_id: String,
    /// Slant in period 1.
    pub theta_t1: f64,
    /// Slant change: theta(period 2) minus theta(period 1).
    pub delta_theta: f64,
    /// The outlet's period-2 reference count.
    pub post_n: u64,
}

/// Least-squares fit of per-outlet slant change on initial slant.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftRegression {
    pub period1: DateWindow,
    pub period2: DateWindow,
    pub weighting: Weighting,
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub intercept_se: f64,
    /// One point per outlet scoreable in both periods, ascending outlet id.
    pub points: Vec<ShiftPoint>,
    /// Outlets scoreable in exactly one of the two periods.
    pub dropped_one_period: usize,
}

/// Scores every outlet in each period and regresses the slant change
/// `delta = theta(t2) - theta(t1)` on `theta(t1)`. Outlets scoreable in only
/// one period are dropped and counted, never zero-imputed.
#[allow(clippy::too_many_arguments)] // one knob per scoring dimension; a config struct would just rename them
pub fn shift_regression(
    corpus: &Corpus,
    measure: MeasureKind,
    baseline: &BaselineChoice,
    period1: DateWindow,
    period2: DateWindow,
    filter: &ScoreFilter,
    correction: Correction,
    weighting: Weighting,
) -> Result<ShiftRegression, Error> {
    if period1.end.0 >= period2.start.0 && period2.end.0 >= period1.start.0 {
        return Err(Error::OverlappingPeriods);
    }
    let score_in = |window: DateWindow| {
        let result = measure_outlets(
            corpus,
            measure,
            baseline,
            &ScoreFilter {
                window: Some(window),
                ..*filter
            },
            correction,
        );
        match result {
            Ok(set) => Ok(set.scores),
            Err(Error::NoObservations) => Ok(Vec::new()),
            Err(e) => Err(e),
        }
    };
    let before = score_in(period1)?;
    let after = score_in(period2)?;

    // Both score lists are in ascending outlet-id order; merge-join them.
    let mut points = Vec::new();
    let mut dropped = 0usize;
    let (mut i, mut j) = (0usize, 0usize);
    while i < before.len() && j < after.len() {
        match before[i].outlet_id.cmp(&after[j].outlet_id) {
            core::cmp::Ordering::Less => {
                dropped += 1;
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                dropped += 1;
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                points.push(ShiftPoint {
                    outlet_id: before[i].outlet_id.clone(),
                    theta_t1: before[i].theta,
                    delta_theta: after[j].theta - before[i].theta,
                    post_n: after[j].n_obs,
                });
                i += 1;
                j += 1;
            }
        }
    }
    dropped += (before.len() - i) + (after.len() - j);

    if points.len() < 3 {
        return Err(Error::TooFewShiftPoints {
            got: points.len(),
            need: 3,
        });
    }
    let x: Vec<f64> = points.iter().map(|p| p.theta_t1).collect();
    let y: Vec<f64> = points.iter().map(|p| p.delta_theta).collect();
    let weights: Option<Vec<f64>> = match weighting {
        Weighting::None => None,
        Weighting::PostCounts => Some(points.iter().map(|p| p.post_n as f64).collect()),
    };
    let fit = stats::line_fit(&x, &y, weights.as_deref())?;
    Ok(ShiftRegression {
        period1,
        period2,
        weighting,
        slope: fit.slope,
        intercept: fit.intercept,
        slope_se: fit.slope_se,
        intercept_se: fit.intercept_se,
        points,
        dropped_one_period: dropped,
    })
}
