//! One error type for everything the analysis layer can reject.

use alloc::string::String;
use thiserror::Error;

/// Why an operation could not produce a result.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A table already contains a record with this identifier.
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    /// A reference, hyperlink, or sentiment row names an outlet that is not in the outlet table.
    #[error("unknown outlet id `{id}`")]
    UnknownOutlet { id: String },
    /// A reference or sentiment row names a legislator that is not in the roster.
    #[error("unknown legislator id `{id}`")]
    UnknownLegislator { id: String },
    /// A roster row carries a state code outside the recognized state/territory set.
    #[error("unrecognized state code `{code}` for legislator `{id}`")]
    UnknownState { id: String, code: String },
    /// A timestamp falls outside the corpus's declared date range.
    #[error("timestamp {date} outside declared range for {kind} row")]
    TimestampOutOfRange { kind: &'static str, date: String },
    /// A sentiment intensity is outside [0, 1].
    #[error(
        "sentiment {field} {value} outside [0, 1] for outlet `{outlet}`, legislator `{legislator}`"
    )]
    SentimentOutOfRange {
        outlet: String,
        legislator: String,
        field: &'static str,
        value: f64,
    },
    /// Two sentiment rows describe the same (outlet, legislator) pair.
    #[error("duplicate sentiment record for outlet `{outlet}`, legislator `{legislator}`")]
    DuplicateSentiment { outlet: String, legislator: String },
    /// The corpus has no reference edges at all.
    #[error("reference table is empty")]
    EmptyReferences,
    /// A declared date range has its end before its start.
    #[error("date range end {end} precedes start {start}")]
    InvalidDateRange { start: String, end: String },
    /// Filtering left no references to count: there is nothing to observe,
    /// which is different from observing zeros.
    #[error("no references match the requested filter")]
    NoObservations,

    /// A baseline probability vector is not strictly positive and summing to one.
    #[error("invalid baseline: {reason}")]
    InvalidBaseline { reason: String },
    /// A Population baseline was requested but some legislators in scope have no
    /// population attribute.
    #[error("population baseline requested but population missing for: {ids}")]
    MissingPopulation { ids: String },
    /// A zero cell with correction disabled: the log-odds ratio is infinite.
    #[error("infinite slant: zero cell (n_ik = {n_ik}, n_i = {n_i}) with correction disabled")]
    InfiniteSlant { n_ik: u64, n_i: u64 },
    /// The concordance or discordance mass is zero, so the ordinal log-odds
    /// ratio is undefined for this profile.
    #[error("degenerate category ordering: {side} mass is zero")]
    DegenerateOrdering { side: &'static str },
    /// Count and probability inputs disagree on the number of categories.
    #[error("category count mismatch: {left} vs {right}")]
    CategoryMismatch { left: usize, right: usize },
    /// Pooling needs at least two scores.
    #[error("only {got} scores to pool; need at least 2")]
    TooFewScores { got: usize },
    /// A pooled slant estimate must be finite.
    #[error("non-finite slant estimate {value} in pool input")]
    NonFiniteScore { value: f64 },
    /// A pooled variance input must be a positive, finite number.
    #[error("non-positive or non-finite variance {value} in pool input")]
    InvalidVariance { value: f64 },
    /// The between-outlet heterogeneity denominator is zero, so the
    /// random-effects weights are undefined.
    #[error("heterogeneity denominator is zero; need at least two distinct weights")]
    DegenerateHeterogeneity,

    /// Window or step lengths must be at least one day.
    #[error("invalid window spec: {reason}")]
    InvalidWindow { reason: String },
    /// The corpus date range is shorter than one window.
    #[error("window of {window_days} days does not fit the {range_days}-day corpus range")]
    WindowTooLong { window_days: i64, range_days: i64 },
    /// Shift-regression periods must not overlap.
    #[error("shift periods overlap")]
    OverlappingPeriods,
    /// Shift regression needs at least three outlets scoreable in both periods.
    #[error("only {got} outlets scoreable in both periods; need at least {need}")]
    TooFewShiftPoints { got: usize, need: usize },
    /// The regressor is constant, so the regression slope is undefined.
    #[error("regression input has zero variance in the predictor")]
    ZeroPredictorVariance,

    /// The corpus carries no hyperlink table: the analysis is unavailable, which
    /// is different from observing zero links.
    #[error("no hyperlink data in corpus")]
    NoHyperlinkData,
    /// The corpus carries no sentiment table.
    #[error("no sentiment data in corpus")]
    NoSentimentData,
    /// Correlation needs at least three points.
    #[error("only {got} points for correlation; need at least 3")]
    TooFewPoints { got: usize },
    /// One of the correlated variables is constant.
    #[error("correlation input has zero variance on the {axis} axis")]
    ZeroVariance { axis: &'static str },

    /// A simulation configuration parameter is out of range.
    #[error("invalid simulation config: {reason}")]
    InvalidSimConfig { reason: String },
    /// Model fitting needs at least one nonzero empirical count.
    #[error("all empirical counts are zero")]
    AllZeroCounts,
    /// The q grid for model fitting is empty or out of [0, 1].
    #[error("invalid fit grid: {reason}")]
    InvalidGrid { reason: String },
    /// The tail cutoff for exponent estimation must be at least 1.
    #[error("tail cutoff n_min must be at least 1")]
    InvalidTailCutoff,
    /// Too little tail mass above the cutoff to estimate an exponent.
    #[error("only {got} distinct count values at or above n_min = {n_min}; need at least {need}")]
    InsufficientTail { got: usize, need: usize, n_min: u64 },
}
