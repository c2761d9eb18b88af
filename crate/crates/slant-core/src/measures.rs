//! Per-outlet slant scores: dichotomous log-odds ratios for two-category
//! attributes (party, ideology, gender) and the ordinal generalized
//! log-odds ratio for ranked profiles (front-runner, region).

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::corpus::{count_references, Chamber, Corpus, CountFilter, GroupBy, Media, Party};
use crate::date::DateWindow;
use crate::error::Error;
use crate::math;

/// Which slant dimension is being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasureKind {
    /// Dichotomous D vs R; positive = toward D.
    Party,
    /// Dichotomous by DW-NOMINATE sign; positive = toward Left.
    Ideology,
    /// Dichotomous F vs M; positive = toward M.
    Gender,
    /// Ordinal over legislators ranked by the outlet's own reference counts;
    /// positive = concentration on the outlet's own front-runners.
    FrontRunner,
    /// Ordinal over states ranked by the outlet's own reference counts.
    Region,
}

impl MeasureKind {
    /// Whether the measure is a two-category log-odds ratio.
    pub fn is_dichotomous(self) -> bool {
        matches!(
            self,
            MeasureKind::Party | MeasureKind::Ideology | MeasureKind::Gender
        )
    }

    pub(crate) fn group_by(self) -> GroupBy {
        match self {
            MeasureKind::Party => GroupBy::Party,
            MeasureKind::Ideology => GroupBy::IdeologySign,
            MeasureKind::Gender => GroupBy::Gender,
            MeasureKind::FrontRunner => GroupBy::Legislator,
            MeasureKind::Region => GroupBy::State,
        }
    }

    /// The category whose over-representation makes theta positive.
    pub(crate) fn reference_category(self) -> Option<&'static str> {
        match self {
            MeasureKind::Party => Some("D"),
            MeasureKind::Ideology => Some("Left"),
            MeasureKind::Gender => Some("M"),
            MeasureKind::FrontRunner | MeasureKind::Region => None,
        }
    }
}

/// Where baseline probabilities come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineKind {
    Uniform,
    CongressComposition,
    Population,
    Custom,
}

/// How to pick the baseline for a measurement run.
#[derive(Debug, Clone, PartialEq)]
pub enum BaselineChoice {
    Uniform,
    CongressComposition,
    Population,
    /// Caller-supplied category probabilities (for example from a file).
    Custom(Baseline),
}

impl BaselineChoice {
    pub fn kind(&self) -> BaselineKind {
        match self {
            BaselineChoice::Uniform => BaselineKind::Uniform,
            BaselineChoice::CongressComposition => BaselineKind::CongressComposition,
            BaselineChoice::Population => BaselineKind::Population,
            BaselineChoice::Custom(_) => BaselineKind::Custom,
        }
    }
}

/// A validated baseline probability vector over named categories.
///
/// Entries are strictly positive and sum to one (within 1e-12 on input);
/// zero-probability categories are dropped at construction and recorded in
/// `excluded`, because an odds ratio against a zero baseline is undefined.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    pub kind: BaselineKind,
    pub categories: Vec<String>,
    pub probs: Vec<f64>,
    /// Categories removed for having zero baseline probability.
    pub excluded: Vec<String>,
}

impl Baseline {
    pub fn new(
        kind: BaselineKind,
        categories: Vec<String>,
        probs: Vec<f64>,
    ) -> Result<Baseline, Error> {
        if categories.len() != probs.len() {
            return Err(Error::CategoryMismatch {
                left: categories.len(),
                right: probs.len(),
            });
        }
        let mut sum = 0.0;
        for &p in &probs {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidBaseline {
                    reason: alloc::format!("probability {p} is not a finite non-negative number"),
                });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidBaseline {
                reason: alloc::format!("probabilities sum to {sum}, not 1"),
            });
        }
        let mut kept_cats = Vec::new();
        let mut kept_probs = Vec::new();
        let mut excluded = Vec::new();
        for (c, p) in categories.into_iter().zip(probs) {
            if p > 0.0 {
                kept_cats.push(c);
                kept_probs.push(p);
            } else {
                excluded.push(c);
            }
        }
        if kept_cats.len() < 2 {
            return Err(Error::InvalidBaseline {
                reason: "fewer than 2 categories with positive probability".to_string(),
            });
        }
        Ok(Baseline {
            kind,
            categories: kept_cats,
            probs: kept_probs,
            excluded,
        })
    }

    /// Probability for a category, if it survived construction.
    pub fn prob_of(&self, category: &str) -> Option<f64> {
        self.categories
            .iter()
            .position(|c| c == category)
            .map(|i| self.probs[i])
    }
}

/// Zero-cell policy for the dichotomous measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Correction {
    /// Haldane-Anscombe: when either cell is zero, add 0.5 to both cells.
    HaldaneAnscombe,
    /// No correction; zero cells are an error instead of an infinite score.
    Disabled,
}

/// One outlet's slant estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct SlantScore {
    pub outlet_id: String,
    pub media: Media,
    pub measure: MeasureKind,
    /// Log-odds-ratio against the baseline; exp(theta) is the multiplicative
    /// over-reference factor for the reference category.
    pub theta: f64,
    pub variance: f64,
    /// Observations the score is based on (n_i after category exclusions).
    pub n_obs: u64,
    pub baseline: BaselineKind,
}

/// Dichotomous log-odds slant and its Mantel-Haenszel variance.
///
/// `theta = log((n_ik / (n_i - n_ik)) / (p_k / (1 - p_k)))` with the
/// zero-cell correction applied per `correction`;
/// `variance = 1/n_ik + 1/(n_i - n_ik) + 1/(n_i p_k) + 1/(n_i (1 - p_k))`
/// over the corrected counts.
pub fn dichotomous_slant(
    n_ik: u64,
    n_i: u64,
    p_k: f64,
    correction: Correction,
) -> Result<(f64, f64), Error> {
    if n_i == 0 {
        return Err(Error::NoObservations);
    }
    if !(p_k > 0.0 && p_k < 1.0) {
        return Err(Error::InvalidBaseline {
            reason: alloc::format!("reference probability {p_k} outside (0, 1)"),
        });
    }
    debug_assert!(n_ik <= n_i);
    let (a, b) = if n_ik == 0 || n_ik == n_i {
        match correction {
            Correction::HaldaneAnscombe => (n_ik as f64 + 0.5, (n_i - n_ik) as f64 + 0.5),
            Correction::Disabled => return Err(Error::InfiniteSlant { n_ik, n_i }),
        }
    } else {
        (n_ik as f64, (n_i - n_ik) as f64)
    };
    let n = a + b;
    let theta = math::ln(a / b) - math::ln(p_k / (1.0 - p_k));
    let variance = 1.0 / a + 1.0 / b + 1.0 / (n * p_k) + 1.0 / (n * (1.0 - p_k));
    Ok((theta, variance))
}

/// Generalized (ordinal) log-odds slant over L ranked categories.
///
/// `p_i` is the outlet's own probability profile and `p` the baseline, both
/// already ordered by the caller's rank convention (index 0 = top rank).
/// `theta = log(N / D)` where `N = sum over pairs (k, j), j > k, of
/// p_i[k] * p[j]` (own rank above an independent baseline draw) and `D` is the
/// reverse sum. The variance is the delta-method form for the log of the
/// generalized odds ratio `R = N / D`, with both sampling terms divided by
/// `n_i`:
///
/// `Var = [ sum_j p_i[j] * (R * B_j - A_j)^2  +  sum_j p[j] * (R * A'_j - B'_j)^2 ]
///        / (n_i * N^2)`
///
/// where `A_j`/`B_j` are baseline mass strictly above/below index j and
/// `A'_j`/`B'_j` the same for the own profile. At L = 2 both theta and this
/// variance reduce exactly to the dichotomous formulas.
pub fn generalized_slant(p_i: &[f64], p: &[f64], n_i: u64) -> Result<(f64, f64), Error> {
    let l = p_i.len();
    if l != p.len() {
        return Err(Error::CategoryMismatch {
            left: l,
            right: p.len(),
        });
    }
    if l < 2 {
        return Err(Error::InvalidBaseline {
            reason: "need at least 2 categories".to_string(),
        });
    }
    if n_i == 0 {
        return Err(Error::NoObservations);
    }
    let mut own_sum = 0.0;
    for &v in p_i {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidBaseline {
                reason: alloc::format!("own probability {v} is not a finite non-negative number"),
            });
        }
        own_sum += v;
    }
    let mut base_sum = 0.0;
    for &v in p {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidBaseline {
                reason: alloc::format!("baseline probability {v} is not strictly positive"),
            });
        }
        base_sum += v;
    }
    for (name, sum) in [("own", own_sum), ("baseline", base_sum)] {
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidBaseline {
                reason: alloc::format!("{name} probabilities sum to {sum}, not 1"),
            });
        }
    }

    // Cumulative masses strictly below / strictly above each index.
    let mut below_base = alloc::vec![0.0f64; l];
    let mut below_own = alloc::vec![0.0f64; l];
    for j in 1..l {
        below_base[j] = below_base[j - 1] + p[j - 1];
        below_own[j] = below_own[j - 1] + p_i[j - 1];
    }
    let mut above_base = alloc::vec![0.0f64; l];
    let mut above_own = alloc::vec![0.0f64; l];
    for j in (0..l - 1).rev() {
        above_base[j] = above_base[j + 1] + p[j + 1];
        above_own[j] = above_own[j + 1] + p_i[j + 1];
    }

    let concordant: f64 = (0..l).map(|k| p_i[k] * above_base[k]).sum();
    let discordant: f64 = (0..l).map(|k| p_i[k] * below_base[k]).sum();
    if concordant <= 0.0 {
        return Err(Error::DegenerateOrdering { side: "concordant" });
    }
    if discordant <= 0.0 {
        return Err(Error::DegenerateOrdering { side: "discordant" });
    }
    let theta = math::ln(concordant) - math::ln(discordant);
    let ratio = concordant / discordant;

    let own_term: f64 = (0..l)
        .map(|j| {
            let alpha = ratio * below_base[j] - above_base[j];
            p_i[j] * alpha * alpha
        })
        .sum();
    let base_term: f64 = (0..l)
        .map(|j| {
            let beta = ratio * above_own[j] - below_own[j];
            p[j] * beta * beta
        })
        .sum();
    let variance = (own_term + base_term) / (n_i as f64 * concordant * concordant);
    Ok((theta, variance))
}

/// Tie-break policy for ranking categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    /// Ties ordered by ascending category id (stable, deterministic).
    #[default]
    AscendingId,
}

/// Ranks categories by descending count, returning index positions into the
/// input (rank 0 first). Ties follow the tie-break policy.
pub fn rank_categories(items: &[(&str, u64)], tie_break: TieBreak) -> Vec<usize> {
    let mut order: Vec<usize> = (0..items.len()).collect();
    match tie_break {
        TieBreak::AscendingId => {
            order.sort_by(|&a, &b| {
                items[b]
                    .1
                    .cmp(&items[a].1)
                    .then_with(|| items[a].0.cmp(items[b].0))
            });
        }
    }
    order
}

/// Which outlets get scored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreFilter {
    pub media: Option<Media>,
    pub chamber: Option<Chamber>,
    /// Restrict counting to this inclusive day window.
    pub window: Option<DateWindow>,
    /// Minimum references (after category exclusions) an outlet needs.
    pub min_obs: u64,
}

impl Default for ScoreFilter {
    fn default() -> Self {
        ScoreFilter {
            media: None,
            chamber: None,
            window: None,
            min_obs: 5,
        }
    }
}

/// The outcome of scoring a corpus: the scores plus what was left out and why.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    /// One score per scoreable outlet, ascending outlet-id order.
    pub scores: Vec<SlantScore>,
    /// The baseline actually used, including any zero-probability exclusions.
    pub baseline: Baseline,
    /// Roster members the measure cannot place (independents for Party,
    /// missing/zero ideology for Ideology).
    pub excluded_legislators: usize,
    /// Reference edges dropped with those legislators, plus edges in
    /// categories the baseline excluded.
    pub excluded_references: u64,
    /// Outlets with in-scope references but fewer than `min_obs`.
    pub outlets_below_floor: usize,
    /// Outlets skipped as degenerate (zero cell with correction disabled, or
    /// an ordinal profile with empty concordant/discordant mass).
    pub outlets_degenerate: usize,
}

/// Scores every outlet that passes the filter under the chosen measure and
/// baseline. Output is deterministic: ascending outlet-id order.
pub fn measure_outlets(
    corpus: &Corpus,
    measure: MeasureKind,
    baseline: &BaselineChoice,
    filter: &ScoreFilter,
    correction: Correction,
) -> Result<ScoreSet, Error> {
    let count_filter = CountFilter {
        media: filter.media,
        chamber: filter.chamber,
        window: filter.window,
    };
    let table = count_references(corpus, measure.group_by(), &count_filter)?;
    let resolved = resolve_baseline(corpus, measure, baseline, filter.chamber, &table.groups)?;

    // Columns of the count table that survived baseline positivity.
    let kept: Vec<usize> = resolved
        .categories
        .iter()
        .map(|c| {
            table
                .group_position(c)
                .expect("baseline category from table")
        })
        .collect();

    let mut scores = Vec::new();
    let mut excluded_references = table.excluded_references;
    let mut outlets_below_floor = 0usize;
    let mut outlets_degenerate = 0usize;

    let ref_position = measure
        .reference_category()
        .map(|c| resolved.categories.iter().position(|x| x == c));
    let sorted_baseline = if measure.is_dichotomous() {
        Vec::new()
    } else {
        // Ordinal baselines are rank profiles: order by descending mass,
        // ties by ascending category id.
        let mut order: Vec<usize> = (0..resolved.probs.len()).collect();
        order.sort_by(|&a, &b| {
            resolved.probs[b]
                .partial_cmp(&resolved.probs[a])
                .unwrap()
                .then_with(|| resolved.categories[a].cmp(&resolved.categories[b]))
        });
        order.iter().map(|&i| resolved.probs[i]).collect()
    };

    for row in &table.rows {
        let counts: Vec<u64> = kept.iter().map(|&g| row.counts[g]).collect();
        let n_i: u64 = counts.iter().sum();
        excluded_references += row.total - n_i;
        if n_i < filter.min_obs || n_i == 0 {
            if n_i > 0 {
                outlets_below_floor += 1;
            }
            continue;
        }
        let estimate = if measure.is_dichotomous() {
            let k = ref_position
                .flatten()
                .ok_or_else(|| Error::InvalidBaseline {
                    reason: "reference category has zero baseline probability".to_string(),
                })?;
            dichotomous_slant(counts[k], n_i, resolved.probs[k], correction)
        } else {
            let items: Vec<(&str, u64)> = resolved
                .categories
                .iter()
                .map(String::as_str)
                .zip(counts.iter().copied())
                .collect();
            let order = rank_categories(&items, TieBreak::AscendingId);
            let own: Vec<f64> = order
                .iter()
                .map(|&i| counts[i] as f64 / n_i as f64)
                .collect();
            generalized_slant(&own, &sorted_baseline, n_i)
        };
        match estimate {
            Ok((theta, variance)) => scores.push(SlantScore {
                outlet_id: corpus.outlet(row.outlet).id.clone(),
                media: corpus.outlet(row.outlet).media,
                measure,
                theta,
                variance,
                n_obs: n_i,
                baseline: resolved.kind,
            }),
            Err(Error::InfiniteSlant { .. }) | Err(Error::DegenerateOrdering { .. }) => {
                outlets_degenerate += 1;
            }
            Err(e) => return Err(e),
        }
    }

    Ok(ScoreSet {
        scores,
        baseline: resolved,
        excluded_legislators: table.excluded_legislators,
        excluded_references,
        outlets_below_floor,
        outlets_degenerate,
    })
}

/// Builds the baseline probability vector for a measure over the given
/// category set (the count-table groups, in table order).
fn resolve_baseline(
    corpus: &Corpus,
    measure: MeasureKind,
    choice: &BaselineChoice,
    chamber: Option<Chamber>,
    groups: &[String],
) -> Result<Baseline, Error> {
    let kind = choice.kind();
    let in_scope = |l: &crate::corpus::Legislator| chamber.is_none_or(|c| l.chamber == c);
    match choice {
        BaselineChoice::Uniform => {
            let l = groups.len();
            Baseline::new(kind, groups.to_vec(), alloc::vec![1.0 / l as f64; l])
        }
        BaselineChoice::CongressComposition => {
            let mut seats = alloc::vec![0u64; groups.len()];
            for leg in corpus.legislators().iter().filter(|l| in_scope(l)) {
                if let Some(g) = member_category(leg, measure) {
                    if let Some(pos) = groups.iter().position(|c| c == g.as_str()) {
                        seats[pos] += 1;
                    }
                }
            }
            let total: u64 = seats.iter().sum();
            if total == 0 {
                return Err(Error::InvalidBaseline {
                    reason: "no roster members in scope for composition baseline".to_string(),
                });
            }
            let probs = seats.iter().map(|&s| s as f64 / total as f64).collect();
            Baseline::new(kind, groups.to_vec(), probs)
        }
        BaselineChoice::Population => {
            let mut mass = alloc::vec![0.0f64; groups.len()];
            let mut missing = Vec::new();
            for leg in corpus.legislators().iter().filter(|l| in_scope(l)) {
                let Some(g) = member_category(leg, measure) else {
                    continue;
                };
                let Some(pos) = groups.iter().position(|c| c == g.as_str()) else {
                    continue;
                };
                match leg.population {
                    Some(p) => mass[pos] += p as f64,
                    None => missing.push(leg.id.clone()),
                }
            }
            if !missing.is_empty() {
                return Err(Error::MissingPopulation {
                    ids: missing.join(", "),
                });
            }
            let total: f64 = mass.iter().sum();
            if total <= 0.0 {
                return Err(Error::InvalidBaseline {
                    reason: "total represented population is zero".to_string(),
                });
            }
            let probs = mass.iter().map(|&m| m / total).collect();
            Baseline::new(kind, groups.to_vec(), probs)
        }
        BaselineChoice::Custom(base) => {
            // Reorder the supplied probabilities into table-group order and
            // require the category sets to match exactly.
            let mut probs = Vec::with_capacity(groups.len());
            for g in groups {
                match base.prob_of(g) {
                    Some(p) => probs.push(p),
                    None => {
                        return Err(Error::InvalidBaseline {
                            reason: alloc::format!("custom baseline missing category `{g}`"),
                        })
                    }
                }
            }
            if base.categories.len() != groups.len() {
                return Err(Error::InvalidBaseline {
                    reason: alloc::format!(
                        "custom baseline has {} categories, measure has {}",
                        base.categories.len(),
                        groups.len()
                    ),
                });
            }
            Baseline::new(BaselineKind::Custom, groups.to_vec(), probs)
        }
    }
}

/// The category a roster member belongs to under a measure, if any.
fn member_category(l: &crate::corpus::Legislator, measure: MeasureKind) -> Option<String> {
    match measure {
        MeasureKind::Party => match l.party {
            Party::D => Some("D".to_string()),
            Party::R => Some("R".to_string()),
            Party::Other => None,
        },
        MeasureKind::Ideology => match l.ideology {
            Some(x) if x < 0.0 => Some("Left".to_string()),
            Some(x) if x > 0.0 => Some("Right".to_string()),
            _ => None,
        },
        MeasureKind::Gender => Some(
            match l.gender {
                crate::corpus::Gender::F => "F",
                crate::corpus::Gender::M => "M",
            }
            .to_string(),
        ),
        MeasureKind::FrontRunner => Some(l.id.clone()),
        MeasureKind::Region => Some(l.state.clone()),
    }
}
