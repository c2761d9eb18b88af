//! The in-memory data model: outlets, legislators, timestamped reference
//! edges, plus optional hyperlink and sentiment tables, with the grouped
//! reference counting every measure is built on.
//!
//! A [`Corpus`] is immutable once built. Construction goes through
//! [`CorpusBuilder`], which validates each record as it arrives so callers
//! that read rows from files can attach file/line context to each rejection.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::date::{DateWindow, Day};
use crate::error::Error;

/// Political party of a legislator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    D,
    R,
    Other,
}

/// Congressional chamber.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Chamber {
    House,
    Senate,
}

/// Recorded gender of a legislator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gender {
    F,
    M,
}

/// Media class of an outlet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Media {
    News,
    Blogs,
}

/// Recognized state and territory postal codes (sorted).
pub const STATE_CODES: [&str; 56] = [
    "AK", "AL", "AR", "AS", "AZ", "CA", "CO", "CT", "DC", "DE", "FL", "GA", "GU", "HI", "IA", "ID",
    "IL", "IN", "KS", "KY", "LA", "MA", "MD", "ME", "MI", "MN", "MO", "MP", "MS", "MT", "NC", "ND",
    "NE", "NH", "NJ", "NM", "NV", "NY", "OH", "OK", "OR", "PA", "PR", "RI", "SC", "SD", "TN", "TX",
    "UT", "VA", "VI", "VT", "WA", "WI", "WV", "WY",
];

/// A member of Congress with the attributes the measures dichotomize on.
#[derive(Debug, Clone, PartialEq)]
pub struct Legislator {
    pub id: String,
    pub name: String,
    pub party: Party,
    pub chamber: Chamber,
    pub state: String,
    pub gender: Gender,
    /// DW-NOMINATE first-dimension estimate; negative = left.
    pub ideology: Option<f64>,
    /// Constituents represented, for population baselines.
    pub population: Option<u64>,
}

/// A media outlet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outlet {
    pub id: String,
    pub media: Media,
}

/// One outlet-to-legislator citation event. Indices resolve against the
/// corpus's outlet and legislator tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reference {
    pub outlet: usize,
    pub legislator: usize,
    pub day: Day,
    pub article_id: String,
}

/// One outlet-to-outlet hyperlink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hyperlink {
    pub source: usize,
    pub target: usize,
    pub day: Day,
}

/// Aggregated sentiment of one outlet's coverage of one legislator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sentiment {
    pub outlet: usize,
    pub legislator: usize,
    pub negative: f64,
    pub positive: f64,
}

/// The validated, immutable data set all analyses read from.
#[derive(Debug, Clone)]
pub struct Corpus {
    outlets: Vec<Outlet>,
    legislators: Vec<Legislator>,
    references: Vec<Reference>,
    hyperlinks: Option<Vec<Hyperlink>>,
    sentiments: Option<Vec<Sentiment>>,
    outlet_index: BTreeMap<String, usize>,
    legislator_index: BTreeMap<String, usize>,
    date_range: DateWindow,
}

impl Corpus {
    pub fn builder() -> CorpusBuilder {
        CorpusBuilder::default()
    }

    pub fn outlets(&self) -> &[Outlet] {
        &self.outlets
    }

    pub fn legislators(&self) -> &[Legislator] {
        &self.legislators
    }

    pub fn references(&self) -> &[Reference] {
        &self.references
    }

    /// Hyperlink table, or `None` when no hyperlink data was supplied.
    pub fn hyperlinks(&self) -> Option<&[Hyperlink]> {
        self.hyperlinks.as_deref()
    }

    /// Sentiment table, or `None` when no sentiment data was supplied.
    pub fn sentiments(&self) -> Option<&[Sentiment]> {
        self.sentiments.as_deref()
    }

    /// Day range covered by the corpus (declared, or derived from references).
    pub fn date_range(&self) -> DateWindow {
        self.date_range
    }

    pub fn outlet(&self, index: usize) -> &Outlet {
        &self.outlets[index]
    }

    pub fn legislator(&self, index: usize) -> &Legislator {
        &self.legislators[index]
    }

    pub fn outlet_by_id(&self, id: &str) -> Option<usize> {
        self.outlet_index.get(id).copied()
    }

    pub fn legislator_by_id(&self, id: &str) -> Option<usize> {
        self.legislator_index.get(id).copied()
    }

    /// Outlet indices in ascending id order — the canonical output order.
    pub fn outlets_by_id(&self) -> impl Iterator<Item = usize> + '_ {
        self.outlet_index.values().copied()
    }

    /// Number of outlets in the given media class.
    pub fn media_size(&self, media: Media) -> usize {
        self.outlets.iter().filter(|o| o.media == media).count()
    }
}

/// Incremental, validating constructor for [`Corpus`].
#[derive(Debug, Default)]
pub struct CorpusBuilder {
    outlets: Vec<Outlet>,
    legislators: Vec<Legislator>,
    references: Vec<Reference>,
    hyperlinks: Vec<Hyperlink>,
    sentiments: Vec<Sentiment>,
    outlet_index: BTreeMap<String, usize>,
    legislator_index: BTreeMap<String, usize>,
    sentiment_pairs: BTreeSet<(usize, usize)>,
    declared_range: Option<DateWindow>,
}

impl CorpusBuilder {
    /// Declares the valid day range; timestamps outside it are rejected.
    /// Without a declaration the range is derived from the reference edges.
    pub fn declare_date_range(&mut self, range: DateWindow) -> &mut Self {
        self.declared_range = Some(range);
        self
    }

    pub fn add_outlet(&mut self, id: &str, media: Media) -> Result<(), Error> {
        if self.outlet_index.contains_key(id) {
            return Err(Error::DuplicateId {
                kind: "outlet",
                id: id.to_string(),
            });
        }
        self.outlet_index.insert(id.to_string(), self.outlets.len());
        self.outlets.push(Outlet {
            id: id.to_string(),
            media,
        });
        Ok(())
    }

    pub fn add_legislator(&mut self, legislator: Legislator) -> Result<(), Error> {
        if self.legislator_index.contains_key(&legislator.id) {
            return Err(Error::DuplicateId {
                kind: "legislator",
                id: legislator.id.clone(),
            });
        }
        if STATE_CODES
            .binary_search(&legislator.state.as_str())
            .is_err()
        {
            return Err(Error::UnknownState {
                id: legislator.id.clone(),
                code: legislator.state.clone(),
            });
        }
        self.legislator_index
            .insert(legislator.id.clone(), self.legislators.len());
        self.legislators.push(legislator);
        Ok(())
    }

    pub fn add_reference(
        &mut self,
        outlet_id: &str,
        legislator_id: &str,
        day: Day,
        article_id: &str,
    ) -> Result<(), Error> {
        let outlet = self.resolve_outlet(outlet_id)?;
        let legislator = self.resolve_legislator(legislator_id)?;
        self.check_range("reference", day)?;
        self.references.push(Reference {
            outlet,
            legislator,
            day,
            article_id: article_id.to_string(),
        });
        Ok(())
    }

    pub fn add_hyperlink(
        &mut self,
        source_id: &str,
        target_id: &str,
        day: Day,
    ) -> Result<(), Error> {
        let source = self.resolve_outlet(source_id)?;
        let target = self.resolve_outlet(target_id)?;
        self.check_range("hyperlink", day)?;
        self.hyperlinks.push(Hyperlink {
            source,
            target,
            day,
        });
        Ok(())
    }

    pub fn add_sentiment(
        &mut self,
        outlet_id: &str,
        legislator_id: &str,
        negative: f64,
        positive: f64,
    ) -> Result<(), Error> {
        let outlet = self.resolve_outlet(outlet_id)?;
        let legislator = self.resolve_legislator(legislator_id)?;
        for (field, value) in [("negative", negative), ("positive", positive)] {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(Error::SentimentOutOfRange {
                    outlet: outlet_id.to_string(),
                    legislator: legislator_id.to_string(),
                    field,
                    value,
                });
            }
        }
        if !self.sentiment_pairs.insert((outlet, legislator)) {
            return Err(Error::DuplicateSentiment {
                outlet: outlet_id.to_string(),
                legislator: legislator_id.to_string(),
            });
        }
        self.sentiments.push(Sentiment {
            outlet,
            legislator,
            negative,
            positive,
        });
        Ok(())
    }

    /// Finalizes the corpus. The reference table must be nonempty; empty
    /// hyperlink/sentiment tables become "absent" rather than zero-row tables.
    pub fn finish(self) -> Result<Corpus, Error> {
        if self.references.is_empty() {
            return Err(Error::EmptyReferences);
        }
        let date_range = match self.declared_range {
            Some(range) => range,
            None => {
                let lo = self.references.iter().map(|r| r.day).min().unwrap();
                let hi = self.references.iter().map(|r| r.day).max().unwrap();
                DateWindow { start: lo, end: hi }
            }
        };
        Ok(Corpus {
            outlets: self.outlets,
            legislators: self.legislators,
            references: self.references,
            hyperlinks: (!self.hyperlinks.is_empty()).then_some(self.hyperlinks),
            sentiments: (!self.sentiments.is_empty()).then_some(self.sentiments),
            outlet_index: self.outlet_index,
            legislator_index: self.legislator_index,
            date_range,
        })
    }

    fn resolve_outlet(&self, id: &str) -> Result<usize, Error> {
        self.outlet_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownOutlet { id: id.to_string() })
    }

    fn resolve_legislator(&self, id: &str) -> Result<usize, Error> {
        self.legislator_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownLegislator { id: id.to_string() })
    }

    fn check_range(&self, kind: &'static str, day: Day) -> Result<(), Error> {
        match self.declared_range {
            Some(range) if !range.contains(day) => Err(Error::TimestampOutOfRange {
                kind,
                date: day.to_string(),
            }),
            _ => Ok(()),
        }
    }
}

/// Legislator attribute that reference counts are grouped by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupBy {
    /// Two groups, D and R; independents are excluded and reported.
    Party,
    /// Two groups, F and M.
    Gender,
    /// Two groups by DW-NOMINATE sign, Left (negative) and Right (positive);
    /// missing or exactly-zero scores are excluded and reported.
    IdeologySign,
    /// One group per state code present in the roster scope.
    State,
    /// One group per legislator in scope.
    Legislator,
}

/// Restricts which reference edges are counted.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CountFilter {
    pub media: Option<Media>,
    pub chamber: Option<Chamber>,
    /// Inclusive day window; `None` counts the whole corpus range.
    pub window: Option<DateWindow>,
}

/// Per-outlet reference counts for one outlet, one count per group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountRow {
    /// Index into the corpus outlet table.
    pub outlet: usize,
    pub counts: Vec<u64>,
    /// Marginal n_i = sum of `counts`.
    pub total: u64,
}

/// Grouped reference counts: one row per outlet with in-scope references,
/// rows in ascending outlet-id order, columns in `groups` order.
#[derive(Debug, Clone, PartialEq)]
pub struct CountTable {
    pub group_by: GroupBy,
    /// Ordered category keys (party/gender/sign labels, state codes, or
    /// legislator ids).
    pub groups: Vec<String>,
    pub rows: Vec<CountRow>,
    /// Roster members in chamber scope that this grouping cannot place
    /// (independents for Party, missing/zero ideology for IdeologySign).
    pub excluded_legislators: usize,
    /// In-scope reference edges dropped because their legislator is excluded
    /// by the grouping.
    pub excluded_references: u64,
}

impl CountTable {
    /// Position of a group key, if present.
    pub fn group_position(&self, key: &str) -> Option<usize> {
        self.groups.iter().position(|g| g == key)
    }
}

/// Tallies references per outlet per group under the given filter.
///
/// Errors with [`Error::NoObservations`] when nothing survives the filter:
/// an empty observation set is reported as such, never as a zero-filled table.
pub fn count_references(
    corpus: &Corpus,
    group_by: GroupBy,
    filter: &CountFilter,
) -> Result<CountTable, Error> {
    let in_chamber = |l: &Legislator| filter.chamber.is_none_or(|c| l.chamber == c);

    // Group keys and the legislator -> group column mapping.
    let mut groups: Vec<String> = Vec::new();
    let mut column: BTreeMap<usize, usize> = BTreeMap::new();
    let mut excluded_legislators = 0usize;
    match group_by {
        GroupBy::Party => {
            groups.extend(["D".to_string(), "R".to_string()]);
            for (i, l) in corpus.legislators().iter().enumerate() {
                if !in_chamber(l) {
                    continue;
                }
                match l.party {
                    Party::D => {
                        column.insert(i, 0);
                    }
                    Party::R => {
                        column.insert(i, 1);
                    }
                    Party::Other => excluded_legislators += 1,
                }
            }
        }
        GroupBy::Gender => {
            groups.extend(["F".to_string(), "M".to_string()]);
            for (i, l) in corpus.legislators().iter().enumerate() {
                if !in_chamber(l) {
                    continue;
                }
                let g = match l.gender {
                    Gender::F => 0,
                    Gender::M => 1,
                };
                column.insert(i, g);
            }
        }
        GroupBy::IdeologySign => {
            groups.extend(["Left".to_string(), "Right".to_string()]);
            for (i, l) in corpus.legislators().iter().enumerate() {
                if !in_chamber(l) {
                    continue;
                }
                match l.ideology {
                    Some(x) if x < 0.0 => {
                        column.insert(i, 0);
                    }
                    Some(x) if x > 0.0 => {
                        column.insert(i, 1);
                    }
                    _ => excluded_legislators += 1,
                }
            }
        }
        GroupBy::State => {
            let mut states: BTreeSet<&str> = BTreeSet::new();
            for l in corpus.legislators() {
                if in_chamber(l) {
                    states.insert(l.state.as_str());
                }
            }
            groups.extend(states.iter().map(|s| s.to_string()));
            for (i, l) in corpus.legislators().iter().enumerate() {
                if in_chamber(l) {
                    let g = groups.binary_search(&l.state).unwrap();
                    column.insert(i, g);
                }
            }
        }
        GroupBy::Legislator => {
            let mut ids: Vec<(&str, usize)> = corpus
                .legislators()
                .iter()
                .enumerate()
                .filter(|(_, l)| in_chamber(l))
                .map(|(i, l)| (l.id.as_str(), i))
                .collect();
            ids.sort_unstable();
            for (g, (id, i)) in ids.iter().enumerate() {
                groups.push(id.to_string());
                column.insert(*i, g);
            }
        }
    }

    // Tally the in-scope edges.
    let mut per_outlet: Vec<Option<Vec<u64>>> = alloc::vec![None; corpus.outlets().len()];
    let mut excluded_references = 0u64;
    for r in corpus.references() {
        if let Some(media) = filter.media {
            if corpus.outlet(r.outlet).media != media {
                continue;
            }
        }
        if !in_chamber(corpus.legislator(r.legislator)) {
            continue;
        }
        if let Some(w) = filter.window {
            if !w.contains(r.day) {
                continue;
            }
        }
        match column.get(&r.legislator) {
            Some(&g) => {
                per_outlet[r.outlet].get_or_insert_with(|| alloc::vec![0u64; groups.len()])[g] += 1;
            }
            None => excluded_references += 1,
        }
    }

    let rows: Vec<CountRow> = corpus
        .outlets_by_id()
        .filter_map(|outlet| {
            per_outlet[outlet].take().map(|counts| {
                let total = counts.iter().sum();
                CountRow {
                    outlet,
                    counts,
                    total,
                }
            })
        })
        .collect();
    if rows.is_empty() {
        return Err(Error::NoObservations);
    }
    Ok(CountTable {
        group_by,
        groups,
        rows,
        excluded_legislators,
        excluded_references,
    })
}
