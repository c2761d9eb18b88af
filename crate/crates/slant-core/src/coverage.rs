//! Coverage structure around the party slant sign: the 4-sector hyperlink
//! matrix and the sentiment-versus-slant correlation.

use alloc::vec::Vec;

use crate::corpus::{Corpus, Media, Party};
use crate::error::Error;
use crate::math;
use crate::measures::SlantScore;
use crate::stats;

/// A media-type x slant-sign class of outlets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    NewsR,
    NewsD,
    BlogsR,
    BlogsD,
}

impl Sector {
    pub const ALL: [Sector; 4] = [Sector::NewsR, Sector::NewsD, Sector::BlogsR, Sector::BlogsD];

    pub fn label(self) -> &'static str {
        match self {
            Sector::NewsR => "News-R",
            Sector::NewsD => "News-D",
            Sector::BlogsR => "Blogs-R",
            Sector::BlogsD => "Blogs-D",
        }
    }

    fn index(self) -> usize {
        match self {
            Sector::NewsR => 0,
            Sector::NewsD => 1,
            Sector::BlogsR => 2,
            Sector::BlogsD => 3,
        }
    }

    /// Sector for an outlet, or `None` when theta is exactly zero (a sign
    /// split cannot place ties).
    pub fn of(media: Media, theta: f64) -> Option<Sector> {
        if theta > 0.0 {
            Some(match media {
                Media::News => Sector::NewsD,
                Media::Blogs => Sector::BlogsD,
            })
        } else if theta < 0.0 {
            Some(match media {
                Media::News => Sector::NewsR,
                Media::Blogs => Sector::BlogsR,
            })
        } else {
            None
        }
    }
}

/// Hyperlink counts between the four (media, slant-sign) sectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorMatrix {
    /// Row/column labels, in matrix order.
    pub labels: [&'static str; 4],
    /// `counts[i][j]` = links from sector i to sector j.
    pub counts: [[u64; 4]; 4],
    /// Links with at least one endpoint that has no sector: its outlet is
    /// unscored or its theta is exactly zero.
    pub unclassified: u64,
}

impl SectorMatrix {
    /// Total links seen: classified cells plus unclassified remainder.
    pub fn total_links(&self) -> u64 {
        self.counts.iter().flatten().sum::<u64>() + self.unclassified
    }
}

/// Builds the sector-to-sector hyperlink count matrix.
///
/// Each outlet is assigned a sector from its media type and the sign of its
/// party slant score; every link whose endpoints are both classified
/// increments one cell, and the rest are counted as unclassified.
pub fn sector_matrix(corpus: &Corpus, party_scores: &[SlantScore]) -> Result<SectorMatrix, Error> {
    let Some(links) = corpus.hyperlinks() else {
        return Err(Error::NoHyperlinkData);
    };
    let mut sector_of_outlet: Vec<Option<Sector>> = alloc::vec![None; corpus.outlets().len()];
    for s in party_scores {
        let Some(i) = corpus.outlet_by_id(&s.outlet_id) else {
            return Err(Error::UnknownOutlet {
                id: s.outlet_id.clone(),
            });
        };
        sector_of_outlet[i] = Sector::of(corpus.outlet(i).media, s.theta);
    }

    let mut counts = [[0u64; 4]; 4];
    let mut unclassified = 0u64;
    for link in links {
        match (sector_of_outlet[link.source], sector_of_outlet[link.target]) {
            (Some(a), Some(b)) => counts[a.index()][b.index()] += 1,
            _ => unclassified += 1,
        }
    }
    Ok(SectorMatrix {
        labels: Sector::ALL.map(Sector::label),
        counts,
        unclassified,
    })
}

/// The two parties that carry a slant sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MajorParty {
    D,
    R,
}

impl MajorParty {
    pub fn label(self) -> &'static str {
        match self {
            MajorParty::D => "D",
            MajorParty::R => "R",
        }
    }

    fn matches(self, party: Party) -> bool {
        matches!(
            (self, party),
            (MajorParty::D, Party::D) | (MajorParty::R, Party::R)
        )
    }
}

/// Which sentiment intensity to analyze.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    pub fn label(self) -> &'static str {
        match self {
            Polarity::Negative => "negative",
            Polarity::Positive => "positive",
        }
    }
}

/// An equal-width 2-D histogram with explicit bin edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram2d {
    /// `x_bins + 1` ascending edges.
    pub x_edges: Vec<f64>,
    pub y_edges: Vec<f64>,
    /// `counts[xi][yi]` over the bin grid.
    pub counts: Vec<Vec<u64>>,
}

impl Histogram2d {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn build(points: &[(f64, f64)], bins: usize) -> Histogram2d {
        let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for &(x, y) in points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
        let edges = |lo: f64, hi: f64| -> Vec<f64> {
            (0..=bins)
                .map(|i| lo + (hi - lo) * i as f64 / bins as f64)
                .collect()
        };
        let mut counts = alloc::vec![alloc::vec![0u64; bins]; bins];
        let index = |v: f64, lo: f64, hi: f64| -> usize {
            let raw = (v - lo) / (hi - lo) * bins as f64;
            (math::floor(raw) as usize).min(bins - 1)
        };
        for &(x, y) in points {
            counts[index(x, x_min, x_max)][index(y, y_min, y_max)] += 1;
        }
        Histogram2d {
            x_edges: edges(x_min, x_max),
            y_edges: edges(y_min, y_max),
            counts,
        }
    }
}

/// Default bin count per axis for the slant-sentiment density.
pub const DENSITY_BINS: usize = 40;

/// Correlation between outlet slant and aggregated sentiment toward one party.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentCorrelation {
    pub media: Option<Media>,
    pub party: MajorParty,
    pub polarity: Polarity,
    pub r: f64,
    pub p_value: f64,
    pub n_points: usize,
    /// One (theta, mean sentiment) point per analyzed outlet, in score order.
    pub points: Vec<(f64, f64)>,
    /// Joint density of the points on a `DENSITY_BINS`-square grid.
    pub density: Histogram2d,
}

/// Correlates party slant with per-outlet mean sentiment toward `party`.
///
/// Each scored outlet contributes one point: its theta, and the
/// reference-count-weighted mean of its sentiment values over that party's
/// legislators. Outlets with no weighted sentiment toward the party are
/// skipped. Significance is the two-sided t-test p-value on n-2 degrees of
/// freedom.
pub fn sentiment_correlation(
    corpus: &Corpus,
    party_scores: &[SlantScore],
    polarity: Polarity,
    party: MajorParty,
    media: Option<Media>,
) -> Result<SentimentCorrelation, Error> {
    let Some(sentiments) = corpus.sentiments() else {
        return Err(Error::NoSentimentData);
    };

    // Reference counts per (outlet, legislator) pair, used as weights.
    let n_outlets = corpus.outlets().len();
    let mut ref_count: alloc::collections::BTreeMap<(usize, usize), u64> =
        alloc::collections::BTreeMap::new();
    for r in corpus.references() {
        *ref_count.entry((r.outlet, r.legislator)).or_insert(0) += 1;
    }

    // Weighted sentiment sums per outlet, restricted to the party.
    let mut weight_sum = alloc::vec![0.0f64; n_outlets];
    let mut value_sum = alloc::vec![0.0f64; n_outlets];
    for s in sentiments {
        if !party.matches(corpus.legislator(s.legislator).party) {
            continue;
        }
        let w = ref_count
            .get(&(s.outlet, s.legislator))
            .copied()
            .unwrap_or(0) as f64;
        if w == 0.0 {
            continue;
        }
        let value = match polarity {
            Polarity::Negative => s.negative,
            Polarity::Positive => s.positive,
        };
        weight_sum[s.outlet] += w;
        value_sum[s.outlet] += w * value;
    }

    let mut points = Vec::new();
    for s in party_scores {
        if media.is_some_and(|m| m != s.media) {
            continue;
        }
        let Some(i) = corpus.outlet_by_id(&s.outlet_id) else {
            return Err(Error::UnknownOutlet {
                id: s.outlet_id.clone(),
            });
        };
        if weight_sum[i] > 0.0 {
            points.push((s.theta, value_sum[i] / weight_sum[i]));
        }
    }

    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (r, p_value) = stats::pearson(&x, &y)?;
    let density = Histogram2d::build(&points, DENSITY_BINS);
    Ok(SentimentCorrelation {
        media,
        party,
        polarity,
        r,
        p_value,
        n_points: points.len(),
        points,
        density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Chamber, CorpusBuilder, Gender, Legislator, Media, Party};
    use crate::date::Day;
    use crate::measures::{BaselineKind, MeasureKind};
    use alloc::format;
    use alloc::string::ToString;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn leg(id: &str, party: Party) -> Legislator {
        Legislator {
            id: id.to_string(),
            name: id.to_string(),
            party,
            chamber: Chamber::House,
            state: "CA".to_string(),
            gender: Gender::F,
            ideology: None,
            population: None,
        }
    }

    fn score(outlet_id: &str, media: Media, theta: f64) -> SlantScore {
        SlantScore {
            outlet_id: outlet_id.to_string(),
            media,
            measure: MeasureKind::Party,
            theta,
            variance: 0.1,
            n_obs: 50,
            baseline: BaselineKind::Uniform,
        }
    }

    fn corpus_with_links(outlets: &[(&str, Media)], links: &[(&str, &str)]) -> Corpus {
        let mut b = Corpus::builder();
        for &(id, media) in outlets {
            b.add_outlet(id, media).unwrap();
        }
        b.add_legislator(leg("dem", Party::D)).unwrap();
        for (i, &(id, _)) in outlets.iter().enumerate() {
            b.add_reference(id, "dem", Day(i as i32 % 3), &format!("a{i}"))
                .unwrap();
        }
        for (i, &(src, dst)) in links.iter().enumerate() {
            b.add_hyperlink(src, dst, Day(i as i32 % 3)).unwrap();
        }
        b.finish().unwrap()
    }

    #[test]
    fn single_flow_fixture_fills_one_cell() {
        let c = corpus_with_links(
            &[("bd", Media::Blogs), ("nd", Media::News)],
            &[("bd", "nd"), ("bd", "nd"), ("bd", "nd")],
        );
        let scores = [
            score("bd", Media::Blogs, 0.8),
            score("nd", Media::News, 0.3),
        ];
        let m = sector_matrix(&c, &scores).unwrap();
        let mut expect = [[0u64; 4]; 4];
        expect[Sector::BlogsD.index()][Sector::NewsD.index()] = 3;
        assert_eq!(m.counts, expect);
        assert_eq!(m.unclassified, 0);
        assert_eq!(m.total_links(), 3);
        assert_eq!(m.labels, ["News-R", "News-D", "Blogs-R", "Blogs-D"]);
    }

    #[test]
    fn random_link_set_matches_brute_force_tally() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let outlets: Vec<(alloc::string::String, Media, f64)> = (0..8)
            .map(|i| {
                let media = if rng.random_bool(0.5) {
                    Media::News
                } else {
                    Media::Blogs
                };
                // Mix of positive, negative, and one exactly-zero theta.
                let theta = if i == 3 {
                    0.0
                } else {
                    rng.random_range(-1.0..1.0)
                };
                (format!("o{i}"), media, theta)
            })
            .collect();
        let named: Vec<(&str, Media)> =
            outlets.iter().map(|(id, m, _)| (id.as_str(), *m)).collect();
        let links: Vec<(usize, usize)> = (0..60)
            .map(|_| (rng.random_range(0..8), rng.random_range(0..8)))
            .collect();
        let link_names: Vec<(&str, &str)> = links
            .iter()
            .map(|&(a, b)| (named[a].0, named[b].0))
            .collect();
        let c = corpus_with_links(&named, &link_names);
        // Leave outlet o5 unscored to exercise that path too.
        let scores: Vec<SlantScore> = outlets
            .iter()
            .filter(|(id, _, _)| id != "o5")
            .map(|(id, m, t)| score(id, *m, *t))
            .collect();
        let m = sector_matrix(&c, &scores).unwrap();

        // Independent tally straight off the edge list.
        let mut expect = [[0u64; 4]; 4];
        let mut unclassified = 0u64;
        let classify = |i: usize| -> Option<Sector> {
            let (id, media, theta) = &outlets[i];
            if id == "o5" {
                None
            } else {
                Sector::of(*media, *theta)
            }
        };
        for &(a, b) in &links {
            match (classify(a), classify(b)) {
                (Some(x), Some(y)) => expect[x.index()][y.index()] += 1,
                _ => unclassified += 1,
            }
        }
        assert_eq!(m.counts, expect);
        assert_eq!(m.unclassified, unclassified);
        assert_eq!(m.total_links(), 60);
        assert!(
            m.unclassified > 0,
            "fixture should exercise unclassified links"
        );
    }

    #[test]
    fn missing_link_table_is_distinguishable() {
        let mut b = Corpus::builder();
        b.add_outlet("o", Media::News).unwrap();
        b.add_legislator(leg("dem", Party::D)).unwrap();
        b.add_reference("o", "dem", Day(0), "a").unwrap();
        let c = b.finish().unwrap();
        assert_eq!(
            sector_matrix(&c, &[score("o", Media::News, 0.5)]),
            Err(Error::NoHyperlinkData)
        );
    }

    fn sentiment_corpus() -> Corpus {
        let mut b = Corpus::builder();
        for id in ["m1", "m2", "m3", "m4"] {
            b.add_outlet(id, Media::News).unwrap();
        }
        b.add_outlet("b1", Media::Blogs).unwrap();
        b.add_legislator(leg("d1", Party::D)).unwrap();
        b.add_legislator(leg("d2", Party::D)).unwrap();
        b.add_legislator(leg("r1", Party::R)).unwrap();
        let mut article = 0usize;
        let mut refs = |b: &mut CorpusBuilder, outlet: &str, legislator: &str, n: usize| {
            for _ in 0..n {
                b.add_reference(
                    outlet,
                    legislator,
                    Day(article as i32 % 5),
                    &format!("a{article}"),
                )
                .unwrap();
                article += 1;
            }
        };
        for outlet in ["m1", "m2", "m3", "m4", "b1"] {
            refs(&mut b, outlet, "d1", 3);
            refs(&mut b, outlet, "d2", 1);
            refs(&mut b, outlet, "r1", 2);
        }
        b.add_sentiment("m1", "d1", 0.10, 0.5).unwrap();
        b.add_sentiment("m2", "d1", 0.20, 0.5).unwrap();
        b.add_sentiment("m3", "d1", 0.30, 0.5).unwrap();
        b.add_sentiment("m4", "d1", 0.40, 0.5).unwrap();
        b.add_sentiment("b1", "d1", 0.90, 0.5).unwrap();
        b.add_sentiment("m1", "r1", 0.40, 0.5).unwrap();
        b.add_sentiment("m2", "r1", 0.30, 0.5).unwrap();
        b.add_sentiment("m3", "r1", 0.20, 0.5).unwrap();
        b.add_sentiment("m4", "r1", 0.10, 0.5).unwrap();
        b.finish().unwrap()
    }

    #[test]
    fn exact_linear_relation_gives_r_one() {
        let c = sentiment_corpus();
        // Sentiments above were chosen as 0.1 * theta + 0.25 for these thetas.
        let thetas = [-1.5, -0.5, 0.5, 1.5];
        let scores: Vec<SlantScore> = ["m1", "m2", "m3", "m4"]
            .iter()
            .zip(thetas)
            .map(|(id, t)| score(id, Media::News, t))
            .collect();
        let out = sentiment_correlation(
            &c,
            &scores,
            Polarity::Negative,
            MajorParty::D,
            Some(Media::News),
        )
        .unwrap();
        assert_eq!(out.n_points, 4);
        assert_relative_eq!(out.r, 1.0, epsilon = 1e-12);
        assert!(out.p_value < 1e-12);
        for (i, &(x, y)) in out.points.iter().enumerate() {
            assert_relative_eq!(x, thetas[i], epsilon = 1e-12);
            assert_relative_eq!(y, 0.1 * thetas[i] + 0.25, epsilon = 1e-12);
        }
    }

    #[test]
    fn sign_structure_fixture_has_opposite_party_correlations() {
        let c = sentiment_corpus();
        let thetas = [-1.5, -0.5, 0.5, 1.5];
        let scores: Vec<SlantScore> = ["m1", "m2", "m3", "m4"]
            .iter()
            .zip(thetas)
            .map(|(id, t)| score(id, Media::News, t))
            .collect();
        let d =
            sentiment_correlation(&c, &scores, Polarity::Negative, MajorParty::D, None).unwrap();
        let r =
            sentiment_correlation(&c, &scores, Polarity::Negative, MajorParty::R, None).unwrap();
        assert!(
            d.r > 0.0,
            "negative D-sentiment rises with theta: r = {}",
            d.r
        );
        assert!(
            r.r < 0.0,
            "negative R-sentiment falls with theta: r = {}",
            r.r
        );
    }

    #[test]
    fn aggregation_weights_by_reference_counts() {
        let mut b = Corpus::builder();
        for id in ["x", "y", "z"] {
            b.add_outlet(id, Media::News).unwrap();
        }
        b.add_legislator(leg("d1", Party::D)).unwrap();
        b.add_legislator(leg("d2", Party::D)).unwrap();
        let mut article = 0usize;
        // Outlet x references d1 three times and d2 once.
        for (outlet, legislator, n) in [
            ("x", "d1", 3),
            ("x", "d2", 1),
            ("y", "d1", 2),
            ("z", "d2", 2),
        ] {
            for _ in 0..n {
                b.add_reference(outlet, legislator, Day(0), &format!("a{article}"))
                    .unwrap();
                article += 1;
            }
        }
        b.add_sentiment("x", "d1", 0.8, 0.1).unwrap();
        b.add_sentiment("x", "d2", 0.4, 0.1).unwrap();
        b.add_sentiment("y", "d1", 0.5, 0.1).unwrap();
        b.add_sentiment("z", "d2", 0.3, 0.1).unwrap();
        let c = b.finish().unwrap();
        let scores = [
            score("x", Media::News, 0.2),
            score("y", Media::News, -0.4),
            score("z", Media::News, 0.9),
        ];
        let out =
            sentiment_correlation(&c, &scores, Polarity::Negative, MajorParty::D, None).unwrap();
        // x's point: (3*0.8 + 1*0.4) / 4 = 0.7.
        let x_point = out.points.iter().find(|p| p.0 == 0.2).unwrap();
        assert_relative_eq!(x_point.1, 0.7, epsilon = 1e-12);
        let expect = stats::pearson(&[0.2, -0.4, 0.9], &[0.7, 0.5, 0.3]).unwrap();
        assert_relative_eq!(out.r, expect.0, epsilon = 1e-12);
        assert_relative_eq!(out.p_value, expect.1, epsilon = 1e-12);
    }

    #[test]
    fn histogram_mass_equals_point_count_and_edges_span_data() {
        let c = sentiment_corpus();
        let thetas = [-1.5, -0.5, 0.5, 1.5];
        let scores: Vec<SlantScore> = ["m1", "m2", "m3", "m4"]
            .iter()
            .zip(thetas)
            .map(|(id, t)| score(id, Media::News, t))
            .collect();
        let out =
            sentiment_correlation(&c, &scores, Polarity::Negative, MajorParty::D, None).unwrap();
        assert_eq!(out.density.total(), out.n_points as u64);
        assert_eq!(out.density.x_edges.len(), DENSITY_BINS + 1);
        assert_eq!(out.density.y_edges.len(), DENSITY_BINS + 1);
        assert_eq!(out.density.counts.len(), DENSITY_BINS);
        assert_relative_eq!(out.density.x_edges[0], -1.5);
        assert_relative_eq!(out.density.x_edges[DENSITY_BINS], 1.5);
        // The maximum point lands in the last bin, not out of range.
        assert_eq!(out.density.counts[DENSITY_BINS - 1].iter().sum::<u64>(), 1);
    }

    #[test]
    fn sentiment_error_paths() {
        let c = sentiment_corpus();
        // Only two scored outlets have D sentiment -> too few points.
        let scores = [score("m1", Media::News, 0.1), score("m2", Media::News, 0.4)];
        assert_eq!(
            sentiment_correlation(&c, &scores, Polarity::Negative, MajorParty::D, None),
            Err(Error::TooFewPoints { got: 2 })
        );
        // Constant theta -> zero variance on the slant axis.
        let scores = [
            score("m1", Media::News, 0.3),
            score("m2", Media::News, 0.3),
            score("m3", Media::News, 0.3),
        ];
        assert_eq!(
            sentiment_correlation(&c, &scores, Polarity::Negative, MajorParty::D, None),
            Err(Error::ZeroVariance { axis: "x" })
        );
        // No sentiment table at all.
        let mut b = Corpus::builder();
        b.add_outlet("o", Media::News).unwrap();
        b.add_legislator(leg("dem", Party::D)).unwrap();
        b.add_reference("o", "dem", Day(0), "a").unwrap();
        let bare = b.finish().unwrap();
        assert_eq!(
            sentiment_correlation(
                &bare,
                &[score("o", Media::News, 0.5)],
                Polarity::Negative,
                MajorParty::D,
                None
            ),
            Err(Error::NoSentimentData)
        );
    }

    #[test]
    fn positive_polarity_reads_the_other_field() {
        let mut b = Corpus::builder();
        for id in ["x", "y", "z"] {
            b.add_outlet(id, Media::News).unwrap();
        }
        b.add_legislator(leg("d1", Party::D)).unwrap();
        for (i, outlet) in ["x", "y", "z"].iter().enumerate() {
            b.add_reference(outlet, "d1", Day(0), &format!("a{i}"))
                .unwrap();
        }
        b.add_sentiment("x", "d1", 0.9, 0.1).unwrap();
        b.add_sentiment("y", "d1", 0.8, 0.2).unwrap();
        b.add_sentiment("z", "d1", 0.7, 0.3).unwrap();
        let c = b.finish().unwrap();
        let scores = [
            score("x", Media::News, -1.0),
            score("y", Media::News, 0.0),
            score("z", Media::News, 1.0),
        ];
        let neg =
            sentiment_correlation(&c, &scores, Polarity::Negative, MajorParty::D, None).unwrap();
        let pos =
            sentiment_correlation(&c, &scores, Polarity::Positive, MajorParty::D, None).unwrap();
        assert_relative_eq!(neg.r, -1.0, epsilon = 1e-12);
        assert_relative_eq!(pos.r, 1.0, epsilon = 1e-12);
    }
}
