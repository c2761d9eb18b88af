//! Artifact serialization: delimited result tables plus a run manifest.
//!
//! Every writer here is deterministic: rows come out in a fixed order and
//! numbers are formatted with Rust's shortest round-trip notation, so running
//! the same command on the same inputs twice produces byte-identical files.
//! The manifest is a plain `key = value` text file recording the tool
//! version, a digest of every input file, and every parameter of the run —
//! but never the wall-clock time — so any output bundle can be replayed.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use slant_core::corpus::{Chamber, Media};
use slant_core::coverage::{MajorParty, Polarity, SectorMatrix, SentimentCorrelation};
use slant_core::dynamics::{ShiftRegression, SlantSeries, Weighting};
use slant_core::genmodel::{EnsembleDistribution, ModelFit};
use slant_core::measures::{BaselineKind, Correction, MeasureKind, ScoreSet};
use slant_core::pooling::CollectiveSlant;

use crate::load::{InputFile, Reject};

/// Artifact file names, fixed so downstream tooling can rely on them.
pub const MANIFEST_FILE: &str = "manifest.txt";
pub const SCORES_FILE: &str = "scores.csv";
pub const POOLED_FILE: &str = "pooled.csv";
pub const SERIES_FILE: &str = "series.csv";
pub const REGRESSION_FILE: &str = "regression.csv";
pub const REGRESSION_POINTS_FILE: &str = "regression_points.csv";
pub const SECTORS_FILE: &str = "sectors.csv";
pub const SENTIMENT_FILE: &str = "sentiment.csv";
pub const SENTIMENT_DENSITY_FILE: &str = "sentiment_density.csv";
pub const SIMULATION_FILE: &str = "simulation.csv";
pub const FIT_FILE: &str = "fit.csv";
pub const FIT_GRID_FILE: &str = "fit_grid.csv";
pub const REJECTS_FILE: &str = "rejects.csv";

/// Marker value for analyses that had nothing to run on.
pub const SKIPPED: &str = "skipped: no input";

/// Canonical number formatting: shortest representation that round-trips.
pub fn num(value: f64) -> String {
    format!("{value}")
}

pub fn media_label(media: Media) -> &'static str {
    match media {
        Media::News => "news",
        Media::Blogs => "blogs",
    }
}

pub fn chamber_label(chamber: Chamber) -> &'static str {
    match chamber {
        Chamber::House => "house",
        Chamber::Senate => "senate",
    }
}

pub fn measure_label(measure: MeasureKind) -> &'static str {
    match measure {
        MeasureKind::Party => "party",
        MeasureKind::Ideology => "ideology",
        MeasureKind::Gender => "gender",
        MeasureKind::FrontRunner => "front-runner",
        MeasureKind::Region => "region",
    }
}

pub fn baseline_label(kind: BaselineKind) -> &'static str {
    match kind {
        BaselineKind::Uniform => "uniform",
        BaselineKind::CongressComposition => "congress",
        BaselineKind::Population => "population",
        BaselineKind::Custom => "custom",
    }
}

pub fn correction_label(correction: Correction) -> &'static str {
    match correction {
        Correction::HaldaneAnscombe => "haldane-anscombe",
        Correction::Disabled => "none",
    }
}

pub fn weighting_label(weighting: Weighting) -> &'static str {
    match weighting {
        Weighting::None => "none",
        Weighting::PostCounts => "post-counts",
    }
}

/// Ordered `key = value` record of one run.
#[derive(Debug, Clone, Default)]
pub struct Manifest {
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(subcommand: &str) -> Manifest {
        let mut manifest = Manifest::default();
        manifest.push("tool", format!("slant {}", env!("CARGO_PKG_VERSION")));
        manifest.push("manifest_format", "1");
        manifest.push("subcommand", subcommand);
        manifest
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.entries.push((key.into(), value.to_string()));
    }

    /// Records the path and content digest of every consumed input.
    pub fn record_inputs(&mut self, inputs: &[InputFile]) {
        for input in inputs {
            self.push(format!("input.{}", input.role), input.path.display());
            self.push(format!("input.{}.sha256", input.role), &input.sha256);
        }
    }

    /// Records an artifact as written (value = file name) or skipped.
    pub fn artifact(&mut self, name: &str, file: Option<&str>) {
        self.push(format!("artifact.{name}"), file.unwrap_or(SKIPPED));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.entries {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(value);
            out.push('\n');
        }
        out
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

/// The directory one run writes into.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
}

impl OutputDir {
    /// Creates the directory (and parents) if needed.
    pub fn create(path: &Path) -> std::io::Result<OutputDir> {
        std::fs::create_dir_all(path)?;
        Ok(OutputDir {
            root: path.to_path_buf(),
        })
    }

    pub fn path_of(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn write_text(&self, name: &str, content: &str) -> std::io::Result<PathBuf> {
        let path = self.path_of(name);
        let mut file = std::fs::File::create(&path)?;
        file.write_all(content.as_bytes())?;
        file.flush()?;
        Ok(path)
    }

    /// Writes a delimited table with `\n` line endings on every platform.
    pub fn write_csv(
        &self,
        name: &str,
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> std::io::Result<PathBuf> {
        let path = self.path_of(name);
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)?;
        writer.write_record(header)?;
        for row in rows {
            writer.write_record(&row)?;
        }
        writer.flush()?;
        Ok(path)
    }

    pub fn write_manifest(&self, manifest: &Manifest) -> std::io::Result<PathBuf> {
        self.write_text(MANIFEST_FILE, &manifest.render())
    }
}

/// Per-outlet scores, possibly for several measures in one table.
pub fn write_scores(dir: &OutputDir, sets: &[&ScoreSet]) -> std::io::Result<PathBuf> {
    let rows = sets.iter().flat_map(|set| {
        set.scores.iter().map(|s| {
            vec![
                s.outlet_id.clone(),
                media_label(s.media).to_string(),
                measure_label(s.measure).to_string(),
                baseline_label(s.baseline).to_string(),
                num(s.theta),
                num(s.variance),
                s.n_obs.to_string(),
            ]
        })
    });
    dir.write_csv(
        SCORES_FILE,
        &[
            "outlet_id",
            "media",
            "measure",
            "baseline",
            "theta",
            "variance",
            "n_obs",
        ],
        rows,
    )
}

/// One pooled estimate per (media, chamber, measure) cell. Cells whose pool
/// could not be computed keep their coordinates and carry the reason in the
/// status column.
#[derive(Debug, Clone)]
pub struct PooledRow {
    pub media: Media,
    pub chamber: Chamber,
    pub measure: MeasureKind,
    pub baseline: BaselineKind,
    pub outcome: Result<CollectiveSlant, String>,
}

pub fn write_pooled(dir: &OutputDir, rows: &[PooledRow]) -> std::io::Result<PathBuf> {
    let records = rows.iter().map(|row| {
        let mut record = vec![
            media_label(row.media).to_string(),
            chamber_label(row.chamber).to_string(),
            measure_label(row.measure).to_string(),
            baseline_label(row.baseline).to_string(),
        ];
        match &row.outcome {
            Ok(pooled) => {
                record.extend([
                    num(pooled.theta),
                    num(pooled.variance.sqrt()),
                    num(pooled.ci_low),
                    num(pooled.ci_high),
                    num(pooled.tau2),
                    pooled.n_outlets.to_string(),
                    "ok".to_string(),
                ]);
            }
            Err(reason) => {
                record.extend(std::iter::repeat_with(String::new).take(6));
                record.push(reason.clone());
            }
        }
        record
    });
    dir.write_csv(
        POOLED_FILE,
        &[
            "media",
            "chamber",
            "measure",
            "baseline",
            "theta",
            "sd",
            "ci_low",
            "ci_high",
            "tau2",
            "n_outlets",
            "status",
        ],
        records,
    )
}

/// Windowed series, one row per evaluated window, labeled by end date.
/// Gap positions are absent; their count belongs in the manifest.
pub fn write_series(dir: &OutputDir, series: &SlantSeries) -> std::io::Result<PathBuf> {
    let rows = series.points.iter().map(|point| {
        vec![
            point.window_end.to_string(),
            num(point.pooled.theta),
            num(point.pooled.variance.sqrt()),
            point.pooled.n_outlets.to_string(),
        ]
    });
    dir.write_csv(SERIES_FILE, &["date", "theta", "sd", "n_outlets"], rows)
}

/// Fit parameters of a two-period shift regression (single row).
pub fn write_regression(dir: &OutputDir, reg: &ShiftRegression) -> std::io::Result<PathBuf> {
    let row = vec![
        reg.period1.start.to_string(),
        reg.period1.end.to_string(),
        reg.period2.start.to_string(),
        reg.period2.end.to_string(),
        weighting_label(reg.weighting).to_string(),
        num(reg.slope),
        num(reg.intercept),
        num(reg.slope_se),
        num(reg.intercept_se),
        reg.points.len().to_string(),
        reg.dropped_one_period.to_string(),
    ];
    dir.write_csv(
        REGRESSION_FILE,
        &[
            "period1_start",
            "period1_end",
            "period2_start",
            "period2_end",
            "weighting",
            "slope",
            "intercept",
            "slope_se",
            "intercept_se",
            "n_outlets",
            "dropped_one_period",
        ],
        [row],
    )
}

/// Per-outlet (initial slant, slant change) points behind the regression.
pub fn write_regression_points(dir: &OutputDir, reg: &ShiftRegression) -> std::io::Result<PathBuf> {
    let rows = reg.points.iter().map(|p| {
        vec![
            p.outlet_id.clone(),
            num(p.theta_t1),
            num(p.delta_theta),
            p.post_n.to_string(),
        ]
    });
    dir.write_csv(
        REGRESSION_POINTS_FILE,
        &["outlet_id", "theta_t1", "delta_theta", "post_n"],
        rows,
    )
}

/// Labeled 4x4 sector-to-sector hyperlink matrix.
pub fn write_sectors(dir: &OutputDir, matrix: &SectorMatrix) -> std::io::Result<PathBuf> {
    let header: Vec<&str> = std::iter::once("from")
        .chain(matrix.labels.iter().copied())
        .collect();
    let rows = matrix
        .labels
        .iter()
        .zip(&matrix.counts)
        .map(|(label, row)| {
            std::iter::once(label.to_string())
                .chain(row.iter().map(u64::to_string))
                .collect()
        });
    dir.write_csv(SECTORS_FILE, &header, rows)
}

/// One correlation per (media, party) cell at the chosen polarity. Cells
/// that could not be computed keep their coordinates and carry the reason.
#[derive(Debug, Clone)]
pub struct SentimentRow {
    pub media: Media,
    pub party: MajorParty,
    pub polarity: Polarity,
    pub outcome: Result<SentimentCorrelation, String>,
}

pub fn write_sentiment(dir: &OutputDir, rows: &[SentimentRow]) -> std::io::Result<PathBuf> {
    let records = rows.iter().map(|row| {
        let mut record = vec![
            media_label(row.media).to_string(),
            row.party.label().to_string(),
            row.polarity.label().to_string(),
        ];
        match &row.outcome {
            Ok(c) => record.extend([
                num(c.r),
                num(c.p_value),
                c.n_points.to_string(),
                "ok".to_string(),
            ]),
            Err(reason) => {
                record.extend(std::iter::repeat_with(String::new).take(3));
                record.push(reason.clone());
            }
        }
        record
    });
    dir.write_csv(
        SENTIMENT_FILE,
        &[
            "media", "party", "polarity", "r", "p_value", "n_points", "status",
        ],
        records,
    )
}

/// Sparse nonzero cells of each correlation's 2-D density, with explicit bin
/// edges so the grids can be redrawn exactly. x is slant, y is sentiment.
pub fn write_sentiment_density(
    dir: &OutputDir,
    correlations: &[&SentimentCorrelation],
) -> std::io::Result<PathBuf> {
    let mut rows = Vec::new();
    for c in correlations {
        let media = c.media.map_or("all", media_label);
        let hist = &c.density;
        for (xi, column) in hist.counts.iter().enumerate() {
            for (yi, &count) in column.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                rows.push(vec![
                    media.to_string(),
                    c.party.label().to_string(),
                    c.polarity.label().to_string(),
                    xi.to_string(),
                    yi.to_string(),
                    num(hist.x_edges[xi]),
                    num(hist.x_edges[xi + 1]),
                    num(hist.y_edges[yi]),
                    num(hist.y_edges[yi + 1]),
                    count.to_string(),
                ]);
            }
        }
    }
    dir.write_csv(
        SENTIMENT_DENSITY_FILE,
        &[
            "media", "party", "polarity", "x_bin", "y_bin", "x_low", "x_high", "y_low", "y_high",
            "count",
        ],
        rows,
    )
}

/// Pooled per-legislator count histogram of a simulation ensemble.
pub fn write_simulation(
    dir: &OutputDir,
    distribution: &EnsembleDistribution,
) -> std::io::Result<PathBuf> {
    let rows = distribution.histogram.iter().map(|(&n, &slots)| {
        vec![
            n.to_string(),
            slots.to_string(),
            num(distribution.probability(n)),
        ]
    });
    dir.write_csv(SIMULATION_FILE, &["n", "legislators", "probability"], rows)
}

/// Model-fit summary (single row): best q plus the comparison fits.
pub fn write_fit(dir: &OutputDir, fit: &ModelFit) -> std::io::Result<PathBuf> {
    let row = vec![
        num(fit.q_hat),
        num(fit.ks_model),
        num(fit.poisson_lambda),
        num(fit.poisson_ks),
        num(fit.lognormal_mu),
        num(fit.lognormal_sigma),
        num(fit.lognormal_ks),
    ];
    dir.write_csv(
        FIT_FILE,
        &[
            "q_hat",
            "ks_model",
            "poisson_lambda",
            "poisson_ks",
            "lognormal_mu",
            "lognormal_sigma",
            "lognormal_ks",
        ],
        [row],
    )
}

/// KS distance at every scanned q, for fit diagnostics.
pub fn write_fit_grid(dir: &OutputDir, fit: &ModelFit) -> std::io::Result<PathBuf> {
    let rows = fit.grid_ks.iter().map(|&(q, ks)| vec![num(q), num(ks)]);
    dir.write_csv(FIT_GRID_FILE, &["q", "ks"], rows)
}

/// Rows skipped by a lenient load.
pub fn write_rejects(dir: &OutputDir, rejects: &[Reject]) -> std::io::Result<PathBuf> {
    let rows = rejects
        .iter()
        .map(|r| vec![r.file.clone(), r.line.to_string(), r.reason.clone()]);
    dir.write_csv(REJECTS_FILE, &["file", "line", "reason"], rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_render_shortest_and_round_trip() {
        assert_eq!(num(0.5), "0.5");
        assert_eq!(num(-3.0445224377234226), "-3.0445224377234226");
        assert_eq!(num(2.0), "2");
        let value = 0.1 + 0.2;
        assert_eq!(num(value).parse::<f64>().unwrap(), value);
    }

    #[test]
    fn manifest_renders_ordered_key_value_lines() {
        let mut manifest = Manifest::new("score");
        manifest.push("param.measure", "party");
        manifest.artifact("scores", Some(SCORES_FILE));
        manifest.artifact("sectors", None);
        let text = manifest.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            format!("tool = slant {}", env!("CARGO_PKG_VERSION"))
        );
        assert_eq!(lines[1], "manifest_format = 1");
        assert_eq!(lines[2], "subcommand = score");
        assert_eq!(lines[3], "param.measure = party");
        assert_eq!(lines[4], "artifact.scores = scores.csv");
        assert_eq!(lines[5], "artifact.sectors = skipped: no input");
    }
}
