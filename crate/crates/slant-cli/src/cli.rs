//! The `slant` binary: argument parsing, subcommand dispatch, exit codes.
//!
//! Exit codes: 0 success, 1 analysis could not produce a result (for example
//! too few scoreable outlets), 2 unreadable or invalid input data / output
//! IO failure, 3 usage error.
//!
//! Every subcommand writes its artifact tables plus a `manifest.txt` into the
//! output directory (`--output-dir`, or the `SLANT_OUTPUT_DIR` environment
//! variable). All outputs are deterministic: rerunning a command with the
//! same inputs, parameters, and seed reproduces every file byte for byte,
//! at any `--threads` setting.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use slant_core::corpus::{Chamber, Corpus, Media};
use slant_core::coverage::{self, MajorParty, Polarity};
use slant_core::dynamics::{self, Weighting};
use slant_core::genmodel::{self, SimConfig};
use slant_core::measures::{self, BaselineChoice, Correction, MeasureKind, ScoreFilter, ScoreSet};
use slant_core::pooling;
use slant_core::{DateWindow, Day};

use crate::load::{self, CorpusPaths, InputFile, LoadOptions, Loaded};
use crate::report::{
    self, baseline_label, chamber_label, correction_label, measure_label, media_label,
    weighting_label, Manifest, OutputDir, PooledRow, SentimentRow,
};

/// Batch analysis of how media outlets cite members of Congress: per-outlet
/// slant scores, pooled media-wide estimates, time dynamics, hyperlink and
/// sentiment structure, and a generative model of citation counts.
#[derive(Debug, Parser)]
#[command(name = "slant", version, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score each outlet's slant on one measure
    Score(ScoreCmd),
    /// Pool outlet scores into collective slant per media, chamber, measure
    Pool(PoolCmd),
    /// Collective slant on a sliding date window
    Dynamics(DynamicsCmd),
    /// Regress per-outlet slant change between two periods on initial slant
    Shift(ShiftCmd),
    /// Cross-tabulate hyperlinks between (media, slant-sign) sectors
    Links(LinksCmd),
    /// Correlate outlet slant with sentiment toward each major party
    Sentiment(SentimentCmd),
    /// Run the preferential-attachment citation model
    Simulate(SimulateCmd),
    /// Fit the citation model's attachment probability to corpus counts
    Fit(FitCmd),
    /// Run the whole pipeline into one output bundle
    Report(ReportCmd),
}

/// Corpus table paths and load behavior.
#[derive(Debug, Args)]
struct InputArgs {
    /// Outlet table: outlet_id, media
    #[arg(long, value_name = "FILE")]
    outlets: PathBuf,

    /// Legislator table: legislator_id, name, party, chamber, state, gender,
    /// ideology, population
    #[arg(long, value_name = "FILE")]
    legislators: PathBuf,

    /// Reference table: outlet_id, legislator_id, date, article_id
    #[arg(long, value_name = "FILE")]
    references: PathBuf,

    /// Hyperlink table: source_outlet, target_outlet, date
    #[arg(long, value_name = "FILE")]
    hyperlinks: Option<PathBuf>,

    /// Sentiment table: outlet_id, legislator_id, negative, positive
    #[arg(long, value_name = "FILE")]
    sentiments: Option<PathBuf>,

    /// Declared corpus start date; rows dated earlier are invalid
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    date_start: Option<Day>,

    /// Declared corpus end date; rows dated later are invalid
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    date_end: Option<Day>,

    /// Skip invalid rows and report them in rejects.csv instead of aborting
    #[arg(long)]
    lenient: bool,
}

impl InputArgs {
    fn paths(&self) -> CorpusPaths {
        CorpusPaths {
            outlets: self.outlets.clone(),
            legislators: self.legislators.clone(),
            references: self.references.clone(),
            hyperlinks: self.hyperlinks.clone(),
            sentiments: self.sentiments.clone(),
        }
    }

    fn load(&self) -> Result<Loaded, Failure> {
        let declared_range =
            optional_window(self.date_start, self.date_end, "--date-start/--date-end")?;
        let options = LoadOptions {
            lenient: self.lenient,
            declared_range,
        };
        Ok(load::load_corpus(&self.paths(), &options)?)
    }

    fn record(&self, manifest: &mut Manifest, inputs: &[InputFile]) {
        manifest.record_inputs(inputs);
        manifest.push("param.date_start", day_value(self.date_start));
        manifest.push("param.date_end", day_value(self.date_end));
        manifest.push("param.lenient", self.lenient);
    }
}

/// Where artifacts go and how much parallelism to use.
#[derive(Debug, Args)]
struct OutputArgs {
    /// Directory the artifact tables and manifest are written into
    #[arg(
        long,
        value_name = "DIR",
        env = "SLANT_OUTPUT_DIR",
        default_value = "."
    )]
    output_dir: PathBuf,

    /// Worker threads for independent analysis cells; 0 means all cores.
    /// The thread count never changes any output.
    #[arg(long, value_name = "N", default_value_t = 0)]
    threads: usize,
}

impl OutputArgs {
    fn prepare(&self) -> Result<OutputDir, Failure> {
        if self.threads > 0 {
            // A second initialization in the same process is harmless: the
            // pool size only affects scheduling, never results.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(self.threads)
                .build_global();
        }
        Ok(OutputDir::create(&self.output_dir)?)
    }
}

/// Scoring knobs shared by every corpus-analysis subcommand.
#[derive(Debug, Args)]
struct ScoreArgs {
    /// Baseline family; defaults per measure (congress for party, ideology,
    /// and gender; uniform for front-runner and region)
    #[arg(long, value_enum)]
    baseline: Option<BaselineArg>,

    /// Custom baseline table (category, probability); implies
    /// `--baseline custom`
    #[arg(long, value_name = "FILE")]
    baseline_file: Option<PathBuf>,

    /// Restrict to legislators of one chamber
    #[arg(long, value_enum)]
    chamber: Option<ChamberArg>,

    /// Restrict to outlets of one media class
    #[arg(long, value_enum)]
    media: Option<MediaArg>,

    /// Analysis window start date (references outside are ignored)
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    window_start: Option<Day>,

    /// Analysis window end date
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    window_end: Option<Day>,

    /// Minimum reference count for an outlet to be scored
    #[arg(long, value_name = "N", default_value_t = 5)]
    min_obs: u64,

    /// Disable the half-count correction for zero cells; outlets with an
    /// empty cell then count as degenerate instead of being scored
    #[arg(long)]
    no_correction: bool,
}

impl ScoreArgs {
    fn correction(&self) -> Correction {
        if self.no_correction {
            Correction::Disabled
        } else {
            Correction::HaldaneAnscombe
        }
    }

    fn window(&self) -> Result<Option<DateWindow>, Failure> {
        optional_window(
            self.window_start,
            self.window_end,
            "--window-start/--window-end",
        )
    }

    fn filter(&self) -> Result<ScoreFilter, Failure> {
        Ok(ScoreFilter {
            media: self.media.map(MediaArg::media),
            chamber: self.chamber.map(ChamberArg::chamber),
            window: self.window()?,
            min_obs: self.min_obs,
        })
    }

    /// Resolves the baseline for `measure`, loading the custom table at most
    /// once (pass the previous result back in for further measures).
    fn baseline_for(
        &self,
        measure: MeasureKind,
    ) -> Result<(BaselineChoice, Option<InputFile>), Failure> {
        match (self.baseline, &self.baseline_file) {
            (Some(BaselineArg::Custom) | None, Some(path)) => {
                let (baseline, input) = load::load_baseline(path)?;
                Ok((BaselineChoice::Custom(baseline), Some(input)))
            }
            (Some(BaselineArg::Custom), None) => Err(Failure::Usage(
                "--baseline custom requires --baseline-file".into(),
            )),
            (Some(arg), Some(_)) => Err(Failure::Usage(format!(
                "--baseline-file conflicts with --baseline {}",
                arg.label()
            ))),
            (Some(BaselineArg::Uniform), None) => Ok((BaselineChoice::Uniform, None)),
            (Some(BaselineArg::Congress), None) => Ok((BaselineChoice::CongressComposition, None)),
            (Some(BaselineArg::Population), None) => Ok((BaselineChoice::Population, None)),
            (None, None) => Ok((default_baseline(measure), None)),
        }
    }

    fn record(&self, manifest: &mut Manifest, baseline: &BaselineChoice) {
        manifest.push("param.baseline", baseline_label(baseline.kind()));
        manifest.push(
            "param.chamber",
            opt_value(self.chamber.map(|c| chamber_label(c.chamber()))),
        );
        manifest.push(
            "param.media",
            opt_value(self.media.map(|m| media_label(m.media()))),
        );
        manifest.push("param.window_start", day_value(self.window_start));
        manifest.push("param.window_end", day_value(self.window_end));
        manifest.push("param.min_obs", self.min_obs);
        manifest.push("param.correction", correction_label(self.correction()));
    }
}

/// The measure-specific default baseline: seat composition where the
/// categories partition Congress, uniform where they do not.
fn default_baseline(measure: MeasureKind) -> BaselineChoice {
    match measure {
        MeasureKind::Party | MeasureKind::Ideology | MeasureKind::Gender => {
            BaselineChoice::CongressComposition
        }
        MeasureKind::FrontRunner | MeasureKind::Region => BaselineChoice::Uniform,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MeasureArg {
    Party,
    Ideology,
    Gender,
    FrontRunner,
    Region,
}

impl std::fmt::Display for MeasureArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(measure_label(self.kind()))
    }
}

impl MeasureArg {
    const ALL: [MeasureArg; 5] = [
        MeasureArg::Party,
        MeasureArg::Ideology,
        MeasureArg::Gender,
        MeasureArg::FrontRunner,
        MeasureArg::Region,
    ];

    fn kind(self) -> MeasureKind {
        match self {
            MeasureArg::Party => MeasureKind::Party,
            MeasureArg::Ideology => MeasureKind::Ideology,
            MeasureArg::Gender => MeasureKind::Gender,
            MeasureArg::FrontRunner => MeasureKind::FrontRunner,
            MeasureArg::Region => MeasureKind::Region,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaselineArg {
    Uniform,
    Congress,
    Population,
    Custom,
}

impl BaselineArg {
    fn label(self) -> &'static str {
        match self {
            BaselineArg::Uniform => "uniform",
            BaselineArg::Congress => "congress",
            BaselineArg::Population => "population",
            BaselineArg::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChamberArg {
    House,
    Senate,
}

impl ChamberArg {
    fn chamber(self) -> Chamber {
        match self {
            ChamberArg::House => Chamber::House,
            ChamberArg::Senate => Chamber::Senate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MediaArg {
    News,
    Blogs,
}

impl MediaArg {
    fn media(self) -> Media {
        match self {
            MediaArg::News => Media::News,
            MediaArg::Blogs => Media::Blogs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolarityArg {
    Negative,
    Positive,
}

impl PolarityArg {
    fn polarity(self) -> Polarity {
        match self {
            PolarityArg::Negative => Polarity::Negative,
            PolarityArg::Positive => Polarity::Positive,
        }
    }
}

impl std::fmt::Display for PolarityArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.polarity().label())
    }
}

#[derive(Debug, Args)]
struct ScoreCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Slant measure to score
    #[arg(long, value_enum)]
    measure: MeasureArg,
    #[command(flatten)]
    score: ScoreArgs,
}

#[derive(Debug, Args)]
struct PoolCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Pool only this measure (default: all five)
    #[arg(long, value_enum)]
    measure: Option<MeasureArg>,
    #[command(flatten)]
    score: ScoreArgs,
}

#[derive(Debug, Args)]
struct DynamicsCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Slant measure to track
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// Sliding window length in days
    #[arg(long, value_name = "DAYS")]
    window_days: i32,
    /// Days the window advances between evaluations
    #[arg(long, value_name = "DAYS", default_value_t = 1)]
    step_days: i32,
    #[command(flatten)]
    score: ScoreArgs,
}

#[derive(Debug, Args)]
struct ShiftCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Slant measure to compare across the two periods
    #[arg(long, value_enum)]
    measure: MeasureArg,
    /// First period start date
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    period1_start: Day,
    /// First period end date
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    period1_end: Day,
    /// Second period start date
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    period2_start: Day,
    /// Second period end date
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    period2_end: Day,
    /// Weight the regression by each outlet's second-period reference count
    #[arg(long)]
    weight_by_post_counts: bool,
    #[command(flatten)]
    score: ScoreArgs,
}

impl ShiftCmd {
    fn periods(&self) -> Result<(DateWindow, DateWindow), Failure> {
        let p1 = required_window(
            self.period1_start,
            self.period1_end,
            "--period1-start/--period1-end",
        )?;
        let p2 = required_window(
            self.period2_start,
            self.period2_end,
            "--period2-start/--period2-end",
        )?;
        Ok((p1, p2))
    }

    fn weighting(&self) -> Weighting {
        if self.weight_by_post_counts {
            Weighting::PostCounts
        } else {
            Weighting::None
        }
    }
}

#[derive(Debug, Args)]
struct LinksCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    score: ScoreArgs,
}

#[derive(Debug, Args)]
struct SentimentCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Which sentiment share to correlate with slant
    #[arg(long, value_enum, default_value_t = PolarityArg::Negative)]
    polarity: PolarityArg,
    #[command(flatten)]
    score: ScoreArgs,
}

#[derive(Debug, Args)]
struct SimulateCmd {
    #[command(flatten)]
    output: OutputArgs,
    /// Probability a new reference copies an earlier one instead of picking
    /// a legislator uniformly
    #[arg(long)]
    q: f64,
    /// Number of legislators
    #[arg(long, value_name = "N")]
    legislators: usize,
    /// Total references to generate
    #[arg(long, value_name = "N")]
    steps: u64,
    /// Base random seed; realization i uses seed + i
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of realizations to pool
    #[arg(long, value_name = "N", default_value_t = 1)]
    ensemble: usize,
    /// Also estimate the tail exponent over counts >= this cutoff
    #[arg(long, value_name = "N")]
    tail_min: Option<u64>,
}

#[derive(Debug, Args)]
struct FitCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Restrict to references by outlets of one media class
    #[arg(long, value_enum)]
    media: Option<MediaArg>,
    /// Restrict to legislators of one chamber
    #[arg(long, value_enum)]
    chamber: Option<ChamberArg>,
    /// Analysis window start date
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    window_start: Option<Day>,
    /// Analysis window end date
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    window_end: Option<Day>,
    /// Spacing of the scanned attachment-probability grid over [0, 1]
    #[arg(long, value_name = "STEP", default_value_t = 0.05)]
    grid_step: f64,
    /// Simulated realizations pooled per grid point
    #[arg(long, value_name = "N", default_value_t = 100)]
    ensemble: usize,
    /// Base random seed for the simulated ensembles
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also estimate the empirical tail exponent over counts >= this cutoff
    #[arg(long, value_name = "N")]
    tail_min: Option<u64>,
}

#[derive(Debug, Args)]
struct ReportCmd {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Measure for the series and shift-regression artifacts
    #[arg(long, value_enum, default_value_t = MeasureArg::Party)]
    measure: MeasureArg,
    /// Sliding window length for the series artifact
    #[arg(long, value_name = "DAYS", default_value_t = 14)]
    window_days: i32,
    /// Days the series window advances between evaluations
    #[arg(long, value_name = "DAYS", default_value_t = 1)]
    step_days: i32,
    /// Shift-regression first period start (all four period dates together
    /// enable the regression artifact)
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    period1_start: Option<Day>,
    /// Shift-regression first period end
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    period1_end: Option<Day>,
    /// Shift-regression second period start
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    period2_start: Option<Day>,
    /// Shift-regression second period end
    #[arg(long, value_name = "DATE", value_parser = load::parse_day)]
    period2_end: Option<Day>,
    /// Weight the shift regression by second-period reference counts
    #[arg(long)]
    weight_by_post_counts: bool,
    /// Sentiment share used in the correlation artifact
    #[arg(long, value_enum, default_value_t = PolarityArg::Negative)]
    polarity: PolarityArg,
    /// Spacing of the model-fit attachment-probability grid
    #[arg(long, value_name = "STEP", default_value_t = 0.05)]
    grid_step: f64,
    /// Simulated realizations pooled per fit grid point and in the
    /// simulation artifact
    #[arg(long, value_name = "N", default_value_t = 100)]
    ensemble: usize,
    /// Base random seed for all simulation
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    score: ScoreArgs,
}

/// Why a run failed, mapped onto the exit codes above.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] load::LoadError),
    #[error(transparent)]
    Analysis(#[from] slant_core::Error),
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 3,
            Failure::Load(_) | Failure::Io(_) => 2,
            Failure::Analysis(_) => 1,
        }
    }
}

/// Parses the process arguments, runs the subcommand, returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(failure) => {
            eprintln!("slant: error: {failure}");
            failure.exit_code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Score(cmd) => cmd_score(cmd),
        Command::Pool(cmd) => cmd_pool(cmd),
        Command::Dynamics(cmd) => cmd_dynamics(cmd),
        Command::Shift(cmd) => cmd_shift(cmd),
        Command::Links(cmd) => cmd_links(cmd),
        Command::Sentiment(cmd) => cmd_sentiment(cmd),
        Command::Simulate(cmd) => cmd_simulate(cmd),
        Command::Fit(cmd) => cmd_fit(cmd),
        Command::Report(cmd) => cmd_report(cmd),
    }
}

fn cmd_score(cmd: ScoreCmd) -> Result<(), Failure> {
    let dir = cmd.output.prepare()?;
    let loaded = cmd.input.load()?;
    let measure = cmd.measure.kind();
    let (baseline, baseline_input) = cmd.score.baseline_for(measure)?;
    let filter = cmd.score.filter()?;
    let set = measures::measure_outlets(
        &loaded.corpus,
        measure,
        &baseline,
        &filter,
        cmd.score.correction(),
    )?;

    let mut manifest = Manifest::new("score");
    let mut inputs = loaded.inputs.clone();
    inputs.extend(baseline_input);
    cmd.input.record(&mut manifest, &inputs);
    manifest.push("param.measure", measure_label(measure));
    cmd.score.record(&mut manifest, &baseline);
    record_score_counts(&mut manifest, &set);
    let path = report::write_scores(&dir, &[&set])?;
    manifest.artifact("scores", Some(report::SCORES_FILE));
    finish(&dir, manifest, &loaded, cmd.input.lenient, &[path])
}

fn cmd_pool(cmd: PoolCmd) -> Result<(), Failure> {
    let dir = cmd.output.prepare()?;
    let loaded = cmd.input.load()?;
    let correction = cmd.score.correction();
    let window = cmd.score.window()?;
    let measure_set: Vec<MeasureArg> = match cmd.measure {
        Some(one) => vec![one],
        None => MeasureArg::ALL.to_vec(),
    };
    let media_set: Vec<MediaArg> = match cmd.score.media {
        Some(one) => vec![one],
        None => vec![MediaArg::News, MediaArg::Blogs],
    };
    let chamber_set: Vec<ChamberArg> = match cmd.score.chamber {
        Some(one) => vec![one],
        None => vec![ChamberArg::House, ChamberArg::Senate],
    };

    // Resolve each selected measure's baseline up front, so a custom table
    // is read once and flag conflicts surface before any work runs.
    let mut cells = Vec::new();
    let mut baseline_input = None;
    for &measure in &measure_set {
        let (baseline, input) = cmd.score.baseline_for(measure.kind())?;
        baseline_input = baseline_input.or(input);
        for &media in &media_set {
            for &chamber in &chamber_set {
                cells.push((media, chamber, measure, baseline.clone()));
            }
        }
    }

    let corpus = &loaded.corpus;
    let rows: Vec<PooledRow> = cells
        .par_iter()
        .map(|(media, chamber, measure, baseline)| {
            let filter = ScoreFilter {
                media: Some(media.media()),
                chamber: Some(chamber.chamber()),
                window,
                min_obs: cmd.score.min_obs,
            };
            let outcome =
                measures::measure_outlets(corpus, measure.kind(), baseline, &filter, correction)
                    .and_then(|set| pooling::pool(&set.scores))
                    .map_err(|e| e.to_string());
            PooledRow {
                media: media.media(),
                chamber: chamber.chamber(),
                measure: measure.kind(),
                baseline: baseline.kind(),
                outcome,
            }
        })
        .collect();

    let mut manifest = Manifest::new("pool");
    let mut inputs = loaded.inputs.clone();
    inputs.extend(baseline_input);
    cmd.input.record(&mut manifest, &inputs);
    manifest.push(
        "param.measure",
        match cmd.measure {
            Some(one) => measure_label(one.kind()).to_string(),
            None => "all".to_string(),
        },
    );
    manifest.push(
        "param.baseline",
        match cmd.score.baseline {
            Some(arg) => arg.label().to_string(),
            None if cmd.score.baseline_file.is_some() => "custom".to_string(),
            None => "per-measure default".to_string(),
        },
    );
    manifest.push(
        "param.chamber",
        opt_value(cmd.score.chamber.map(|c| chamber_label(c.chamber()))),
    );
    manifest.push(
        "param.media",
        opt_value(cmd.score.media.map(|m| media_label(m.media()))),
    );
    manifest.push("param.window_start", day_value(cmd.score.window_start));
    manifest.push("param.window_end", day_value(cmd.score.window_end));
    manifest.push("param.min_obs", cmd.score.min_obs);
    manifest.push("param.correction", correction_label(correction));
    manifest.push("result.cells", rows.len());
    manifest.push(
        "result.cells_ok",
        rows.iter().filter(|r| r.outcome.is_ok()).count(),
    );
    let path = report::write_pooled(&dir, &rows)?;
    manifest.artifact("pooled", Some(report::POOLED_FILE));
    finish(&dir, manifest, &loaded, cmd.input.lenient, &[path])
}

fn cmd_dynamics(cmd: DynamicsCmd) -> Result<(), Failure> {
    let dir = cmd.output.prepare()?;
    let loaded = cmd.input.load()?;
    let measure = cmd.measure.kind();
    let (baseline, baseline_input) = cmd.score.baseline_for(measure)?;
    let filter = cmd.score.filter()?;
    let series = dynamics::slant_series(
        &loaded.corpus,
        measure,
        &baseline,
        cmd.window_days,
        cmd.step_days,
        &filter,
        cmd.score.correction(),
    )?;

    let mut manifest = Manifest::new("dynamics");
    let mut inputs = loaded.inputs.clone();
    inputs.extend(baseline_input);
    cmd.input.record(&mut manifest, &inputs);
    manifest.push("param.measure", measure_label(measure));
    cmd.score.record(&mut manifest, &baseline);
    manifest.push("param.window_days", cmd.window_days);
    manifest.push("param.step_days", cmd.step_days);
    manifest.push("result.points", series.points.len());
    manifest.push("result.gaps", series.gaps.len());
    let path = report::write_series(&dir, &series)?;
    manifest.artifact("series", Some(report::SERIES_FILE));
    finish(&dir, manifest, &loaded, cmd.input.lenient, &[path])
}

fn cmd_shift(cmd: ShiftCmd) -> Result<(), Failure> {
    let dir = cmd.output.prepare()?;
    let loaded = cmd.input.load()?;
    let measure = cmd.measure.kind();
    let (baseline, baseline_input) = cmd.score.baseline_for(measure)?;
    let filter = cmd.score.filter()?;
    let (period1, period2) = cmd.periods()?;
    let regression = dynamics::shift_regression(
        &loaded.corpus,
        measure,
        &baseline,
        period1,
        period2,
        &filter,
        cmd.score.correction(),
        cmd.weighting(),
    )?;

    let mut manifest = Manifest::new("shift");
    let mut inputs = loaded.inputs.clone();
    inputs.extend(baseline_input);
    cmd.input.record(&mut manifest, &inputs);
    manifest.push("param.measure", measure_label(measure));
    cmd.score.record(&mut manifest, &baseline);
    manifest.push("param.period1_start", period1.start);
    manifest.push("param.period1_end", period1.end);
    manifest.push("param.period2_start", period2.start);
    manifest.push("param.period2_end", period2.end);
    manifest.push("param.weighting", weighting_label(regression.weighting));
    manifest.push("result.outlets", regression.points.len());
    manifest.push("result.dropped_one_period", regression.dropped_one_period);
    let fit_path = report::write_regression(&dir, &regression)?;
    let points_path = report::write_regression_points(&dir, &regression)?;
    manifest.artifact("regression", Some(report::REGRESSION_FILE));
    manifest.artifact("regression_points", Some(report::REGRESSION_POINTS_FILE));
    finish(
        &dir,
        manifest,
        &loaded,
        cmd.input.lenient,
        &[fit_path, points_path],
    )
}

fn cmd_links(cmd: LinksCmd) -> Result<(), Failure> {
    if cmd.input.hyperlinks.is_none() {
        return Err(Failure::Usage("links requires --hyperlinks".into()));
    }
    if cmd.score.media.is_some() {
        return Err(Failure::Usage(
            "links classifies outlets of both media; --media does not apply".into(),
        ));
    }
    let dir = cmd.output.prepare()?;
    let loaded = cmd.input.load()?;
    let (baseline, baseline_input) = cmd.score.baseline_for(MeasureKind::Party)?;
    let filter = cmd.score.filter()?;
    let set = measures::measure_outlets(
        &loaded.corpus,
        MeasureKind::Party,
        &baseline,
        &filter,
        cmd.score.correction(),
    )?;
    let matrix = coverage::sector_matrix(&loaded.corpus, &set.scores)?;

    let mut manifest = Manifest::new("links");
    let mut inputs = loaded.inputs.clone();
    inputs.extend(baseline_input);
    cmd.input.record(&mut manifest, &inputs);
    manifest.push("param.measure", measure_label(MeasureKind::Party));
    cmd.score.record(&mut manifest, &baseline);
    manifest.push("result.total_links", matrix.total_links());
    manifest.push("result.unclassified_links", matrix.unclassified);
    let path = report::write_sectors(&dir, &matrix)?;
    manifest.artifact("sectors", Some(report::SECTORS_FILE));
    finish(&dir, manifest, &loaded, cmd.input.lenient, &[path])
}

/// Sentiment correlations for every requested (media, party) cell, in fixed
/// row order. Cell failures become status strings, not run failures.
fn sentiment_rows(
    corpus: &Corpus,
    scores: &ScoreSet,
    polarity: Polarity,
    media_set: &[MediaArg],
) -> Vec<SentimentRow> {
    let cells: Vec<(MediaArg, MajorParty)> = media_set
        .iter()
        .flat_map(|&m| [(m, MajorParty::D), (m, MajorParty::R)])
        .collect();
    cells
        .par_iter()
        .map(|&(media, party)| SentimentRow {
            media: media.media(),
            party,
            polarity,
            outcome: coverage::sentiment_correlation(
                corpus,
                &scores.scores,
                polarity,
                party,
                Some(media.media()),
            )
            .map_err(|e| e.to_string()),
        })
        .collect()
}

fn cmd_sentiment(cmd: SentimentCmd) -> Result<(), Failure> {
    if cmd.input.sentiments.is_none() {
        return Err(Failure::Usage("sentiment requires --sentiments".into()));
    }
    let dir = cmd.output.prepare()?;
    let loaded = cmd.input.load()?;
    let (baseline, baseline_input) = cmd.score.baseline_for(MeasureKind::Party)?;
    // Score across all outlets; each correlation cell applies its own media
    // restriction.
    let filter = ScoreFilter {
        media: None,
        chamber: cmd.score.chamber.map(ChamberArg::chamber),
        window: cmd.score.window()?,
        min_obs: cmd.score.min_obs,
    };
    let set = measures::measure_outlets(
        &loaded.corpus,
        MeasureKind::Party,
        &baseline,
        &filter,
        cmd.score.correction(),
    )?;
    let media_set: Vec<MediaArg> = match cmd.score.media {
        Some(one) => vec![one],
        None => vec![MediaArg::News, MediaArg::Blogs],
    };
    let rows = sentiment_rows(&loaded.corpus, &set, cmd.polarity.polarity(), &media_set);

    let mut manifest = Manifest::new("sentiment");
    let mut inputs = loaded.inputs.clone();
    inputs.extend(baseline_input);
    cmd.input.record(&mut manifest, &inputs);
    manifest.push("param.measure", measure_label(MeasureKind::Party));
    cmd.score.record(&mut manifest, &baseline);
    manifest.push("param.polarity", cmd.polarity.polarity().label());
    manifest.push("result.cells", rows.len());
    manifest.push(
        "result.cells_ok",
        rows.iter().filter(|r| r.outcome.is_ok()).count(),
    );
    let path = report::write_sentiment(&dir, &rows)?;
    let ok_cells: Vec<_> = rows
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .collect();
    let density_path = report::write_sentiment_density(&dir, &ok_cells)?;
    manifest.artifact("sentiment", Some(report::SENTIMENT_FILE));
    manifest.artifact("sentiment_density", Some(report::SENTIMENT_DENSITY_FILE));
    finish(
        &dir,
        manifest,
        &loaded,
        cmd.input.lenient,
        &[path, density_path],
    )
}

fn cmd_simulate(cmd: SimulateCmd) -> Result<(), Failure> {
    let dir = cmd.output.prepare()?;
    let config = SimConfig {
        q: cmd.q,
        n_legislators: cmd.legislators,
        total_references: cmd.steps,
        seed: cmd.seed,
        ensemble_size: cmd.ensemble,
    };
    let distribution = genmodel::simulate_ensemble(&config)?;

    let mut manifest = Manifest::new("simulate");
    manifest.push("param.q", report::num(cmd.q));
    manifest.push("param.legislators", cmd.legislators);
    manifest.push("param.steps", cmd.steps);
    manifest.push("param.seed", cmd.seed);
    manifest.push("param.ensemble", cmd.ensemble);
    manifest.push(
        "param.tail_min",
        opt_value(cmd.tail_min.map(|v| v.to_string())),
    );
    if let Some(n_min) = cmd.tail_min {
        let alpha = genmodel::tail_exponent_hist(&distribution.histogram, n_min)?;
        manifest.push("result.tail_exponent", report::num(alpha));
    }
    let path = report::write_simulation(&dir, &distribution)?;
    manifest.artifact("simulation", Some(report::SIMULATION_FILE));
    let manifest_path = dir.write_manifest(&manifest)?;
    announce(&[path, manifest_path]);
    Ok(())
}

/// Per-legislator reference counts over the selected scope. The vector has
/// one slot per in-scope legislator, zeros included, so the fitted model
/// sees the same population size the corpus declares.
fn reference_counts(
    corpus: &Corpus,
    media: Option<Media>,
    chamber: Option<Chamber>,
    window: Option<DateWindow>,
) -> Vec<u64> {
    let mut slot_of = vec![None; corpus.legislators().len()];
    let mut n_slots = 0usize;
    for (i, legislator) in corpus.legislators().iter().enumerate() {
        if chamber.is_none_or(|c| legislator.chamber == c) {
            slot_of[i] = Some(n_slots);
            n_slots += 1;
        }
    }
    let mut counts = vec![0u64; n_slots];
    for reference in corpus.references() {
        if media.is_some_and(|m| corpus.outlet(reference.outlet).media != m) {
            continue;
        }
        if window.is_some_and(|w| !w.contains(reference.day)) {
            continue;
        }
        if let Some(slot) = slot_of[reference.legislator] {
            counts[slot] += 1;
        }
    }
    counts
}

/// Builds the scanned attachment-probability grid for a given spacing.
fn probability_grid(step: f64) -> Result<Vec<f64>, Failure> {
    if !(step.is_finite() && 0.0 < step && step <= 1.0) {
        return Err(Failure::Usage(format!(
            "--grid-step must be in (0, 1], got {step}"
        )));
    }
    if step == 0.05 {
        return Ok(genmodel::default_grid());
    }
    let n_steps = (1.0 / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=n_steps).map(|i| (i as f64 * step).min(1.0)).collect();
    if *grid.last().expect("grid has at least q = 0") < 1.0 {
        grid.push(1.0);
    }
    Ok(grid)
}

fn cmd_fit(cmd: FitCmd) -> Result<(), Failure> {
    let dir = cmd.output.prepare()?;
    let loaded = cmd.input.load()?;
    let window = optional_window(
        cmd.window_start,
        cmd.window_end,
        "--window-start/--window-end",
    )?;
    let media = cmd.media.map(MediaArg::media);
    let chamber = cmd.chamber.map(ChamberArg::chamber);
    let counts = reference_counts(&loaded.corpus, media, chamber, window);
    let grid = probability_grid(cmd.grid_step)?;
    let fit = genmodel::fit_q(&counts, counts.len(), &grid, cmd.ensemble, cmd.seed)?;

    let mut manifest = Manifest::new("fit");
    cmd.input.record(&mut manifest, &loaded.inputs);
    manifest.push("param.media", opt_value(media.map(media_label)));
    manifest.push("param.chamber", opt_value(chamber.map(chamber_label)));
    manifest.push("param.window_start", day_value(cmd.window_start));
    manifest.push("param.window_end", day_value(cmd.window_end));
    manifest.push("param.grid_step", report::num(cmd.grid_step));
    manifest.push("param.grid_points", grid.len());
    manifest.push("param.ensemble", cmd.ensemble);
    manifest.push("param.seed", cmd.seed);
    manifest.push(
        "param.tail_min",
        opt_value(cmd.tail_min.map(|v| v.to_string())),
    );
    manifest.push("result.legislators", counts.len());
    manifest.push("result.references", counts.iter().sum::<u64>());
    manifest.push("result.q_hat", report::num(fit.q_hat));
    if let Some(n_min) = cmd.tail_min {
        let alpha = genmodel::tail_exponent(&counts, n_min)?;
        manifest.push("result.tail_exponent", report::num(alpha));
    }
    let fit_path = report::write_fit(&dir, &fit)?;
    let grid_path = report::write_fit_grid(&dir, &fit)?;
    manifest.artifact("fit", Some(report::FIT_FILE));
    manifest.artifact("fit_grid", Some(report::FIT_GRID_FILE));
    finish(
        &dir,
        manifest,
        &loaded,
        cmd.input.lenient,
        &[fit_path, grid_path],
    )
}

fn cmd_report(cmd: ReportCmd) -> Result<(), Failure> {
    let dir = cmd.output.prepare()?;
    let loaded = cmd.input.load()?;
    let corpus = &loaded.corpus;
    let correction = cmd.score.correction();
    let filter = cmd.score.filter()?;
    let window = filter.window;

    let mut manifest = Manifest::new("report");
    let mut written: Vec<PathBuf> = Vec::new();

    // Resolve baselines for all five measures up front (custom tables load
    // once; conflicts surface before any analysis runs).
    let mut baselines = Vec::new();
    let mut baseline_input = None;
    for arg in MeasureArg::ALL {
        let (baseline, input) = cmd.score.baseline_for(arg.kind())?;
        baseline_input = baseline_input.or(input);
        baselines.push((arg.kind(), baseline));
    }
    let baseline_of = |measure: MeasureKind| -> &BaselineChoice {
        &baselines
            .iter()
            .find(|(m, _)| *m == measure)
            .expect("all five measures were resolved")
            .1
    };

    let mut inputs = loaded.inputs.clone();
    inputs.extend(baseline_input.clone());
    cmd.input.record(&mut manifest, &inputs);
    manifest.push("param.measure", measure_label(cmd.measure.kind()));
    manifest.push(
        "param.baseline",
        match cmd.score.baseline {
            Some(arg) => arg.label().to_string(),
            None if cmd.score.baseline_file.is_some() => "custom".to_string(),
            None => "per-measure default".to_string(),
        },
    );
    manifest.push(
        "param.chamber",
        opt_value(cmd.score.chamber.map(|c| chamber_label(c.chamber()))),
    );
    manifest.push(
        "param.media",
        opt_value(cmd.score.media.map(|m| media_label(m.media()))),
    );
    manifest.push("param.window_start", day_value(cmd.score.window_start));
    manifest.push("param.window_end", day_value(cmd.score.window_end));
    manifest.push("param.min_obs", cmd.score.min_obs);
    manifest.push("param.correction", correction_label(correction));
    manifest.push("param.window_days", cmd.window_days);
    manifest.push("param.step_days", cmd.step_days);
    manifest.push("param.period1_start", day_value(cmd.period1_start));
    manifest.push("param.period1_end", day_value(cmd.period1_end));
    manifest.push("param.period2_start", day_value(cmd.period2_start));
    manifest.push("param.period2_end", day_value(cmd.period2_end));
    manifest.push(
        "param.weighting",
        weighting_label(if cmd.weight_by_post_counts {
            Weighting::PostCounts
        } else {
            Weighting::None
        }),
    );
    manifest.push("param.polarity", cmd.polarity.polarity().label());
    manifest.push("param.grid_step", report::num(cmd.grid_step));
    manifest.push("param.ensemble", cmd.ensemble);
    manifest.push("param.seed", cmd.seed);

    // Scores for all five measures; measures that cannot be scored on this
    // corpus are noted and omitted from the table.
    let score_sets: Vec<(MeasureKind, Result<ScoreSet, String>)> = MeasureArg::ALL
        .par_iter()
        .map(|arg| {
            let measure = arg.kind();
            let set = measures::measure_outlets(
                corpus,
                measure,
                baseline_of(measure),
                &filter,
                correction,
            )
            .map_err(|e| e.to_string());
            (measure, set)
        })
        .collect();
    let ok_sets: Vec<&ScoreSet> = score_sets
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .collect();
    for (measure, result) in &score_sets {
        if let Err(reason) = result {
            manifest.push(
                format!("note.scores.{}", measure_label(*measure)),
                format!("not scored: {reason}"),
            );
        }
    }
    written.push(report::write_scores(&dir, &ok_sets)?);
    manifest.artifact("scores", Some(report::SCORES_FILE));

    // Pooled estimates over every media x chamber x measure cell.
    let cells: Vec<(MediaArg, ChamberArg, MeasureArg)> = [MediaArg::News, MediaArg::Blogs]
        .iter()
        .flat_map(|&media| {
            [ChamberArg::House, ChamberArg::Senate]
                .iter()
                .flat_map(move |&chamber| {
                    MeasureArg::ALL
                        .iter()
                        .map(move |&measure| (media, chamber, measure))
                })
        })
        .collect();
    let pooled_rows: Vec<PooledRow> = cells
        .par_iter()
        .map(|&(media, chamber, measure)| {
            let cell_filter = ScoreFilter {
                media: Some(media.media()),
                chamber: Some(chamber.chamber()),
                window,
                min_obs: cmd.score.min_obs,
            };
            let outcome = measures::measure_outlets(
                corpus,
                measure.kind(),
                baseline_of(measure.kind()),
                &cell_filter,
                correction,
            )
            .and_then(|set| pooling::pool(&set.scores))
            .map_err(|e| e.to_string());
            PooledRow {
                media: media.media(),
                chamber: chamber.chamber(),
                measure: measure.kind(),
                baseline: baseline_of(measure.kind()).kind(),
                outcome,
            }
        })
        .collect();
    written.push(report::write_pooled(&dir, &pooled_rows)?);
    manifest.artifact("pooled", Some(report::POOLED_FILE));

    // Sliding-window series on the selected measure.
    let series_measure = cmd.measure.kind();
    match dynamics::slant_series(
        corpus,
        series_measure,
        baseline_of(series_measure),
        cmd.window_days,
        cmd.step_days,
        &filter,
        correction,
    ) {
        Ok(series) => {
            manifest.push("result.series_points", series.points.len());
            manifest.push("result.series_gaps", series.gaps.len());
            written.push(report::write_series(&dir, &series)?);
            manifest.artifact("series", Some(report::SERIES_FILE));
        }
        Err(error) => {
            manifest.push("artifact.series", format!("error: {error}"));
        }
    }

    // Shift regression, only when all four period dates were given.
    let period_flags = [
        cmd.period1_start,
        cmd.period1_end,
        cmd.period2_start,
        cmd.period2_end,
    ];
    if period_flags.iter().all(Option::is_none) {
        manifest.artifact("regression", None);
        manifest.artifact("regression_points", None);
    } else if period_flags.iter().any(Option::is_none) {
        return Err(Failure::Usage(
            "shift regression needs all of --period1-start, --period1-end, --period2-start, --period2-end".into(),
        ));
    } else {
        let period1 = required_window(
            cmd.period1_start.expect("checked above"),
            cmd.period1_end.expect("checked above"),
            "--period1-start/--period1-end",
        )?;
        let period2 = required_window(
            cmd.period2_start.expect("checked above"),
            cmd.period2_end.expect("checked above"),
            "--period2-start/--period2-end",
        )?;
        let weighting = if cmd.weight_by_post_counts {
            Weighting::PostCounts
        } else {
            Weighting::None
        };
        match dynamics::shift_regression(
            corpus,
            series_measure,
            baseline_of(series_measure),
            period1,
            period2,
            &filter,
            correction,
            weighting,
        ) {
            Ok(regression) => {
                manifest.push("result.regression_outlets", regression.points.len());
                manifest.push(
                    "result.regression_dropped_one_period",
                    regression.dropped_one_period,
                );
                written.push(report::write_regression(&dir, &regression)?);
                written.push(report::write_regression_points(&dir, &regression)?);
                manifest.artifact("regression", Some(report::REGRESSION_FILE));
                manifest.artifact("regression_points", Some(report::REGRESSION_POINTS_FILE));
            }
            Err(error) => {
                manifest.push("artifact.regression", format!("error: {error}"));
                manifest.push("artifact.regression_points", format!("error: {error}"));
            }
        }
    }

    // Party scores over all outlets drive the hyperlink and sentiment
    // artifacts; both need the full media range.
    let party_filter = ScoreFilter {
        media: None,
        chamber: cmd.score.chamber.map(ChamberArg::chamber),
        window,
        min_obs: cmd.score.min_obs,
    };
    let party_scores = measures::measure_outlets(
        corpus,
        MeasureKind::Party,
        baseline_of(MeasureKind::Party),
        &party_filter,
        correction,
    );

    if corpus.hyperlinks().is_none() {
        manifest.artifact("sectors", None);
    } else {
        match party_scores
            .as_ref()
            .map_err(|e| e.to_string())
            .and_then(|set| coverage::sector_matrix(corpus, &set.scores).map_err(|e| e.to_string()))
        {
            Ok(matrix) => {
                manifest.push("result.total_links", matrix.total_links());
                manifest.push("result.unclassified_links", matrix.unclassified);
                written.push(report::write_sectors(&dir, &matrix)?);
                manifest.artifact("sectors", Some(report::SECTORS_FILE));
            }
            Err(reason) => {
                manifest.push("artifact.sectors", format!("error: {reason}"));
            }
        }
    }

    if corpus.sentiments().is_none() {
        manifest.artifact("sentiment", None);
        manifest.artifact("sentiment_density", None);
    } else {
        match &party_scores {
            Ok(set) => {
                let media_set: Vec<MediaArg> = match cmd.score.media {
                    Some(one) => vec![one],
                    None => vec![MediaArg::News, MediaArg::Blogs],
                };
                let rows = sentiment_rows(corpus, set, cmd.polarity.polarity(), &media_set);
                manifest.push("result.sentiment_cells", rows.len());
                manifest.push(
                    "result.sentiment_cells_ok",
                    rows.iter().filter(|r| r.outcome.is_ok()).count(),
                );
                written.push(report::write_sentiment(&dir, &rows)?);
                let ok_cells: Vec<_> = rows
                    .iter()
                    .filter_map(|r| r.outcome.as_ref().ok())
                    .collect();
                written.push(report::write_sentiment_density(&dir, &ok_cells)?);
                manifest.artifact("sentiment", Some(report::SENTIMENT_FILE));
                manifest.artifact("sentiment_density", Some(report::SENTIMENT_DENSITY_FILE));
            }
            Err(error) => {
                manifest.push("artifact.sentiment", format!("error: {error}"));
                manifest.push("artifact.sentiment_density", format!("error: {error}"));
            }
        }
    }

    // Model fit on the corpus counts, then a simulation at the fitted q for
    // side-by-side comparison.
    let counts = reference_counts(
        corpus,
        cmd.score.media.map(MediaArg::media),
        cmd.score.chamber.map(ChamberArg::chamber),
        window,
    );
    let grid = probability_grid(cmd.grid_step)?;
    manifest.push("param.grid_points", grid.len());
    manifest.push("result.fit_legislators", counts.len());
    manifest.push("result.fit_references", counts.iter().sum::<u64>());
    match genmodel::fit_q(&counts, counts.len(), &grid, cmd.ensemble, cmd.seed) {
        Ok(fit) => {
            manifest.push("result.q_hat", report::num(fit.q_hat));
            written.push(report::write_fit(&dir, &fit)?);
            written.push(report::write_fit_grid(&dir, &fit)?);
            manifest.artifact("fit", Some(report::FIT_FILE));
            manifest.artifact("fit_grid", Some(report::FIT_GRID_FILE));

            let config = SimConfig {
                q: fit.q_hat,
                n_legislators: counts.len(),
                total_references: counts.iter().sum(),
                seed: cmd.seed,
                ensemble_size: cmd.ensemble,
            };
            match genmodel::simulate_ensemble(&config) {
                Ok(distribution) => {
                    written.push(report::write_simulation(&dir, &distribution)?);
                    manifest.artifact("simulation", Some(report::SIMULATION_FILE));
                }
                Err(error) => {
                    manifest.push("artifact.simulation", format!("error: {error}"));
                }
            }
        }
        Err(error) => {
            manifest.push("artifact.fit", format!("error: {error}"));
            manifest.push("artifact.fit_grid", format!("error: {error}"));
            manifest.push("artifact.simulation", format!("error: {error}"));
        }
    }

    finish(&dir, manifest, &loaded, cmd.input.lenient, &written)
}

/// Writes the rejects table (lenient runs only) and the manifest, then
/// announces every artifact on stdout.
fn finish(
    dir: &OutputDir,
    mut manifest: Manifest,
    loaded: &Loaded,
    lenient: bool,
    written: &[PathBuf],
) -> Result<(), Failure> {
    let mut all = written.to_vec();
    if lenient {
        manifest.push("result.rejected_rows", loaded.rejects.len());
        all.push(report::write_rejects(dir, &loaded.rejects)?);
        manifest.artifact("rejects", Some(report::REJECTS_FILE));
    }
    all.push(dir.write_manifest(&manifest)?);
    announce(&all);
    Ok(())
}

fn announce(paths: &[PathBuf]) {
    for path in paths {
        println!("wrote {}", path.display());
    }
}

fn optional_window(
    start: Option<Day>,
    end: Option<Day>,
    what: &str,
) -> Result<Option<DateWindow>, Failure> {
    match (start, end) {
        (None, None) => Ok(None),
        (Some(s), Some(e)) => required_window(s, e, what).map(Some),
        _ => Err(Failure::Usage(format!(
            "{what}: provide both dates or neither"
        ))),
    }
}

fn required_window(start: Day, end: Day, what: &str) -> Result<DateWindow, Failure> {
    DateWindow::new(start, end)
        .ok_or_else(|| Failure::Usage(format!("{what}: start {start} is after end {end}")))
}

fn day_value(day: Option<Day>) -> String {
    day.map_or_else(|| "none".to_string(), |d| d.to_string())
}

fn opt_value(value: Option<impl ToString>) -> String {
    value.map_or_else(|| "all".to_string(), |v| v.to_string())
}

fn record_score_counts(manifest: &mut Manifest, set: &ScoreSet) {
    manifest.push("result.outlets_scored", set.scores.len());
    manifest.push("result.excluded_legislators", set.excluded_legislators);
    manifest.push("result.excluded_references", set.excluded_references);
    manifest.push("result.outlets_below_floor", set.outlets_below_floor);
    manifest.push("result.outlets_degenerate", set.outlets_degenerate);
}
