//! Corpus ingestion from delimited text tables.
//!
//! Five tables are recognized. `outlets`, `legislators`, and `references` are
//! required; `hyperlinks` and `sentiments` are optional. Columns are located
//! by header name, so column order does not matter. Expected headers:
//!
//! * outlets: `outlet_id, media` with media `news` or `blogs`
//! * legislators: `legislator_id, name, party, chamber, state, gender,
//!   ideology, population` (`ideology` and `population` may be empty)
//! * references: `outlet_id, legislator_id, date, article_id`
//! * hyperlinks: `source_outlet, target_outlet, date`
//! * sentiments: `outlet_id, legislator_id, negative, positive`
//!
//! Dates accept `YYYY-MM-DD`; a trailing `T...` or ` ...` time-of-day suffix
//! is truncated, so full timestamps load as their calendar day.
//!
//! In strict mode (the default) the first bad row aborts the load with its
//! file and line number. In lenient mode bad rows are skipped and collected
//! as [`Reject`] records so the caller can write a rejection report. Errors
//! that poison the whole table — unreadable file, missing column, duplicate
//! identifier — are fatal in both modes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use slant_core::corpus::{Chamber, Corpus, Gender, Legislator, Media, Party};
use slant_core::measures::{Baseline, BaselineKind};
use slant_core::{DateWindow, Day, Error};

/// Paths to the corpus tables for one run.
#[derive(Debug, Clone)]
pub struct CorpusPaths {
    pub outlets: PathBuf,
    pub legislators: PathBuf,
    pub references: PathBuf,
    pub hyperlinks: Option<PathBuf>,
    pub sentiments: Option<PathBuf>,
}

/// Loader behavior switches.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Skip and report bad rows instead of aborting on the first one.
    pub lenient: bool,
    /// Declared corpus date range; rows outside it are errors.
    pub declared_range: Option<DateWindow>,
}

/// One skipped row from a lenient load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reject {
    pub file: String,
    pub line: u64,
    pub reason: String,
}

/// Identity of one consumed input file, for the run manifest.
#[derive(Debug, Clone)]
pub struct InputFile {
    pub role: &'static str,
    pub path: PathBuf,
    pub sha256: String,
}

/// A successfully loaded corpus plus the files and digests it came from.
#[derive(Debug)]
pub struct Loaded {
    pub corpus: Corpus,
    pub rejects: Vec<Reject>,
    pub inputs: Vec<InputFile>,
}

/// Why a load failed.
#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Malformed {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: missing required column `{column}`")]
    MissingColumn { path: PathBuf, column: &'static str },
    #[error("{file}:{line}: {reason}")]
    Row {
        file: String,
        line: u64,
        reason: String,
    },
    #[error(transparent)]
    Invalid(#[from] Error),
}

/// Reads, validates, and assembles a corpus from the given tables.
pub fn load_corpus(paths: &CorpusPaths, options: &LoadOptions) -> Result<Loaded, LoadError> {
    let mut builder = Corpus::builder();
    if let Some(range) = options.declared_range {
        builder.declare_date_range(range);
    }
    let mut rejects = Vec::new();
    let mut inputs = Vec::new();

    let outlets = Table::open("outlets", &paths.outlets, &["outlet_id", "media"])?;
    inputs.push(outlets.input_file());
    outlets.for_each_row(options, &mut rejects, |row| {
        let media = parse_media(row.get("media")?)?;
        builder
            .add_outlet(row.get("outlet_id")?, media)
            .map_err(fatal_if_duplicate)
    })?;

    let legislators = Table::open(
        "legislators",
        &paths.legislators,
        &[
            "legislator_id",
            "name",
            "party",
            "chamber",
            "state",
            "gender",
            "ideology",
            "population",
        ],
    )?;
    inputs.push(legislators.input_file());
    legislators.for_each_row(options, &mut rejects, |row| {
        let legislator = Legislator {
            id: row.get("legislator_id")?.to_string(),
            name: row.get("name")?.to_string(),
            party: parse_party(row.get("party")?)?,
            chamber: parse_chamber(row.get("chamber")?)?,
            state: row.get("state")?.to_ascii_uppercase(),
            gender: parse_gender(row.get("gender")?)?,
            ideology: parse_optional(row.get("ideology")?, "ideology", parse_float)?,
            population: parse_optional(row.get("population")?, "population", parse_count)?,
        };
        builder
            .add_legislator(legislator)
            .map_err(fatal_if_duplicate)
    })?;

    let references = Table::open(
        "references",
        &paths.references,
        &["outlet_id", "legislator_id", "date", "article_id"],
    )?;
    inputs.push(references.input_file());
    references.for_each_row(options, &mut rejects, |row| {
        let day = parse_day(row.get("date")?).map_err(bad_field("date"))?;
        builder
            .add_reference(
                row.get("outlet_id")?,
                row.get("legislator_id")?,
                day,
                row.get("article_id")?,
            )
            .map_err(RowError::Recoverable)
    })?;

    if let Some(path) = &paths.hyperlinks {
        let hyperlinks = Table::open(
            "hyperlinks",
            path,
            &["source_outlet", "target_outlet", "date"],
        )?;
        inputs.push(hyperlinks.input_file());
        hyperlinks.for_each_row(options, &mut rejects, |row| {
            let day = parse_day(row.get("date")?).map_err(bad_field("date"))?;
            builder
                .add_hyperlink(row.get("source_outlet")?, row.get("target_outlet")?, day)
                .map_err(RowError::Recoverable)
        })?;
    }

    if let Some(path) = &paths.sentiments {
        let sentiments = Table::open(
            "sentiments",
            path,
            &["outlet_id", "legislator_id", "negative", "positive"],
        )?;
        inputs.push(sentiments.input_file());
        sentiments.for_each_row(options, &mut rejects, |row| {
            let negative = parse_float(row.get("negative")?).map_err(bad_field("negative"))?;
            let positive = parse_float(row.get("positive")?).map_err(bad_field("positive"))?;
            builder
                .add_sentiment(
                    row.get("outlet_id")?,
                    row.get("legislator_id")?,
                    negative,
                    positive,
                )
                .map_err(RowError::Recoverable)
        })?;
    }

    let corpus = builder.finish()?;
    Ok(Loaded {
        corpus,
        rejects,
        inputs,
    })
}

/// Reads a custom baseline table with columns `category, probability`.
/// Parameter files are always strict: any bad row aborts.
pub fn load_baseline(path: &Path) -> Result<(Baseline, InputFile), LoadError> {
    let table = Table::open("baseline", path, &["category", "probability"])?;
    let input = table.input_file();
    let mut categories = Vec::new();
    let mut probs = Vec::new();
    table.for_each_row(&LoadOptions::default(), &mut Vec::new(), |row| {
        categories.push(row.get("category")?.to_string());
        probs.push(parse_float(row.get("probability")?).map_err(bad_field("probability"))?);
        Ok(())
    })?;
    let baseline = Baseline::new(BaselineKind::Custom, categories, probs)?;
    Ok((baseline, input))
}

/// Lowercase hex SHA-256 of a byte string.
fn hex_digest(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for byte in digest {
        write!(out, "{byte:02x}").expect("writing to a String cannot fail");
    }
    out
}

/// One open table: raw bytes (for hashing) plus the resolved header layout.
struct Table {
    role: &'static str,
    path: PathBuf,
    bytes: Vec<u8>,
    columns: Vec<usize>,
    names: &'static [&'static str],
}

impl Table {
    fn open(
        role: &'static str,
        path: &Path,
        columns: &'static [&'static str],
    ) -> Result<Table, LoadError> {
        let bytes = std::fs::read(path).map_err(|source| LoadError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(bytes.as_slice());
        let header = reader.headers().map_err(|source| LoadError::Malformed {
            path: path.to_path_buf(),
            source,
        })?;
        let mut resolved = Vec::with_capacity(columns.len());
        for &name in columns {
            let position = header.iter().position(|field| field == name);
            match position {
                Some(index) => resolved.push(index),
                None => {
                    return Err(LoadError::MissingColumn {
                        path: path.to_path_buf(),
                        column: name,
                    })
                }
            }
        }
        Ok(Table {
            role,
            path: path.to_path_buf(),
            bytes,
            columns: resolved,
            names: columns,
        })
    }

    fn input_file(&self) -> InputFile {
        InputFile {
            role: self.role,
            path: self.path.clone(),
            sha256: hex_digest(&self.bytes),
        }
    }

    /// Applies `handle` to every data row. Recoverable row errors either
    /// abort (strict) or append to `rejects` (lenient); fatal row errors
    /// always abort.
    fn for_each_row(
        &self,
        options: &LoadOptions,
        rejects: &mut Vec<Reject>,
        mut handle: impl FnMut(&Row) -> Result<(), RowError>,
    ) -> Result<(), LoadError> {
        let file = self
            .path
            .file_name()
            .map(|name| name.to_string_lossy().into_owned())
            .unwrap_or_else(|| self.path.display().to_string());
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(self.bytes.as_slice());
        for record in reader.records() {
            let (line, outcome) = match record {
                Ok(record) => {
                    let line = record.position().map_or(0, |p| p.line());
                    let row = Row {
                        record: &record,
                        table: self,
                    };
                    (line, handle(&row))
                }
                Err(source) => {
                    let line = source.position().map_or(0, |p| p.line());
                    (line, Err(RowError::Shape(source)))
                }
            };
            match outcome {
                Ok(()) => {}
                Err(RowError::Fatal(error)) => return Err(LoadError::Invalid(error)),
                Err(error) => {
                    if options.lenient {
                        rejects.push(Reject {
                            file: file.clone(),
                            line,
                            reason: error.to_string(),
                        });
                    } else {
                        return Err(LoadError::Row {
                            file: file.clone(),
                            line,
                            reason: error.to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// One data record with header-resolved field access.
struct Row<'a> {
    record: &'a csv::StringRecord,
    table: &'a Table,
}

impl Row<'_> {
    fn get(&self, name: &'static str) -> Result<&str, RowError> {
        let slot = self
            .table
            .names
            .iter()
            .position(|&n| n == name)
            .expect("column names are requested from the table's own layout");
        self.record
            .get(self.table.columns[slot])
            .ok_or(RowError::ShortRow { column: name })
    }
}

/// A row-level failure, split by whether skipping the row is sound.
#[derive(Debug, thiserror::Error)]
enum RowError {
    #[error("{0}")]
    Parse(String),
    /// Row references something unknown or out of range; dropping it leaves
    /// the rest of the corpus consistent.
    #[error(transparent)]
    Recoverable(Error),
    /// Duplicate identifiers poison later lookups, so they abort even in
    /// lenient mode.
    #[error(transparent)]
    Fatal(Error),
    #[error("{0}")]
    Shape(csv::Error),
    #[error("row has no `{column}` field")]
    ShortRow { column: &'static str },
}

fn fatal_if_duplicate(error: Error) -> RowError {
    match error {
        Error::DuplicateId { .. } => RowError::Fatal(error),
        other => RowError::Recoverable(other),
    }
}

fn bad_field(column: &'static str) -> impl Fn(String) -> RowError {
    move |reason| RowError::Parse(format!("column `{column}`: {reason}"))
}

fn parse_media(text: &str) -> Result<Media, RowError> {
    match text.to_ascii_lowercase().as_str() {
        "news" => Ok(Media::News),
        "blogs" => Ok(Media::Blogs),
        other => Err(RowError::Parse(format!(
            "unknown media `{other}` (expected `news` or `blogs`)"
        ))),
    }
}

fn parse_party(text: &str) -> Result<Party, RowError> {
    match text.to_ascii_uppercase().as_str() {
        "D" => Ok(Party::D),
        "R" => Ok(Party::R),
        "OTHER" | "I" => Ok(Party::Other),
        other => Err(RowError::Parse(format!(
            "unknown party `{other}` (expected `D`, `R`, `I`, or `Other`)"
        ))),
    }
}

fn parse_chamber(text: &str) -> Result<Chamber, RowError> {
    match text.to_ascii_lowercase().as_str() {
        "house" => Ok(Chamber::House),
        "senate" => Ok(Chamber::Senate),
        other => Err(RowError::Parse(format!(
            "unknown chamber `{other}` (expected `house` or `senate`)"
        ))),
    }
}

fn parse_gender(text: &str) -> Result<Gender, RowError> {
    match text.to_ascii_uppercase().as_str() {
        "F" => Ok(Gender::F),
        "M" => Ok(Gender::M),
        other => Err(RowError::Parse(format!(
            "unknown gender `{other}` (expected `F` or `M`)"
        ))),
    }
}

fn parse_optional<T>(
    text: &str,
    column: &'static str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Option<T>, RowError> {
    if text.is_empty() {
        Ok(None)
    } else {
        parse(text).map(Some).map_err(bad_field(column))
    }
}

fn parse_float(text: &str) -> Result<f64, String> {
    text.parse::<f64>()
        .map_err(|_| format!("`{text}` is not a number"))
}

fn parse_count(text: &str) -> Result<u64, String> {
    text.parse::<u64>()
        .map_err(|_| format!("`{text}` is not a nonnegative integer"))
}

/// Parses `YYYY-MM-DD`, truncating a `T...` or ` ...` time-of-day suffix.
pub fn parse_day(text: &str) -> Result<Day, String> {
    let date_part = match text.as_bytes().get(10) {
        Some(b'T') | Some(b' ') => &text[..10],
        _ => text,
    };
    let bytes = date_part.as_bytes();
    let shape_ok = bytes.len() == 10
        && bytes[4] == b'-'
        && bytes[7] == b'-'
        && bytes
            .iter()
            .enumerate()
            .all(|(i, b)| i == 4 || i == 7 || b.is_ascii_digit());
    let parsed = if shape_ok {
        let year = date_part[..4].parse::<i32>().ok();
        let month = date_part[5..7].parse::<u32>().ok();
        let day = date_part[8..10].parse::<u32>().ok();
        match (year, month, day) {
            (Some(y), Some(m), Some(d)) => Day::from_ymd(y, m, d),
            _ => None,
        }
    } else {
        None
    };
    parsed.ok_or_else(|| {
        format!("`{text}` is not a valid date (expected YYYY-MM-DD, optionally with a time suffix)")
    })
}
