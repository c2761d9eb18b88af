//! End-to-end tests of the `slant` binary: the CLI must load what it is
//! given, agree exactly with direct library computation on the same data,
//! write complete and deterministic artifact bundles, and signal failures
//! through its documented exit codes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use slant_core::corpus::{Chamber, Corpus, Gender, Legislator, Media, Party};
use slant_core::measures::{measure_outlets, BaselineChoice, Correction, MeasureKind, ScoreFilter};

fn slant_bin() -> &'static str {
    env!("CARGO_BIN_EXE_slant")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(slant_bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn assert_exit(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr),
    );
}

/// Fixed per-outlet Democrat reference share and total volume.
const OUTLETS: [(&str, &str, f64, usize); 8] = [
    ("n1", "news", 0.75, 48),
    ("n2", "news", 0.60, 45),
    ("n3", "news", 0.50, 52),
    ("n4", "news", 0.40, 60),
    ("n5", "news", 0.30, 44),
    ("b1", "blogs", 0.70, 40),
    ("b2", "blogs", 0.45, 56),
    ("b3", "blogs", 0.25, 48),
];

const DATES: [&str; 20] = [
    "2009-01-05",
    "2009-01-12",
    "2009-01-19",
    "2009-01-26",
    "2009-02-02",
    "2009-02-09",
    "2009-02-16",
    "2009-02-23",
    "2009-03-02",
    "2009-03-09",
    "2009-03-16",
    "2009-03-23",
    "2009-03-30",
    "2009-04-06",
    "2009-04-13",
    "2009-04-20",
    "2009-01-08",
    "2009-02-12",
    "2009-03-18",
    "2009-04-22",
];

struct FixtureLegislator {
    id: &'static str,
    name: &'static str,
    party: &'static str,
    chamber: &'static str,
    state: &'static str,
    gender: &'static str,
    ideology: f64,
    population: u64,
}

fn fixture_legislators() -> Vec<FixtureLegislator> {
    let ids = [
        "L01", "L02", "L03", "L04", "L05", "L06", "L07", "L08", "L09", "L10", "L11", "L12",
    ];
    let names = [
        "Ada Hart",
        "Ben Cole",
        "Cam Reyes",
        "Dee Walsh",
        "Eli Frank",
        "Flo Nash",
        "Gil Soto",
        "Hal Irwin",
        "Ivy Chang",
        "Jo Marsh",
        "Kip Lund",
        "Lee Voss",
    ];
    let states = [
        "CA", "TX", "NY", "FL", "WA", "OH", "PA", "GA", "IL", "MI", "AZ", "CO",
    ];
    ids.iter()
        .enumerate()
        .map(|(i, &id)| {
            let democrat = i % 2 == 0;
            FixtureLegislator {
                id,
                name: names[i],
                party: if democrat { "D" } else { "R" },
                chamber: if i < 8 { "house" } else { "senate" },
                state: states[i],
                gender: if i % 3 == 0 { "F" } else { "M" },
                ideology: if democrat {
                    -0.2 - 0.05 * i as f64
                } else {
                    0.2 + 0.05 * i as f64
                },
                population: 500_000 + 10_000 * i as u64,
            }
        })
        .collect()
}

/// (outlet, legislator, date, article) rows, deterministic round-robin.
fn fixture_references() -> Vec<(String, String, String, String)> {
    let legislators = fixture_legislators();
    let dems: Vec<&str> = legislators
        .iter()
        .filter(|l| l.party == "D")
        .map(|l| l.id)
        .collect();
    let reps: Vec<&str> = legislators
        .iter()
        .filter(|l| l.party == "R")
        .map(|l| l.id)
        .collect();
    let mut rows = Vec::new();
    let mut sequence = 0usize;
    for (outlet, _, d_share, total) in OUTLETS {
        let n_d = (d_share * total as f64).round() as usize;
        for i in 0..total {
            let legislator = if i < n_d {
                dems[i % dems.len()]
            } else {
                reps[(i - n_d) % reps.len()]
            };
            rows.push((
                outlet.to_string(),
                legislator.to_string(),
                DATES[sequence % DATES.len()].to_string(),
                format!("a{sequence:04}"),
            ));
            sequence += 1;
        }
    }
    rows
}

fn fixture_hyperlinks() -> Vec<(String, String, String)> {
    // Every outlet links the two after it in the declaration order, with
    // repetition so the matrix has varied counts.
    let mut rows = Vec::new();
    for (i, (source, ..)) in OUTLETS.iter().enumerate() {
        for offset in 1..=2usize {
            let (target, ..) = OUTLETS[(i + offset) % OUTLETS.len()];
            for repeat in 0..=(i % 3) {
                rows.push((
                    source.to_string(),
                    target.to_string(),
                    DATES[(i + offset + repeat) % DATES.len()].to_string(),
                ));
            }
        }
    }
    rows
}

fn fixture_sentiments() -> Vec<(String, String, f64, f64)> {
    let legislators = fixture_legislators();
    let mut rows = Vec::new();
    for (outlet, _, d_share, _) in OUTLETS {
        for legislator in &legislators {
            let negative = if legislator.party == "D" {
                0.6 - 0.4 * d_share
            } else {
                0.2 + 0.4 * d_share
            };
            rows.push((
                outlet.to_string(),
                legislator.id.to_string(),
                (negative * 1000.0).round() / 1000.0,
                ((0.8 - negative) * 1000.0).round() / 1000.0,
            ));
        }
    }
    rows
}

/// Writes the whole fixture into `dir` and returns the table paths.
fn write_fixture(dir: &Path) -> BTreeMap<&'static str, PathBuf> {
    let mut paths = BTreeMap::new();

    let mut outlets = String::from("outlet_id,media\n");
    for (id, media, ..) in OUTLETS {
        outlets.push_str(&format!("{id},{media}\n"));
    }
    let path = dir.join("outlets.csv");
    std::fs::write(&path, outlets).unwrap();
    paths.insert("outlets", path);

    let mut legislators =
        String::from("legislator_id,name,party,chamber,state,gender,ideology,population\n");
    for l in fixture_legislators() {
        legislators.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            l.id, l.name, l.party, l.chamber, l.state, l.gender, l.ideology, l.population
        ));
    }
    let path = dir.join("legislators.csv");
    std::fs::write(&path, legislators).unwrap();
    paths.insert("legislators", path);

    let mut references = String::from("outlet_id,legislator_id,date,article_id\n");
    for (outlet, legislator, date, article) in fixture_references() {
        references.push_str(&format!("{outlet},{legislator},{date},{article}\n"));
    }
    let path = dir.join("references.csv");
    std::fs::write(&path, references).unwrap();
    paths.insert("references", path);

    let mut hyperlinks = String::from("source_outlet,target_outlet,date\n");
    for (source, target, date) in fixture_hyperlinks() {
        hyperlinks.push_str(&format!("{source},{target},{date}\n"));
    }
    let path = dir.join("hyperlinks.csv");
    std::fs::write(&path, hyperlinks).unwrap();
    paths.insert("hyperlinks", path);

    let mut sentiments = String::from("outlet_id,legislator_id,negative,positive\n");
    for (outlet, legislator, negative, positive) in fixture_sentiments() {
        sentiments.push_str(&format!("{outlet},{legislator},{negative},{positive}\n"));
    }
    let path = dir.join("sentiments.csv");
    std::fs::write(&path, sentiments).unwrap();
    paths.insert("sentiments", path);

    paths
}

/// The same fixture assembled directly through the library.
fn fixture_corpus() -> Corpus {
    let mut builder = Corpus::builder();
    for (id, media, ..) in OUTLETS {
        let media = if media == "news" {
            Media::News
        } else {
            Media::Blogs
        };
        builder.add_outlet(id, media).unwrap();
    }
    for l in fixture_legislators() {
        builder
            .add_legislator(Legislator {
                id: l.id.to_string(),
                name: l.name.to_string(),
                party: if l.party == "D" { Party::D } else { Party::R },
                chamber: if l.chamber == "house" {
                    Chamber::House
                } else {
                    Chamber::Senate
                },
                state: l.state.to_string(),
                gender: if l.gender == "F" {
                    Gender::F
                } else {
                    Gender::M
                },
                ideology: Some(l.ideology),
                population: Some(l.population),
            })
            .unwrap();
    }
    for (outlet, legislator, date, article) in fixture_references() {
        builder
            .add_reference(&outlet, &legislator, parse_date(&date), &article)
            .unwrap();
    }
    for (source, target, date) in fixture_hyperlinks() {
        builder
            .add_hyperlink(&source, &target, parse_date(&date))
            .unwrap();
    }
    for (outlet, legislator, negative, positive) in fixture_sentiments() {
        builder
            .add_sentiment(&outlet, &legislator, negative, positive)
            .unwrap();
    }
    builder.finish().unwrap()
}

fn parse_date(text: &str) -> slant_core::Day {
    let year = text[..4].parse().unwrap();
    let month = text[5..7].parse().unwrap();
    let day = text[8..10].parse().unwrap();
    slant_core::Day::from_ymd(year, month, day).unwrap()
}

fn input_flags(paths: &BTreeMap<&str, PathBuf>) -> Vec<String> {
    let mut flags = Vec::new();
    for role in ["outlets", "legislators", "references"] {
        flags.push(format!("--{role}"));
        flags.push(paths[role].display().to_string());
    }
    flags
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_path(path).expect("artifact readable");
    reader
        .records()
        .map(|record| {
            record
                .unwrap()
                .iter()
                .map(|field| field.to_string())
                .collect()
        })
        .collect()
}

#[test]
fn version_is_one_machine_readable_line() {
    let output = Command::new(slant_bin()).arg("--version").output().unwrap();
    assert_exit(&output, 0);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert_eq!(
        stdout.trim(),
        format!("slant {}", env!("CARGO_PKG_VERSION"))
    );
}

#[test]
fn unknown_flags_are_usage_errors() {
    let output = Command::new(slant_bin())
        .args(["score", "--no-such-flag"])
        .output()
        .unwrap();
    assert_exit(&output, 3);
}

#[test]
fn scores_agree_exactly_with_direct_library_computation() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["score".into()];
    args.extend(input_flags(&paths));
    args.extend([
        "--measure".into(),
        "party".into(),
        "--baseline".into(),
        "congress".into(),
        "--min-obs".into(),
        "5".into(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);

    let expected = measure_outlets(
        &fixture_corpus(),
        MeasureKind::Party,
        &BaselineChoice::CongressComposition,
        &ScoreFilter {
            media: None,
            chamber: None,
            window: None,
            min_obs: 5,
        },
        Correction::HaldaneAnscombe,
    )
    .unwrap();

    let rows = read_csv(&out.join("scores.csv"));
    assert_eq!(rows.len(), expected.scores.len());
    for (row, score) in rows.iter().zip(&expected.scores) {
        assert_eq!(row[0], score.outlet_id);
        assert_eq!(
            row[4].parse::<f64>().unwrap(),
            score.theta,
            "{}",
            score.outlet_id
        );
        assert_eq!(row[5].parse::<f64>().unwrap(), score.variance);
        assert_eq!(row[6].parse::<u64>().unwrap(), score.n_obs);
    }
}

#[test]
fn column_order_in_input_tables_does_not_matter() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    // Rewrite the outlet table with swapped columns.
    let reordered = tmp.path().join("outlets_swapped.csv");
    let mut text = String::from("media,outlet_id\n");
    for (id, media, ..) in OUTLETS {
        text.push_str(&format!("{media},{id}\n"));
    }
    std::fs::write(&reordered, text).unwrap();

    let out = tmp.path().join("out");
    let output = run_in(
        tmp.path(),
        &[
            "score",
            "--outlets",
            reordered.to_str().unwrap(),
            "--legislators",
            paths["legislators"].to_str().unwrap(),
            "--references",
            paths["references"].to_str().unwrap(),
            "--measure",
            "party",
            "--output-dir",
            out.to_str().unwrap(),
        ],
    );
    assert_exit(&output, 0);
    assert_eq!(read_csv(&out.join("scores.csv")).len(), 8);
}

#[test]
fn pool_emits_the_full_measure_media_chamber_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["pool".into()];
    args.extend(input_flags(&paths));
    args.extend(["--output-dir".into(), out.display().to_string()]);
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);

    let rows = read_csv(&out.join("pooled.csv"));
    assert_eq!(rows.len(), 20, "5 measures x 2 media x 2 chambers");
    // Fixed nesting: media, then chamber, then measure.
    assert_eq!(
        (
            rows[0][0].as_str(),
            rows[0][1].as_str(),
            rows[0][2].as_str()
        ),
        ("news", "house", "party")
    );
    assert_eq!(
        (
            rows[19][0].as_str(),
            rows[19][1].as_str(),
            rows[19][2].as_str()
        ),
        ("blogs", "senate", "region")
    );
    // Defaults: seat-composition baseline for the three roster measures,
    // uniform for the other two.
    for row in &rows {
        let expected = match row[2].as_str() {
            "party" | "ideology" | "gender" => "congress",
            _ => "uniform",
        };
        assert_eq!(row[3], expected, "measure {}", row[2]);
    }
    for row in &rows {
        assert_eq!(row[10], "ok", "cell {:?}", &row[..4]);
        let theta: f64 = row[4].parse().unwrap();
        let sd: f64 = row[5].parse().unwrap();
        assert!(theta.is_finite() && sd > 0.0);
    }
}

#[test]
fn pool_restricts_to_requested_cell() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["pool".into()];
    args.extend(input_flags(&paths));
    args.extend([
        "--measure".into(),
        "party".into(),
        "--media".into(),
        "news".into(),
        "--chamber".into(),
        "house".into(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);
    let rows = read_csv(&out.join("pooled.csv"));
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][..4], ["news", "house", "party", "congress"]);
    assert_eq!(rows[0][10], "ok");
}

#[test]
fn series_rows_are_window_end_labeled_and_match_the_library() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["dynamics".into()];
    args.extend(input_flags(&paths));
    args.extend([
        "--measure".into(),
        "party".into(),
        "--window-days".into(),
        "30".into(),
        "--step-days".into(),
        "14".into(),
        "--min-obs".into(),
        "3".into(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);

    let series = slant_core::dynamics::slant_series(
        &fixture_corpus(),
        MeasureKind::Party,
        &BaselineChoice::CongressComposition,
        30,
        14,
        &ScoreFilter {
            media: None,
            chamber: None,
            window: None,
            min_obs: 3,
        },
        Correction::HaldaneAnscombe,
    )
    .unwrap();

    let rows = read_csv(&out.join("series.csv"));
    assert_eq!(rows.len(), series.points.len());
    assert!(!rows.is_empty());
    for (row, point) in rows.iter().zip(&series.points) {
        assert_eq!(row[0], point.window_end.to_string());
        assert_eq!(row[1].parse::<f64>().unwrap(), point.pooled.theta);
        assert_eq!(row[2].parse::<f64>().unwrap(), point.pooled.variance.sqrt());
    }
}

#[test]
fn sector_matrix_agrees_with_the_library_and_lists_all_sectors() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["links".into()];
    args.extend(input_flags(&paths));
    args.extend([
        "--hyperlinks".into(),
        paths["hyperlinks"].display().to_string(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);

    let corpus = fixture_corpus();
    let scores = measure_outlets(
        &corpus,
        MeasureKind::Party,
        &BaselineChoice::CongressComposition,
        &ScoreFilter {
            media: None,
            chamber: None,
            window: None,
            min_obs: 5,
        },
        Correction::HaldaneAnscombe,
    )
    .unwrap();
    let matrix = slant_core::coverage::sector_matrix(&corpus, &scores.scores).unwrap();

    let rows = read_csv(&out.join("sectors.csv"));
    assert_eq!(rows.len(), 4);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], matrix.labels[i]);
        for (j, cell) in row[1..].iter().enumerate() {
            assert_eq!(cell.parse::<u64>().unwrap(), matrix.counts[i][j]);
        }
    }
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains(&format!("result.total_links = {}", matrix.total_links())));
}

#[test]
fn sentiment_correlations_cover_both_media_and_parties() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["sentiment".into()];
    args.extend(input_flags(&paths));
    args.extend([
        "--sentiments".into(),
        paths["sentiments"].display().to_string(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);

    let rows = read_csv(&out.join("sentiment.csv"));
    let cells: Vec<(String, String)> = rows.iter().map(|r| (r[0].clone(), r[1].clone())).collect();
    assert_eq!(
        cells,
        [
            ("news".to_string(), "D".to_string()),
            ("news".to_string(), "R".to_string()),
            ("blogs".to_string(), "D".to_string()),
            ("blogs".to_string(), "R".to_string()),
        ]
    );
    // The fixture makes negativity toward Democrats fall with the outlet's
    // Democrat share, so the correlation signs are pinned.
    for row in &rows {
        assert_eq!(row[6], "ok", "cell {:?}", &row[..3]);
        let r: f64 = row[3].parse().unwrap();
        match row[1].as_str() {
            "D" => assert!(r < 0.0, "more D-leaning => less negative about D"),
            _ => assert!(r > 0.0, "more D-leaning => more negative about R"),
        }
    }
    // Density rows exist for every successful cell and only nonzero bins.
    let density = read_csv(&out.join("sentiment_density.csv"));
    assert!(!density.is_empty());
    for row in &density {
        assert!(row[9].parse::<u64>().unwrap() > 0);
    }
}

#[test]
fn simulate_is_seed_deterministic_and_seed_sensitive() {
    let tmp = tempfile::tempdir().unwrap();
    let base = [
        "simulate",
        "--q",
        "0.5",
        "--legislators",
        "40",
        "--steps",
        "4000",
        "--ensemble",
        "3",
    ];
    let mut bytes = Vec::new();
    for (label, seed) in [("one", "9"), ("two", "9"), ("three", "10")] {
        let out = tmp.path().join(label);
        let mut args: Vec<String> = base.iter().map(|s| s.to_string()).collect();
        args.extend([
            "--seed".into(),
            seed.into(),
            "--output-dir".into(),
            out.display().to_string(),
        ]);
        let output = Command::new(slant_bin()).args(&args).output().unwrap();
        assert_exit(&output, 0);
        bytes.push(std::fs::read(out.join("simulation.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1], "same seed, same bytes");
    assert_ne!(bytes[0], bytes[2], "different seed, different histogram");
}

#[test]
fn fit_scans_the_requested_grid_and_reports_the_best_point() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["fit".into()];
    args.extend(input_flags(&paths));
    args.extend([
        "--grid-step".into(),
        "0.25".into(),
        "--ensemble".into(),
        "8".into(),
        "--seed".into(),
        "4".into(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);

    let grid = read_csv(&out.join("fit_grid.csv"));
    let qs: Vec<f64> = grid.iter().map(|r| r[0].parse().unwrap()).collect();
    assert_eq!(qs, [0.0, 0.25, 0.5, 0.75, 1.0]);

    let fit = read_csv(&out.join("fit.csv"));
    assert_eq!(fit.len(), 1);
    let q_hat: f64 = fit[0][0].parse().unwrap();
    let ks_model: f64 = fit[0][1].parse().unwrap();
    assert!(qs.contains(&q_hat));
    let best = grid
        .iter()
        .map(|r| r[1].parse::<f64>().unwrap())
        .fold(f64::INFINITY, f64::min);
    assert_eq!(ks_model, best, "reported distance is the grid minimum");
}

#[test]
fn report_manifest_lists_exactly_what_exists() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["report".into()];
    args.extend(input_flags(&paths));
    args.extend([
        "--hyperlinks".into(),
        paths["hyperlinks"].display().to_string(),
        "--sentiments".into(),
        paths["sentiments"].display().to_string(),
        "--window-days".into(),
        "30".into(),
        "--step-days".into(),
        "7".into(),
        "--period1-start".into(),
        "2009-01-01".into(),
        "--period1-end".into(),
        "2009-02-28".into(),
        "--period2-start".into(),
        "2009-03-01".into(),
        "--period2-end".into(),
        "2009-04-30".into(),
        "--ensemble".into(),
        "10".into(),
        "--seed".into(),
        "5".into(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);

    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    let mut artifacts = Vec::new();
    for line in manifest.lines() {
        let (key, value) = line.split_once(" = ").expect("key = value lines");
        if let Some(name) = key.strip_prefix("artifact.") {
            artifacts.push((name.to_string(), value.to_string()));
        }
    }
    for name in [
        "scores",
        "pooled",
        "series",
        "regression",
        "regression_points",
        "sectors",
        "sentiment",
        "sentiment_density",
        "simulation",
        "fit",
        "fit_grid",
    ] {
        let value = &artifacts
            .iter()
            .find(|(n, _)| n == name)
            .unwrap_or_else(|| panic!("artifact line for {name}"))
            .1;
        assert!(
            out.join(value).is_file(),
            "manifest lists {name} = {value}, which must exist"
        );
    }
    // Every parameter of the run is recorded.
    for key in [
        "param.measure",
        "param.baseline",
        "param.chamber",
        "param.media",
        "param.window_start",
        "param.window_end",
        "param.min_obs",
        "param.correction",
        "param.window_days",
        "param.step_days",
        "param.period1_start",
        "param.period2_end",
        "param.weighting",
        "param.polarity",
        "param.grid_step",
        "param.ensemble",
        "param.seed",
        "param.date_start",
        "param.date_end",
        "param.lenient",
    ] {
        assert!(manifest.contains(&format!("{key} = ")), "missing {key}");
    }
    for role in [
        "outlets",
        "legislators",
        "references",
        "hyperlinks",
        "sentiments",
    ] {
        assert!(manifest.contains(&format!("input.{role}.sha256 = ")));
    }
    // Only declared kinds of records appear; nothing run-specific like a
    // clock or hostname can hide under an unknown key. (That reruns are
    // byte-identical is asserted separately.)
    for line in manifest.lines() {
        let key = line.split_once(" = ").unwrap().0;
        assert!(
            key == "tool"
                || key == "manifest_format"
                || key == "subcommand"
                || ["input.", "param.", "result.", "artifact.", "note."]
                    .iter()
                    .any(|prefix| key.starts_with(prefix)),
            "unexpected manifest key {key}"
        );
    }
}

#[test]
fn report_marks_absent_optional_analyses_as_skipped() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["report".into()];
    args.extend(input_flags(&paths));
    args.extend([
        "--window-days".into(),
        "30".into(),
        "--ensemble".into(),
        "5".into(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);

    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    for name in ["sectors", "sentiment", "sentiment_density", "regression"] {
        assert!(
            manifest.contains(&format!("artifact.{name} = skipped: no input")),
            "{name} should be skipped"
        );
    }
    assert!(!out.join("sectors.csv").exists());
    assert!(!out.join("sentiment.csv").exists());
}

#[test]
fn reruns_and_thread_counts_leave_every_byte_unchanged() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let mut bundles = Vec::new();
    for (label, threads) in [("a", "1"), ("b", "1"), ("c", "4")] {
        let out = tmp.path().join(label);
        let mut args: Vec<String> = vec!["report".into()];
        args.extend(input_flags(&paths));
        args.extend([
            "--hyperlinks".into(),
            paths["hyperlinks"].display().to_string(),
            "--sentiments".into(),
            paths["sentiments"].display().to_string(),
            "--window-days".into(),
            "30".into(),
            "--ensemble".into(),
            "6".into(),
            "--seed".into(),
            "21".into(),
            "--threads".into(),
            threads.into(),
            "--output-dir".into(),
            out.display().to_string(),
        ]);
        let output = Command::new(slant_bin()).args(&args).output().unwrap();
        assert_exit(&output, 0);

        let mut bundle = BTreeMap::new();
        for entry in std::fs::read_dir(&out).unwrap() {
            let path = entry.unwrap().path();
            bundle.insert(
                path.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&path).unwrap(),
            );
        }
        bundles.push(bundle);
    }
    assert_eq!(bundles[0], bundles[1], "rerun changed some artifact");
    assert_eq!(bundles[0], bundles[2], "thread count changed some artifact");
}

#[test]
fn output_directory_falls_back_to_the_environment_variable() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("from-env");
    let mut args: Vec<String> = vec!["score".into()];
    args.extend(input_flags(&paths));
    args.extend(["--measure".into(), "party".into()]);
    let output = Command::new(slant_bin())
        .args(&args)
        .env("SLANT_OUTPUT_DIR", &out)
        .output()
        .unwrap();
    assert_exit(&output, 0);
    assert!(out.join("scores.csv").is_file());
    assert!(out.join("manifest.txt").is_file());
}

#[test]
fn strict_loads_abort_on_the_first_bad_row_with_its_location() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let broken = tmp.path().join("references_broken.csv");
    let mut text = std::fs::read_to_string(&paths["references"]).unwrap();
    text.push_str("n1,NOBODY,2009-02-01,bad\n");
    let bad_line = text.lines().count();
    std::fs::write(&broken, text).unwrap();

    let out = tmp.path().join("out");
    let output = run_in(
        tmp.path(),
        &[
            "score",
            "--outlets",
            paths["outlets"].to_str().unwrap(),
            "--legislators",
            paths["legislators"].to_str().unwrap(),
            "--references",
            broken.to_str().unwrap(),
            "--measure",
            "party",
            "--output-dir",
            out.to_str().unwrap(),
        ],
    );
    assert_exit(&output, 2);
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(
        stderr.contains(&format!("references_broken.csv:{bad_line}")),
        "diagnostic names file and line: {stderr}"
    );
    assert!(stderr.contains("NOBODY"));
}

#[test]
fn lenient_loads_skip_bad_rows_and_write_a_rejection_report() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let broken = tmp.path().join("references_broken.csv");
    let mut text = std::fs::read_to_string(&paths["references"]).unwrap();
    text.push_str("n1,NOBODY,2009-02-01,bad1\n");
    text.push_str("n1,L01,never,bad2\n");
    text.push_str("phantom,L01,2009-02-01,bad3\n");
    std::fs::write(&broken, text).unwrap();

    let out = tmp.path().join("out");
    let output = run_in(
        tmp.path(),
        &[
            "score",
            "--outlets",
            paths["outlets"].to_str().unwrap(),
            "--legislators",
            paths["legislators"].to_str().unwrap(),
            "--references",
            broken.to_str().unwrap(),
            "--measure",
            "party",
            "--lenient",
            "--output-dir",
            out.to_str().unwrap(),
        ],
    );
    assert_exit(&output, 0);

    let rejects = read_csv(&out.join("rejects.csv"));
    assert_eq!(rejects.len(), 3);
    for row in &rejects {
        assert_eq!(row[0], "references_broken.csv");
        assert!(row[1].parse::<u64>().unwrap() > 1);
    }
    let manifest = std::fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("result.rejected_rows = 3"));

    // The clean rows still score: same result as the pristine table.
    let clean = read_csv(&out.join("scores.csv"));
    assert_eq!(clean.len(), 8);
}

#[test]
fn declared_date_range_rejects_out_of_range_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let out = tmp.path().join("out");
    let mut args: Vec<String> = vec!["score".into()];
    args.extend(input_flags(&paths));
    args.extend([
        "--measure".into(),
        "party".into(),
        "--date-start".into(),
        "2009-01-01".into(),
        "--date-end".into(),
        "2009-03-31".into(),
        "--output-dir".into(),
        out.display().to_string(),
    ]);
    // April rows now violate the declared range: strict mode aborts.
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 2);

    args.push("--lenient".into());
    let output = Command::new(slant_bin()).args(&args).output().unwrap();
    assert_exit(&output, 0);
    let rejects = read_csv(&out.join("rejects.csv"));
    let april_rows = fixture_references()
        .iter()
        .filter(|(_, _, date, _)| date.as_str() > "2009-03-31")
        .count();
    assert_eq!(rejects.len(), april_rows);
}

#[test]
fn custom_baseline_flag_round_trips_through_scoring() {
    let tmp = tempfile::tempdir().unwrap();
    let paths = write_fixture(tmp.path());
    let baseline = tmp.path().join("half.csv");
    std::fs::write(&baseline, "category,probability\nD,0.5\nR,0.5\n").unwrap();

    let run_with = |extra: &[&str]| -> Vec<Vec<String>> {
        let out = tempfile::tempdir().unwrap();
        let mut args: Vec<String> = vec!["score".into()];
        args.extend(input_flags(&paths));
        args.extend(["--measure".into(), "party".into()]);
        args.extend(extra.iter().map(|s| s.to_string()));
        args.extend(["--output-dir".into(), out.path().display().to_string()]);
        let output = Command::new(slant_bin()).args(&args).output().unwrap();
        assert_exit(&output, 0);
        read_csv(&out.path().join("scores.csv"))
    };

    let custom = run_with(&["--baseline-file", baseline.to_str().unwrap()]);
    let uniform = run_with(&["--baseline", "uniform"]);
    assert_eq!(custom.len(), uniform.len());
    for (c, u) in custom.iter().zip(&uniform) {
        assert_eq!(c[0], u[0]);
        assert_eq!(c[4], u[4], "half/half equals uniform for outlet {}", c[0]);
        assert_eq!(c[3], "custom");
        assert_eq!(u[3], "uniform");
    }

    let missing = {
        let out = tempfile::tempdir().unwrap();
        let mut args: Vec<String> = vec!["score".into()];
        args.extend(input_flags(&paths));
        args.extend([
            "--measure".into(),
            "party".into(),
            "--baseline".into(),
            "custom".into(),
            "--output-dir".into(),
            out.path().display().to_string(),
        ]);
        Command::new(slant_bin()).args(&args).output().unwrap()
    };
    assert_exit(&missing, 3);
}
