//! Command-line driver: mine, sanitize, evaluate and seeded experiment sweeps.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::fixtures;
use crate::io::{self, DatasetBundle, Format, IoError, ReportDocument};
use crate::metrics::{self, MetricsError, SanitizationReport};
use crate::miner::{mine_clhuis, MiningResult};
use crate::model::{itemset_utility, Itemset, QuantitativeDatabase};
use crate::sanitizer::{sanitize, EditLog, SanitizeError, SanitizeOutcome, Strategy};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: IoError },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Sanitize(#[from] SanitizeError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("cannot draw {k} sensitive itemsets from {available} mined itemsets")]
    NotEnoughItemsets { k: usize, available: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "clhui",
    version,
    about = "Cross-level high-utility itemset mining and hiding"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mine cross-level high-utility itemsets.
    Mine(MineArgs),
    /// Hide sensitive itemsets and write the sanitized database with a report.
    Sanitize(SanitizeArgs),
    /// Compute side-effect metrics for an already sanitized database.
    Evaluate(EvaluateArgs),
    /// Sweep thresholds, sensitive-set sizes, seeds and strategies into a CSV.
    Experiment(ExperimentArgs),
    /// Write the worked eight-transaction example to a directory.
    Example(ExampleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct DatasetArgs {
    #[arg(long)]
    pub transactions: PathBuf,
    /// `child,parent` lines. Without it the taxonomy is flat.
    #[arg(long)]
    pub taxonomy: Option<PathBuf>,
    /// `item,profit` lines; required with `--format quantity`.
    #[arg(long)]
    pub profits: Option<PathBuf>,
    #[arg(long, default_value = "utility")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct MineArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[arg(long)]
    pub minutil: u64,
    /// Write `clhuis.txt` here instead of printing to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SensitiveArgs {
    /// One itemset per line, item names separated by spaces.
    #[arg(long, conflicts_with = "sensitive_random")]
    pub sensitive_file: Option<PathBuf>,
    /// Draw K itemsets at random from the mined ones.
    #[arg(long, value_name = "K")]
    pub sensitive_random: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SanitizeArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    #[arg(long)]
    pub minutil: u64,
    #[command(flatten)]
    pub sensitive: SensitiveArgs,
    /// min-rf, max-rf, best-nscf or all.
    #[arg(long, default_value = "min-rf")]
    pub strategy: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// The sanitized database, in the same format as the original.
    #[arg(long, required_unless_present = "edits")]
    pub sanitized: Option<PathBuf>,
    /// Edit log to replay on the original. Takes precedence over `--sanitized`.
    #[arg(long)]
    pub edits: Option<PathBuf>,
    #[arg(long)]
    pub sensitive_file: PathBuf,
    #[arg(long)]
    pub minutil: u64,
    /// Write `report.json` here instead of printing to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub dataset: DatasetArgs,
    /// Name written in the dataset column; defaults to the file stem.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub minutil: Vec<u64>,
    #[arg(long, conflicts_with = "sensitive_random")]
    pub sensitive_file: Option<PathBuf>,
    /// Sensitive-set sizes to sweep.
    #[arg(long, value_delimiter = ',', value_name = "K")]
    pub sensitive_random: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub seed: Vec<u64>,
    #[arg(long, default_value = "all")]
    pub strategy: String,
    /// Run sweep points on all cores. Runtimes then include contention.
    #[arg(long)]
    pub parallel: bool,
    /// Write `experiment.csv` here instead of printing to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExampleArgs {
    #[arg(long)]
    pub out: PathBuf,
}

pub fn parse_strategies(s: &str) -> Result<Vec<Strategy>, CliError> {
    if s == "all" {
        return Ok(Strategy::ALL.to_vec());
    }
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<Strategy>()
                .map_err(|e| CliError::Usage(e.to_string()))
        })
        .collect()
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::File {
        path: path.to_owned(),
        source,
    })
}

pub fn load_dataset(args: &DatasetArgs) -> Result<DatasetBundle, CliError> {
    let transactions = read(&args.transactions)?;
    let taxonomy = args.taxonomy.as_deref().map(read).transpose()?;
    let profits = args.profits.as_deref().map(read).transpose()?;
    io::load_bundle(
        &transactions,
        taxonomy.as_deref(),
        profits.as_deref(),
        args.format,
    )
    .map_err(|source| CliError::Parse {
        path: args.transactions.clone(),
        source,
    })
}

/// Draws `k` mined itemsets uniformly without replacement. Candidates are
/// taken in canonical (lexicographic id) order, so the draw depends only on
/// the mined set, `k` and `seed`.
pub fn select_random(clhuis: &MiningResult, k: usize, seed: u64) -> Result<Vec<Itemset>, CliError> {
    let available = clhuis.len();
    if k > available {
        return Err(CliError::NotEnoughItemsets { k, available });
    }
    let sorted: Vec<&Itemset> = clhuis.itemsets.keys().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks = rand::seq::index::sample(&mut rng, available, k).into_vec();
    picks.sort_unstable();
    Ok(picks.into_iter().map(|i| sorted[i].clone()).collect())
}

/// One strategy applied to one database, with the re-mined result.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub strategy: Strategy,
    pub outcome: SanitizeOutcome,
    pub after: MiningResult,
    pub report: SanitizationReport,
    /// Wall-clock time of the sanitization step alone.
    pub runtime_ms: f64,
}

pub fn run_strategy(
    bundle: &DatasetBundle,
    minutil: u64,
    sensitive: &[Itemset],
    before: &MiningResult,
    strategy: Strategy,
) -> Result<RunRecord, CliError> {
    let start = Instant::now();
    let outcome = sanitize(
        &bundle.database,
        &bundle.taxonomy,
        minutil,
        sensitive,
        before,
        strategy,
    )?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    let after = mine_clhuis(&outcome.database, &bundle.taxonomy, minutil);
    let report = metrics::evaluate(
        sensitive,
        &before.itemsets,
        &after.itemsets,
        &bundle.database,
        &outcome.database,
        &outcome.log,
    )?;
    Ok(RunRecord {
        strategy,
        outcome,
        after,
        report,
        runtime_ms,
    })
}

/// Run facts that go into a report besides the metrics.
pub struct ReportContext<'a> {
    pub strategy: Option<Strategy>,
    pub minutil: u64,
    pub sensitive: &'a [Itemset],
    pub seed: Option<u64>,
    pub clhuis_before: usize,
    pub clhuis_after: usize,
    pub db_after: &'a QuantitativeDatabase,
    pub log: &'a EditLog,
    pub runtime_ms: f64,
}

pub fn report_document(
    bundle: &DatasetBundle,
    report: &SanitizationReport,
    ctx: &ReportContext<'_>,
) -> ReportDocument {
    let ReportContext {
        strategy,
        minutil,
        sensitive,
        seed,
        clhuis_before,
        clhuis_after,
        db_after,
        log,
        runtime_ms,
    } = *ctx;
    let residual_utilities: BTreeMap<String, u64> = sensitive
        .iter()
        .map(|s| {
            (
                bundle.names.render(s),
                itemset_utility(&bundle.taxonomy, db_after, s),
            )
        })
        .collect();
    ReportDocument {
        hf: report.hf.as_f64(),
        mc: report.mc.as_f64(),
        ac: report.ac.as_f64(),
        ius: report.ius.as_f64(),
        dus: report.dus.as_f64(),
        tmr: report.tmr.as_f64(),
        runtime_ms,
        hf_exact: report.hf.to_string(),
        mc_exact: report.mc.to_string(),
        ac_exact: report.ac.to_string(),
        ius_exact: report.ius.to_string(),
        dus_exact: report.dus.to_string(),
        tmr_exact: report.tmr.to_string(),
        minutil,
        strategy: strategy.map_or_else(|| "external".to_owned(), |s| s.name().to_owned()),
        sensitive_count: sensitive.len(),
        sensitive_seed: seed,
        clhuis_before,
        clhuis_after,
        modified_transactions: log.modified.len(),
        edits: log.len(),
        residual_utilities,
    }
}

fn cmd_mine(args: &MineArgs) -> Result<(), CliError> {
    let bundle = load_dataset(&args.dataset)?;
    let start = Instant::now();
    let result = mine_clhuis(&bundle.database, &bundle.taxonomy, args.minutil);
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let text = io::write_itemsets(&result.itemsets, &bundle.names);
    match &args.out {
        Some(dir) => {
            create_dir(dir)?;
            write(&dir.join("clhuis.txt"), &text)?;
        }
        None => print!("{text}"),
    }
    eprintln!(
        "{} itemsets at minutil {} in {ms:.1} ms",
        result.len(),
        args.minutil
    );
    Ok(())
}

fn sensitive_set(
    bundle: &DatasetBundle,
    clhuis: &MiningResult,
    args: &SensitiveArgs,
) -> Result<(Vec<Itemset>, Option<u64>), CliError> {
    match (&args.sensitive_file, args.sensitive_random) {
        (Some(path), _) => {
            let text = read(path)?;
            let sets = io::parse_itemset_list(&text, &bundle.names, &bundle.taxonomy).map_err(
                |source| CliError::Parse {
                    path: path.clone(),
                    source,
                },
            )?;
            Ok((sets, None))
        }
        (None, Some(k)) => Ok((select_random(clhuis, k, args.seed)?, Some(args.seed))),
        (None, None) => Err(CliError::Usage(
            "one of --sensitive-file or --sensitive-random is required".into(),
        )),
    }
}

fn cmd_sanitize(args: &SanitizeArgs) -> Result<(), CliError> {
    let strategies = parse_strategies(&args.strategy)?;
    let bundle = load_dataset(&args.dataset)?;
    let before = mine_clhuis(&bundle.database, &bundle.taxonomy, args.minutil);
    let (sensitive, seed) = sensitive_set(&bundle, &before, &args.sensitive)?;

    create_dir(&args.out)?;
    write(
        &args.out.join("clhuis.txt"),
        &io::write_itemsets(&before.itemsets, &bundle.names),
    )?;
    let listed: Vec<(Itemset, u64)> = sensitive
        .iter()
        .map(|s| (s.clone(), before.utility(s).unwrap_or(0)))
        .collect();
    write(
        &args.out.join("sensitive.txt"),
        &io::write_itemsets(listed.iter().map(|(s, u)| (s, u)), &bundle.names),
    )?;

    for (i, &strategy) in strategies.iter().enumerate() {
        let run = run_strategy(&bundle, args.minutil, &sensitive, &before, strategy)?;
        if i == 0 {
            write(
                &args.out.join("gidic.txt"),
                &run.outcome.dic.dump(&bundle.names),
            )?;
        }
        let name = strategy.name();
        write(
            &args.out.join(format!("sanitized_{name}.txt")),
            &io::write_transactions(&run.outcome.database, &bundle.names, args.dataset.format),
        )?;
        write(
            &args.out.join(format!("edits_{name}.txt")),
            &run.outcome.log.render(&bundle.names),
        )?;
        let ctx = ReportContext {
            strategy: Some(strategy),
            minutil: args.minutil,
            sensitive: &sensitive,
            seed,
            clhuis_before: before.len(),
            clhuis_after: run.after.len(),
            db_after: &run.outcome.database,
            log: &run.outcome.log,
            runtime_ms: run.runtime_ms,
        };
        let doc = report_document(&bundle, &run.report, &ctx);
        write(
            &args.out.join(format!("report_{name}.json")),
            &serde_json::to_string_pretty(&doc)?,
        )?;
        println!(
            "{name}: hf={} mc={} ac={} ius={} dus={} tmr={} edits={} ({:.1} ms)",
            run.report.hf,
            run.report.mc,
            run.report.ac,
            run.report.ius,
            run.report.dus,
            run.report.tmr,
            run.outcome.log.len(),
            run.runtime_ms
        );
    }
    Ok(())
}

/// Tids of `original` whose transaction differs in `sanitized`. The
/// sanitized file drops emptied transactions, so lines are aligned in order:
/// a sanitized line belongs to the next original it is contained in.
fn modified_by_alignment(
    original: &QuantitativeDatabase,
    sanitized: &QuantitativeDatabase,
) -> EditLog {
    let mut log = EditLog::default();
    let mut rest = sanitized.transactions().iter().peekable();
    for t in original.transactions() {
        let next = rest.peek().filter(|s| {
            s.entries()
                .iter()
                .all(|&(v, q)| t.quantity(v).is_some_and(|tq| q <= tq))
        });
        match next {
            Some(s) => {
                if s.entries() != t.entries() {
                    log.modified.insert(t.tid());
                }
                rest.next();
            }
            None => {
                log.modified.insert(t.tid());
            }
        }
    }
    log
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let bundle = load_dataset(&args.dataset)?;
    let (after_db, log) = match (&args.edits, &args.sanitized) {
        (Some(path), _) => {
            let log = io::parse_edit_log(&read(path)?, &bundle.names).map_err(|source| {
                CliError::Parse {
                    path: path.clone(),
                    source,
                }
            })?;
            let mut db = bundle.database.clone();
            log.replay(&mut db).map_err(IoError::Model)?;
            (db, log)
        }
        (None, Some(path)) => {
            let mut names = bundle.names.clone();
            let txs = io::parse_transactions(&read(path)?, args.dataset.format, &mut names)
                .map_err(|source| CliError::Parse {
                    path: path.clone(),
                    source,
                })?;
            if names.len() != bundle.names.len() {
                return Err(CliError::Usage(format!(
                    "{}: introduces items absent from the original",
                    path.display()
                )));
            }
            let db = QuantitativeDatabase::new(txs, bundle.database.profits().clone())
                .map_err(IoError::Model)?;
            let log = modified_by_alignment(&bundle.database, &db);
            (db, log)
        }
        (None, None) => {
            return Err(CliError::Usage(
                "one of --sanitized or --edits is required".into(),
            ))
        }
    };
    let text = read(&args.sensitive_file)?;
    let sensitive =
        io::parse_itemset_list(&text, &bundle.names, &bundle.taxonomy).map_err(|source| {
            CliError::Parse {
                path: args.sensitive_file.clone(),
                source,
            }
        })?;

    let before = mine_clhuis(&bundle.database, &bundle.taxonomy, args.minutil);
    let after = mine_clhuis(&after_db, &bundle.taxonomy, args.minutil);
    let report = metrics::evaluate(
        &sensitive,
        &before.itemsets,
        &after.itemsets,
        &bundle.database,
        &after_db,
        &log,
    )?;
    let ctx = ReportContext {
        strategy: None,
        minutil: args.minutil,
        sensitive: &sensitive,
        seed: None,
        clhuis_before: before.len(),
        clhuis_after: after.len(),
        db_after: &after_db,
        log: &log,
        runtime_ms: 0.0,
    };
    let doc = report_document(&bundle, &report, &ctx);
    let json = serde_json::to_string_pretty(&doc)?;
    match &args.out {
        Some(dir) => {
            create_dir(dir)?;
            write(&dir.join("report.json"), &json)?;
        }
        None => println!("{json}"),
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum SensitiveSweep {
    File(Vec<Itemset>),
    Random { counts: Vec<usize>, seeds: Vec<u64> },
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub dataset: String,
    pub minutils: Vec<u64>,
    pub sensitive: SensitiveSweep,
    pub strategies: Vec<Strategy>,
    pub parallel: bool,
}

/// One CSV row. Metric columns are empty on error rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub dataset: String,
    pub strategy: String,
    pub minutil: u64,
    pub n_sensitive: usize,
    pub seed: Option<u64>,
    pub hf: Option<f64>,
    pub mc: Option<f64>,
    pub ac: Option<f64>,
    pub ius: Option<f64>,
    pub dus: Option<f64>,
    pub tmr: Option<f64>,
    pub clhuis_before: usize,
    pub clhuis_after: Option<usize>,
    pub edits: Option<usize>,
    pub runtime_ms: Option<f64>,
    pub error: String,
}

pub const RUNTIME_COLUMNS: &[&str] = &["runtime_ms"];

struct Point {
    minutil_index: usize,
    n_sensitive: usize,
    seed: Option<u64>,
    strategy: Strategy,
}

fn run_point(
    bundle: &DatasetBundle,
    config: &ExperimentConfig,
    mined: &MiningResult,
    p: &Point,
) -> ExperimentRow {
    let mut row = ExperimentRow {
        dataset: config.dataset.clone(),
        strategy: p.strategy.name().to_owned(),
        minutil: mined.minutil,
        n_sensitive: p.n_sensitive,
        seed: p.seed,
        hf: None,
        mc: None,
        ac: None,
        ius: None,
        dus: None,
        tmr: None,
        clhuis_before: mined.len(),
        clhuis_after: None,
        edits: None,
        runtime_ms: None,
        error: String::new(),
    };
    let sensitive = match (&config.sensitive, p.seed) {
        (SensitiveSweep::File(sets), _) => Ok(sets.clone()),
        (SensitiveSweep::Random { .. }, seed) => {
            select_random(mined, p.n_sensitive, seed.unwrap_or(0))
        }
    };
    match sensitive.and_then(|s| run_strategy(bundle, mined.minutil, &s, mined, p.strategy)) {
        Ok(run) => {
            let r = &run.report;
            row.hf = Some(r.hf.as_f64());
            row.mc = Some(r.mc.as_f64());
            row.ac = Some(r.ac.as_f64());
            row.ius = Some(r.ius.as_f64());
            row.dus = Some(r.dus.as_f64());
            row.tmr = Some(r.tmr.as_f64());
            row.clhuis_after = Some(run.after.len());
            row.edits = Some(run.outcome.log.len());
            row.runtime_ms = Some(run.runtime_ms);
        }
        Err(e) => row.error = e.to_string(),
    }
    row
}

/// Rows come out in config order: minutil, then sensitive count, then seed,
/// then strategy. A failing point yields an error row and the sweep goes on.
pub fn run_experiment(bundle: &DatasetBundle, config: &ExperimentConfig) -> Vec<ExperimentRow> {
    let mine = |&m: &u64| mine_clhuis(&bundle.database, &bundle.taxonomy, m);
    let mined: Vec<MiningResult> = if config.parallel {
        config.minutils.par_iter().map(mine).collect()
    } else {
        config.minutils.iter().map(mine).collect()
    };

    let mut points = Vec::new();
    for minutil_index in 0..config.minutils.len() {
        let draws: Vec<(usize, Option<u64>)> = match &config.sensitive {
            SensitiveSweep::File(sets) => vec![(sets.len(), None)],
            SensitiveSweep::Random { counts, seeds } => counts
                .iter()
                .flat_map(|&k| seeds.iter().map(move |&s| (k, Some(s))))
                .collect(),
        };
        for (n_sensitive, seed) in draws {
            for &strategy in &config.strategies {
                points.push(Point {
                    minutil_index,
                    n_sensitive,
                    seed,
                    strategy,
                });
            }
        }
    }
    let run = |p: &Point| run_point(bundle, config, &mined[p.minutil_index], p);
    if config.parallel {
        points.par_iter().map(run).collect()
    } else {
        points.iter().map(run).collect()
    }
}

pub fn experiment_csv(rows: &[ExperimentRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<(), CliError> {
    let strategies = parse_strategies(&args.strategy)?;
    let bundle = load_dataset(&args.dataset)?;
    let sensitive = match &args.sensitive_file {
        Some(path) => {
            let text = read(path)?;
            SensitiveSweep::File(
                io::parse_itemset_list(&text, &bundle.names, &bundle.taxonomy).map_err(
                    |source| CliError::Parse {
                        path: path.clone(),
                        source,
                    },
                )?,
            )
        }
        None if args.sensitive_random.is_empty() => {
            return Err(CliError::Usage(
                "one of --sensitive-file or --sensitive-random is required".into(),
            ))
        }
        None => SensitiveSweep::Random {
            counts: args.sensitive_random.clone(),
            seeds: args.seed.clone(),
        },
    };
    let dataset = args.name.clone().unwrap_or_else(|| {
        args.dataset
            .transactions
            .file_stem()
            .map_or_else(String::new, |s| s.to_string_lossy().into_owned())
    });
    let config = ExperimentConfig {
        dataset,
        minutils: args.minutil.clone(),
        sensitive,
        strategies,
        parallel: args.parallel,
    };
    let rows = run_experiment(&bundle, &config);
    let text = experiment_csv(&rows)?;
    match &args.out {
        Some(dir) => {
            create_dir(dir)?;
            write(&dir.join("experiment.csv"), &text)?;
        }
        None => print!("{text}"),
    }
    let failed = rows.iter().filter(|r| !r.error.is_empty()).count();
    eprintln!("{} rows, {failed} with errors", rows.len());
    Ok(())
}

fn cmd_example(args: &ExampleArgs) -> Result<(), CliError> {
    create_dir(&args.out)?;
    write(
        &args.out.join("transactions.txt"),
        fixtures::EXAMPLE_TRANSACTIONS,
    )?;
    write(&args.out.join("profits.txt"), fixtures::EXAMPLE_PROFITS)?;
    write(&args.out.join("taxonomy.txt"), fixtures::EXAMPLE_TAXONOMY)?;
    write(&args.out.join("sensitive.txt"), fixtures::EXAMPLE_SENSITIVE)?;
    Ok(())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Mine(a) => cmd_mine(a),
        Command::Sanitize(a) => cmd_sanitize(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Example(a) => cmd_example(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::worked_example;

    fn example_bundle() -> DatasetBundle {
        let ex = worked_example();
        DatasetBundle {
            database: ex.db,
            taxonomy: ex.taxonomy,
            names: ex.names,
        }
    }

    #[test]
    fn random_selection_is_canonical_and_seeded() {
        let b = example_bundle();
        let mined = mine_clhuis(&b.database, &b.taxonomy, 50);
        let a = select_random(&mined, 3, 11).unwrap();
        assert_eq!(a, select_random(&mined, 3, 11).unwrap());
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert!(a.iter().all(|s| mined.contains(s)));
        assert_eq!(
            select_random(&mined, mined.len(), 0).unwrap().len(),
            mined.len()
        );
        assert!(matches!(
            select_random(&mined, mined.len() + 1, 0),
            Err(CliError::NotEnoughItemsets { .. })
        ));
    }

    #[test]
    fn strategy_lists() {
        assert_eq!(parse_strategies("all").unwrap(), Strategy::ALL.to_vec());
        assert_eq!(
            parse_strategies("max-rf,min-rf").unwrap(),
            vec![Strategy::MaxRF, Strategy::MinRF]
        );
        assert!(parse_strategies("fastest").is_err());
    }

    #[test]
    fn sweep_rows_follow_config_order() {
        let b = example_bundle();
        let config = ExperimentConfig {
            dataset: "example".into(),
            minutils: vec![50, 60, 70],
            sensitive: SensitiveSweep::Random {
                counts: vec![1],
                seeds: vec![1, 2],
            },
            strategies: vec![Strategy::MinRF],
            parallel: true,
        };
        let rows = run_experiment(&b, &config);
        let keys: Vec<(u64, Option<u64>)> = rows.iter().map(|r| (r.minutil, r.seed)).collect();
        assert_eq!(
            keys,
            [
                (50, Some(1)),
                (50, Some(2)),
                (60, Some(1)),
                (60, Some(2)),
                (70, Some(1)),
                (70, Some(2))
            ]
        );
        assert!(rows.iter().all(|r| r.error.is_empty() && r.hf == Some(0.0)));
    }

    #[test]
    fn failing_point_becomes_error_row() {
        let b = example_bundle();
        let config = ExperimentConfig {
            dataset: "example".into(),
            minutils: vec![50, 1000],
            sensitive: SensitiveSweep::Random {
                counts: vec![2],
                seeds: vec![0],
            },
            strategies: vec![Strategy::BestNSCF],
            parallel: false,
        };
        let rows = run_experiment(&b, &config);
        assert_eq!(rows.len(), 2);
        assert!(rows[0].error.is_empty());
        assert!(rows[1].error.contains("cannot draw 2"));
        let csv = experiment_csv(&rows).unwrap();
        assert!(csv.starts_with("dataset,strategy,minutil,n_sensitive,seed,hf,mc,ac,ius,dus,tmr,"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn alignment_counts_emptied_and_edited_transactions() {
        let ex = worked_example();
        let mut after = ex.db.clone();
        after.remove_item(4, ex.id("d")).unwrap();
        after.remove_item(4, ex.id("e")).unwrap();
        after.reduce_item(6, ex.id("d"), 2).unwrap();
        let kept: Vec<_> = after
            .transactions()
            .iter()
            .filter(|t| !t.is_empty())
            .cloned()
            .collect();
        let renumbered = kept
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                crate::model::Transaction::new(i as u32 + 1, t.entries().to_vec()).unwrap()
            })
            .collect();
        let sanitized = QuantitativeDatabase::new(renumbered, ex.db.profits().clone()).unwrap();
        let log = modified_by_alignment(&ex.db, &sanitized);
        assert_eq!(log.modified.into_iter().collect::<Vec<_>>(), vec![4, 6]);
    }
}
