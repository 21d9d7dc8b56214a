//! `echometrics`: scriptable analysis pipeline for two-narrative comment
//! logs. Synthesis, ingestion, polarization scoring, heavy-tail fits,
//! correlation analysis, and early polarization prediction.
//!
//! Every subcommand writes plot-ready tables plus a run manifest into its
//! `--out` directory. All randomness flows from `--seed`, so reruns with
//! identical inputs are byte-identical.

mod manifest;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use echometrics::association::{
    correlation_matrix, mantel_test, read_matrix_csv, write_matrix_csv, ActionKind,
    DEFAULT_MANTEL_REPLICATES,
};
use echometrics::ingest::{
    load_events, load_item_stats, read_csv_column, write_events_csv, write_events_jsonl,
    write_item_stats_csv, EventFormat, Platform,
};
use echometrics::polarization::{
    bimodality_coefficient, polarization_density, polarized_fraction, read_users_csv,
    user_polarization, write_density_csv, write_users_csv, UserRecord,
};
use echometrics::predictor::{
    build_cohort, fit_cohort, monte_carlo_cv, n_sweep, transfer, write_sweep_csv,
    DEFAULT_CV_ITERATIONS, DEFAULT_CV_TEST, DEFAULT_CV_TRAIN, DEFAULT_FEATURE_N,
    DEFAULT_PER_CLASS, DEFAULT_RIDGE,
};
use echometrics::synth::{
    generate, generate_item_stats, write_ground_truth_csv, GeneratorConfig, MixtureWeights,
};
use echometrics::tailstats::{
    ccdf, fit_powerlaw, hdi, posterior_exponent, read_chain_csv, write_ccdf_csv, write_chain_csv,
    XminChoice, DEFAULT_MCMC_BURN_IN, DEFAULT_MCMC_ITERATIONS,
};

#[derive(Parser)]
#[command(
    name = "echometrics",
    version,
    about = "Polarization and echo-chamber analytics over comment-event logs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate an event log and write it back in canonical form
    Ingest(IngestArgs),
    /// Score users: comment counts, polarization, trajectory labels
    Polarize(PolarizeArgs),
    /// Histogram density of user polarization
    Density(DensityArgs),
    /// Bimodality coefficient of a numeric CSV column
    Bc(BcArgs),
    /// Empirical CCDF of a numeric CSV column
    Ccdf(CcdfArgs),
    /// Maximum-likelihood power-law tail fit
    Fitpl(FitplArgs),
    /// Posterior draws of a tail exponent via Metropolis-Hastings
    Posterior(PosteriorArgs),
    /// HDI of the difference between two posterior chains
    Compare(CompareArgs),
    /// Correlation matrices and the Mantel test
    #[command(subcommand)]
    Assoc(AssocCommand),
    /// Polarization classifiers: n-sweep, cross-validation, transfer
    #[command(subcommand)]
    Predict(PredictCommand),
    /// Generate a synthetic dataset with known ground truth
    Synth(SynthArgs),
}

#[derive(Args)]
struct IngestArgs {
    /// Event log to load
    #[arg(long)]
    events: PathBuf,
    /// Input format
    #[arg(long, default_value = "jsonl")]
    format: String,
    /// Optional per-item action-count CSV to validate alongside
    #[arg(long)]
    items: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PolarizeArgs {
    #[arg(long)]
    events: PathBuf,
    #[arg(long, default_value = "jsonl")]
    format: String,
    /// Users with fewer comments are excluded (and counted)
    #[arg(long, default_value_t = 1)]
    min_comments: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DensityArgs {
    /// users.csv produced by `polarize`
    #[arg(long)]
    users: PathBuf,
    #[arg(long, default_value_t = 50)]
    bins: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BcArgs {
    /// CSV file holding the sample
    #[arg(long)]
    values: PathBuf,
    /// Column to read
    #[arg(long, default_value = "rho")]
    column: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CcdfArgs {
    #[arg(long)]
    values: PathBuf,
    #[arg(long)]
    column: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct FitplArgs {
    #[arg(long)]
    values: PathBuf,
    #[arg(long)]
    column: String,
    /// Lower tail cutoff: a number, or `auto` for KS-minimising selection
    #[arg(long, default_value = "auto")]
    xmin: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PosteriorArgs {
    #[arg(long)]
    values: PathBuf,
    #[arg(long)]
    column: String,
    /// Lower tail cutoff: a number, or `auto`
    #[arg(long, default_value = "auto")]
    xmin: String,
    #[arg(long, default_value_t = DEFAULT_MCMC_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_MCMC_BURN_IN)]
    burn: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    /// Chain dump of the first exponent
    #[arg(long)]
    a: PathBuf,
    /// Chain dump of the second exponent
    #[arg(long)]
    b: PathBuf,
    /// HDI mass
    #[arg(long, default_value_t = 0.90)]
    mass: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum AssocCommand {
    /// Spearman correlation matrix over per-item action counts
    Matrix(AssocMatrixArgs),
    /// Mantel permutation test between two matrices
    Mantel(AssocMantelArgs),
}

#[derive(Args)]
struct AssocMatrixArgs {
    /// Item-stats CSV (item_id,platform,category,comments,likes,shares,views)
    #[arg(long)]
    items: PathBuf,
    /// Comma-separated action names
    #[arg(
        long,
        default_value = "fb_likes,fb_comments,fb_shares,yt_views,yt_likes,yt_comments"
    )]
    actions: String,
    /// Restrict to one category (science|conspiracy)
    #[arg(long)]
    category: Option<String>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AssocMantelArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MANTEL_REPLICATES)]
    replicates: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum PredictCommand {
    /// Refit at each n and report in-sample measures
    Sweep(SweepArgs),
    /// Monte-Carlo cross-validation at one n
    Cv(CvArgs),
    /// Train on one platform's cohort, test on the other's
    Transfer(TransferArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    events: PathBuf,
    #[arg(long, default_value = "jsonl")]
    format: String,
    /// Prefix lengths: `a..b` (inclusive) or a comma list
    #[arg(long, default_value = "1..100")]
    n: String,
    #[arg(long, default_value_t = DEFAULT_PER_CLASS)]
    per_class: usize,
    #[arg(long, default_value_t = DEFAULT_RIDGE)]
    ridge: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    events: PathBuf,
    #[arg(long, default_value = "jsonl")]
    format: String,
    #[arg(long, default_value_t = DEFAULT_FEATURE_N)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_PER_CLASS)]
    per_class: usize,
    #[arg(long, default_value_t = DEFAULT_CV_TRAIN)]
    train: usize,
    #[arg(long, default_value_t = DEFAULT_CV_TEST)]
    test: usize,
    #[arg(long, default_value_t = DEFAULT_CV_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_RIDGE)]
    ridge: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TransferArgs {
    /// Event log holding both platforms
    #[arg(long)]
    events: PathBuf,
    #[arg(long, default_value = "jsonl")]
    format: String,
    #[arg(long, default_value = "yt")]
    train_platform: String,
    #[arg(long, default_value = "fb")]
    test_platform: String,
    #[arg(long, default_value_t = DEFAULT_FEATURE_N)]
    n: usize,
    #[arg(long, default_value_t = DEFAULT_PER_CLASS)]
    per_class: usize,
    #[arg(long, default_value_t = DEFAULT_RIDGE)]
    ridge: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    users: usize,
    #[arg(long, default_value = "facebook")]
    platform: String,
    /// Mixture weights science,middle,conspiracy
    #[arg(long, default_value = "0.45,0.10,0.45")]
    mix: String,
    /// Beta wing parameters a,b
    #[arg(long, default_value = "0.5,8")]
    beta: String,
    /// Initial coin-flip comments per user
    #[arg(long, default_value_t = 0)]
    switching: usize,
    /// Power-law exponent of per-user comment counts
    #[arg(long, default_value_t = 2.2)]
    theta: f64,
    /// Power-law cutoff of per-user comment counts
    #[arg(long, default_value_t = 0.3)]
    xmin: f64,
    /// Also generate this many linked Facebook/YouTube item pairs
    #[arg(long, default_value_t = 0)]
    item_pairs: usize,
    /// Cross-platform popularity coupling of linked pairs
    #[arg(long, default_value_t = 0.5)]
    coupling: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    configure_threads();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    eprintln!("{err}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let internal = err
                .downcast_ref::<echometrics::Error>()
                .is_none_or(|e| matches!(e, echometrics::Error::Io(_)));
            ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("ECHO_METRICS_THREADS") {
        if let Ok(threads) = raw.trim().parse::<usize>() {
            if threads > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => cmd_ingest(args),
        Command::Polarize(args) => cmd_polarize(args),
        Command::Density(args) => cmd_density(args),
        Command::Bc(args) => cmd_bc(args),
        Command::Ccdf(args) => cmd_ccdf(args),
        Command::Fitpl(args) => cmd_fitpl(args),
        Command::Posterior(args) => cmd_posterior(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Assoc(AssocCommand::Matrix(args)) => cmd_assoc_matrix(args),
        Command::Assoc(AssocCommand::Mantel(args)) => cmd_assoc_mantel(args),
        Command::Predict(PredictCommand::Sweep(args)) => cmd_predict_sweep(args),
        Command::Predict(PredictCommand::Cv(args)) => cmd_predict_cv(args),
        Command::Predict(PredictCommand::Transfer(args)) => cmd_predict_transfer(args),
        Command::Synth(args) => cmd_synth(args),
    }
}

fn ensure_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!(echometrics::Error::InvalidConfig(format!(
            "input file {} does not exist",
            path.display()
        )));
    }
    Ok(())
}

fn out_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

fn create(out: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = out.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_json<T: Serialize>(out: &Path, name: &str, value: &T) -> Result<()> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    fs::write(out.join(name), json)?;
    Ok(())
}

fn parse_format(s: &str) -> Result<EventFormat> {
    Ok(EventFormat::from_str(s)?)
}

fn parse_xmin(s: &str) -> Result<XminChoice> {
    if s == "auto" {
        return Ok(XminChoice::Auto);
    }
    let value: f64 = s
        .parse()
        .with_context(|| format!("--xmin must be a number or `auto`, got {s:?}"))?;
    Ok(XminChoice::Fixed(value))
}

fn parse_pair(s: &str, flag: &str) -> Result<(f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        bail!("--{flag} expects two comma-separated numbers, got {s:?}");
    }
    Ok((parts[0].trim().parse()?, parts[1].trim().parse()?))
}

fn parse_triple(s: &str, flag: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        bail!("--{flag} expects three comma-separated numbers, got {s:?}");
    }
    Ok((
        parts[0].trim().parse()?,
        parts[1].trim().parse()?,
        parts[2].trim().parse()?,
    ))
}

/// `a..b` (inclusive) or a comma list of prefix lengths.
fn parse_n_values(s: &str) -> Result<Vec<usize>> {
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().context("range start")?;
        let hi: usize = hi.trim().parse().context("range end")?;
        if lo < 1 || hi < lo {
            bail!("--n range {s:?} is empty or starts below 1");
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .with_context(|| format!("bad n value {part:?}"))
        })
        .collect()
}

fn load_records(path: &Path, format: &str, min_comments: u64) -> Result<Vec<UserRecord>> {
    ensure_input(path)?;
    let report = load_events(path, parse_format(format)?)?;
    if report.malformed > 0 {
        eprintln!(
            "note: {} of {} records malformed and skipped",
            report.malformed, report.total
        );
    }
    Ok(user_polarization(&report.dataset, min_comments)?.records)
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    ensure_input(&args.events)?;
    out_dir(&args.out)?;
    let report = load_events(&args.events, parse_format(&args.format)?)?;

    #[derive(Serialize)]
    struct IngestReport {
        events: usize,
        users: usize,
        items: usize,
        malformed: usize,
        total_records: usize,
        item_rows: Option<usize>,
        item_rows_rejected: Option<usize>,
    }

    let mut inputs = vec![args.events.clone()];
    let (item_rows, item_rows_rejected) = match &args.items {
        Some(path) => {
            ensure_input(path)?;
            inputs.push(path.clone());
            let load = load_item_stats(path)?;
            (Some(load.items.len()), Some(load.rejected))
        }
        None => (None, None),
    };

    write_events_jsonl(&report.dataset.events, create(&args.out, "events.jsonl")?)?;
    write_json(
        &args.out,
        "report.json",
        &IngestReport {
            events: report.dataset.events.len(),
            users: report.dataset.users.len(),
            items: report.dataset.items.len(),
            malformed: report.malformed,
            total_records: report.total,
            item_rows,
            item_rows_rejected,
        },
    )?;
    manifest::write_manifest(
        &args.out,
        "ingest",
        None,
        &inputs,
        &["events.jsonl", "report.json"],
    )
}

fn cmd_polarize(args: PolarizeArgs) -> Result<()> {
    ensure_input(&args.events)?;
    out_dir(&args.out)?;
    let report = load_events(&args.events, parse_format(&args.format)?)?;
    let outcome = user_polarization(&report.dataset, args.min_comments)?;

    #[derive(Serialize)]
    struct PolarizeSummary {
        users: usize,
        excluded: usize,
        polarized_fraction: Option<f64>,
    }

    write_users_csv(&outcome.records, create(&args.out, "users.csv")?)?;
    write_json(
        &args.out,
        "summary.json",
        &PolarizeSummary {
            users: outcome.records.len(),
            excluded: outcome.excluded,
            polarized_fraction: polarized_fraction(&outcome.records).ok(),
        },
    )?;
    manifest::write_manifest(
        &args.out,
        "polarize",
        None,
        &[args.events],
        &["users.csv", "summary.json"],
    )
}

fn cmd_density(args: DensityArgs) -> Result<()> {
    ensure_input(&args.users)?;
    out_dir(&args.out)?;
    let records = read_users_csv(File::open(&args.users)?)?;
    let bins = polarization_density(&records, args.bins)?;
    write_density_csv(&bins, create(&args.out, "density.csv")?)?;
    manifest::write_manifest(&args.out, "density", None, &[args.users], &["density.csv"])
}

fn cmd_bc(args: BcArgs) -> Result<()> {
    ensure_input(&args.values)?;
    out_dir(&args.out)?;
    let values = read_csv_column(&args.values, &args.column)?;
    let report = bimodality_coefficient(&values)?;
    write_json(&args.out, "bc.json", &report)?;
    manifest::write_manifest(&args.out, "bc", None, &[args.values], &["bc.json"])
}

fn cmd_ccdf(args: CcdfArgs) -> Result<()> {
    ensure_input(&args.values)?;
    out_dir(&args.out)?;
    let values = read_csv_column(&args.values, &args.column)?;
    let table = ccdf(&values)?;
    write_ccdf_csv(&table, create(&args.out, "ccdf.csv")?)?;
    manifest::write_manifest(&args.out, "ccdf", None, &[args.values], &["ccdf.csv"])
}

fn cmd_fitpl(args: FitplArgs) -> Result<()> {
    ensure_input(&args.values)?;
    out_dir(&args.out)?;
    let values = read_csv_column(&args.values, &args.column)?;
    let fit = fit_powerlaw(&values, parse_xmin(&args.xmin)?)?;
    write_json(&args.out, "fit.json", &fit)?;
    manifest::write_manifest(&args.out, "fitpl", None, &[args.values], &["fit.json"])
}

fn cmd_posterior(args: PosteriorArgs) -> Result<()> {
    ensure_input(&args.values)?;
    out_dir(&args.out)?;
    let values = read_csv_column(&args.values, &args.column)?;
    let fit = fit_powerlaw(&values, parse_xmin(&args.xmin)?)?;
    let draws = posterior_exponent(&values, &fit, args.iters, args.burn, args.seed)?;
    let interval = hdi(&draws.draws, 0.90)?;

    #[derive(Serialize)]
    struct PosteriorReport {
        x_min: f64,
        theta_hat: f64,
        sigma_hat: f64,
        n_tail: usize,
        mean: f64,
        sd: f64,
        acceptance_rate: f64,
        acceptance_flagged: bool,
        hdi90_lower: f64,
        hdi90_upper: f64,
        iterations: usize,
        burn_in: usize,
        seed: u64,
    }

    write_chain_csv(&draws, create(&args.out, "chain.csv")?)?;
    write_json(
        &args.out,
        "posterior.json",
        &PosteriorReport {
            x_min: fit.x_min,
            theta_hat: fit.theta_hat,
            sigma_hat: fit.sigma_hat,
            n_tail: fit.n_tail,
            mean: draws.mean(),
            sd: draws.sd(),
            acceptance_rate: draws.acceptance_rate,
            acceptance_flagged: draws.acceptance_flagged(),
            hdi90_lower: interval.lower,
            hdi90_upper: interval.upper,
            iterations: draws.iterations,
            burn_in: draws.burn_in,
            seed: draws.seed,
        },
    )?;
    manifest::write_manifest(
        &args.out,
        "posterior",
        Some(args.seed),
        &[args.values],
        &["chain.csv", "posterior.json"],
    )
}

fn cmd_compare(args: CompareArgs) -> Result<()> {
    ensure_input(&args.a)?;
    ensure_input(&args.b)?;
    out_dir(&args.out)?;
    let chain_a = read_chain_csv(File::open(&args.a)?)?;
    let chain_b = read_chain_csv(File::open(&args.b)?)?;
    let len = chain_a.len().min(chain_b.len());
    if len < 100 {
        bail!(echometrics::Error::TooFewValues { needed: 100, got: len });
    }
    let diffs: Vec<f64> = chain_a[..len]
        .iter()
        .zip(&chain_b[..len])
        .map(|(a, b)| a - b)
        .collect();
    let report = hdi(&diffs, args.mass)?;
    write_json(&args.out, "hdi.json", &report)?;
    manifest::write_manifest(
        &args.out,
        "compare",
        None,
        &[args.a, args.b],
        &["hdi.json"],
    )
}

fn cmd_assoc_matrix(args: AssocMatrixArgs) -> Result<()> {
    ensure_input(&args.items)?;
    out_dir(&args.out)?;
    let load = load_item_stats(&args.items)?;
    let actions: Vec<ActionKind> = args
        .actions
        .split(',')
        .map(|s| Ok(ActionKind::from_str(s.trim())?))
        .collect::<Result<_>>()?;
    let mut items = load.items;
    if let Some(category) = &args.category {
        let want = match category.as_str() {
            "science" => echometrics::ingest::Category::Science,
            "conspiracy" => echometrics::ingest::Category::Conspiracy,
            other => bail!("unknown category {other:?}"),
        };
        items.retain(|it| it.category == want);
    }
    let matrix = correlation_matrix(&items, &actions)?;
    write_matrix_csv(&matrix, create(&args.out, "matrix.csv")?)?;
    manifest::write_manifest(
        &args.out,
        "assoc matrix",
        None,
        &[args.items],
        &["matrix.csv"],
    )
}

fn cmd_assoc_mantel(args: AssocMantelArgs) -> Result<()> {
    ensure_input(&args.a)?;
    ensure_input(&args.b)?;
    out_dir(&args.out)?;
    let a = read_matrix_csv(File::open(&args.a)?)?;
    let b = read_matrix_csv(File::open(&args.b)?)?;
    let result = mantel_test(&a, &b, args.replicates, args.seed)?;
    write_json(&args.out, "mantel.json", &result)?;
    manifest::write_manifest(
        &args.out,
        "assoc mantel",
        Some(args.seed),
        &[args.a, args.b],
        &["mantel.json"],
    )
}

fn cmd_predict_sweep(args: SweepArgs) -> Result<()> {
    out_dir(&args.out)?;
    let records = load_records(&args.events, &args.format, 1)?;
    let n_values = parse_n_values(&args.n)?;
    let rows = n_sweep(&records, &n_values, args.per_class, args.ridge, args.seed)?;
    write_sweep_csv(&rows, create(&args.out, "sweep.csv")?)?;
    manifest::write_manifest(
        &args.out,
        "predict sweep",
        Some(args.seed),
        &[args.events],
        &["sweep.csv"],
    )
}

fn cmd_predict_cv(args: CvArgs) -> Result<()> {
    out_dir(&args.out)?;
    let records = load_records(&args.events, &args.format, 1)?;
    let cohort = build_cohort(&records, args.n, args.per_class, args.seed)?;
    let summary = monte_carlo_cv(
        &cohort.features,
        &cohort.labels,
        args.train,
        args.test,
        args.iters,
        args.ridge,
        args.seed,
    )?;
    write_json(&args.out, "cv.json", &summary)?;
    manifest::write_manifest(
        &args.out,
        "predict cv",
        Some(args.seed),
        &[args.events],
        &["cv.json"],
    )
}

fn cmd_predict_transfer(args: TransferArgs) -> Result<()> {
    out_dir(&args.out)?;
    let train_platform: Platform = args.train_platform.parse()?;
    let test_platform: Platform = args.test_platform.parse()?;
    if train_platform == test_platform {
        bail!("train and test platforms must differ");
    }
    let records = load_records(&args.events, &args.format, 1)?;
    let of = |p: Platform| -> Vec<UserRecord> {
        records.iter().filter(|r| r.platform == p).cloned().collect()
    };
    let train_cohort = build_cohort(&of(train_platform), args.n, args.per_class, args.seed)?;
    let test_cohort = build_cohort(&of(test_platform), args.n, args.per_class, args.seed)?;
    let model = fit_cohort(&train_cohort, args.ridge)?;
    let stats = transfer(&train_cohort, &test_cohort, args.ridge)?;
    write_json(&args.out, "model.json", &model)?;
    write_json(&args.out, "transfer.json", &stats)?;
    manifest::write_manifest(
        &args.out,
        "predict transfer",
        Some(args.seed),
        &[args.events],
        &["model.json", "transfer.json"],
    )
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    out_dir(&args.out)?;
    let (science, middle, conspiracy) = parse_triple(&args.mix, "mix")?;
    let (beta_a, beta_b) = parse_pair(&args.beta, "beta")?;
    let config = GeneratorConfig {
        n_users: args.users,
        platform: args.platform.parse()?,
        mixture: MixtureWeights { science, middle, conspiracy },
        beta_a,
        beta_b,
        switching_length: args.switching,
        activity_theta: args.theta,
        activity_xmin: args.xmin,
        seed: args.seed,
    };
    let (dataset, truths) = generate(&config)?;

    write_events_jsonl(&dataset.events, create(&args.out, "events.jsonl")?)?;
    write_events_csv(&dataset.events, create(&args.out, "events.csv")?)?;
    write_ground_truth_csv(&truths, create(&args.out, "ground_truth.csv")?)?;
    if args.item_pairs > 0 {
        let pair_config = GeneratorConfig { n_users: args.item_pairs, ..config };
        let (fb, yt) = generate_item_stats(&pair_config, args.coupling, args.seed)?;
        write_item_stats_csv(fb.iter().chain(yt.iter()), create(&args.out, "items.csv")?)?;
    } else {
        write_item_stats_csv(dataset.items.values(), create(&args.out, "items.csv")?)?;
    }
    manifest::write_manifest(
        &args.out,
        "synth",
        Some(args.seed),
        &[],
        &["events.jsonl", "events.csv", "items.csv", "ground_truth.csv"],
    )
}
