//! Command-line frontend for the semi-supervised least squares experiments.
//!
//! Every protocol is exposed as a subcommand driven by a flat key-value
//! config file plus flag overrides. File outputs land in `--out-dir`, are
//! bit-deterministic given the config, and each run leaves a provenance
//! sidecar recording the effective configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use selfls::config::{self, ConfigMap};
use selfls::{
    decision_values, default_1d_example, encode_labels, fit_ridge, run_bcd, run_fit,
    run_fraction_curve, run_minima_job, run_seed_sweep, run_unlabeled_curve, summarize,
    write_results_csv, write_summary_csv, write_sweep_csv, BcdConfig, Error, ErrorCategory,
    GroupKey, LabelEncoding, MinimaReport, Result, RidgeConfig, Variant, WeightVector,
    DEFAULT_GROUP_KEYS,
};

#[derive(Parser)]
#[command(
    name = "selfls",
    version,
    about = "Semi-supervised least squares classifiers and their experiment protocols",
    propagate_version = true
)]
struct Cli {
    /// Directory all output files are written into.
    #[arg(long, global = true, env = "SELFLS_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Worker-thread cap for repeats and restarts (0 = all cores). Output
    /// files are identical for any value.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one classifier on one split and print a JSON summary.
    Fit(FitArgs),
    /// Learning curve over a grid of unlabeled counts at fixed labeled size.
    #[command(name = "curve-unlabeled")]
    CurveUnlabeled(CurveArgs),
    /// Learning curve over labeled fractions at fixed total training size.
    #[command(name = "curve-fraction")]
    CurveFraction(CurveArgs),
    /// Enumerate descent fixed points from random restarts.
    Minima(MinimaArgs),
    /// One-dimensional two-point illustration of the first descent step.
    #[command(name = "example-1d")]
    Example1d(ExampleArgs),
    /// Per-seed comparison of supervised, soft and hard classifiers.
    #[command(name = "seed-sweep")]
    SeedSweep(SweepArgs),
    /// Aggregate a results CSV into per-group mean, std and count.
    Summarize(SummarizeArgs),
}

#[derive(Args, Default)]
struct ConfigArgs {
    /// Config file of `key = value` lines; flags override its values.
    #[arg(long, short = 'c', value_name = "FILE")]
    config: Option<PathBuf>,

    /// Positional alternative to --config.
    #[arg(value_name = "CONFIG_FILE")]
    config_positional: Option<PathBuf>,

    /// Extra `key=value` overrides applied after all other flags.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Dataset reference: `builtin:gaussians?d=..&sep=..&prior=..[&n=..][&seed=..]`
    /// or a CSV path.
    #[arg(long = "data", value_name = "REF")]
    dataset: Option<String>,

    /// Master seed for all derived random streams.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Ridge regularization strength.
    #[arg(long)]
    lambda: Option<f64>,

    /// Standardize features on labeled ∪ unlabeled statistics.
    #[arg(long)]
    standardize: Option<bool>,

    /// Labeled block size.
    #[arg(long)]
    labeled: Option<usize>,

    /// Test block size.
    #[arg(long)]
    test_size: Option<usize>,
}

impl ConfigArgs {
    fn build(&self) -> Result<ConfigMap> {
        if self.config.is_some() && self.config_positional.is_some() {
            return Err(Error::Config(
                "config file given both positionally and via --config".into(),
            ));
        }
        let mut map = match self.config.as_ref().or(self.config_positional.as_ref()) {
            Some(path) => ConfigMap::from_file(path)?,
            None => ConfigMap::new(),
        };
        if let Some(v) = &self.dataset {
            map.set("dataset", v);
        }
        if let Some(v) = self.seed {
            map.set("master_seed", v.to_string());
        }
        if let Some(v) = self.lambda {
            map.set("lambda", v.to_string());
        }
        if let Some(v) = self.standardize {
            map.set("standardize", v.to_string());
        }
        if let Some(v) = self.labeled {
            map.set("labeled", v.to_string());
        }
        if let Some(v) = self.test_size {
            map.set("test_size", v.to_string());
        }
        for pair in &self.set {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                Error::Config(format!("--set expects KEY=VALUE, got {pair:?}"))
            })?;
            map.set(key.trim(), value.trim());
        }
        Ok(map)
    }
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: ConfigArgs,

    /// Classifier to fit: supervised, soft, hard or oracle.
    #[arg(long)]
    classifier: Option<String>,

    /// Unlabeled block size.
    #[arg(long)]
    unlabeled: Option<usize>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    common: ConfigArgs,

    /// Unlabeled-count grid, e.g. `0,2,8,32` (curve-unlabeled).
    #[arg(long, value_name = "LIST")]
    u_grid: Option<String>,

    /// Labeled-fraction grid, e.g. `0.1,0.2,0.5,1.0` (curve-fraction).
    #[arg(long, value_name = "LIST")]
    fractions: Option<String>,

    /// Test holdout fraction (curve-fraction).
    #[arg(long)]
    test_fraction: Option<f64>,

    /// Repeats to average over.
    #[arg(long)]
    repeats: Option<usize>,

    /// Measures to emit: `Error`, `AverageLossTest` or both (comma list).
    /// Both are always computed; this filters the output rows.
    #[arg(long, value_name = "LIST")]
    measures: Option<String>,

    /// Results CSV file name (written inside --out-dir).
    #[arg(long, default_value = "results.csv")]
    out: String,
}

#[derive(Args)]
struct MinimaArgs {
    #[command(flatten)]
    common: ConfigArgs,

    /// Variant to enumerate: soft, hard or both.
    #[arg(long)]
    variant: Option<String>,

    /// Random restarts per variant.
    #[arg(long)]
    restarts: Option<usize>,

    /// Unlabeled block size.
    #[arg(long)]
    unlabeled: Option<usize>,

    /// Report JSON file name (written inside --out-dir).
    #[arg(long, default_value = "minima.json")]
    out: String,
}

#[derive(Args)]
struct ExampleArgs {
    /// Unlabeled positions (comma list; empty for none).
    #[arg(long, default_value = "-1,4", allow_hyphen_values = true)]
    unlabeled: String,

    /// The two labeled positions.
    #[arg(long, default_value = "-1,1", allow_hyphen_values = true)]
    labeled_positions: String,

    /// Ridge regularization strength.
    #[arg(long, default_value_t = 0.0)]
    lambda: f64,

    /// Plot-data CSV file name (written inside --out-dir).
    #[arg(long, default_value = "example_1d.csv")]
    out: String,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: ConfigArgs,

    /// Seeds: comma list (`3,5,9`) or half-open range (`0..50`).
    #[arg(long)]
    seeds: Option<String>,

    /// Unlabeled block size.
    #[arg(long)]
    unlabeled: Option<usize>,

    /// Sweep CSV file name (written inside --out-dir).
    #[arg(long, default_value = "seed_sweep.csv")]
    out: String,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Results CSV produced by a curve subcommand.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,

    /// Group keys, a comma list out of
    /// dataset,classifier,repeat,size_role,size,measure.
    #[arg(long, value_name = "LIST")]
    group_by: Option<String>,

    /// Summary CSV file name (written inside --out-dir).
    #[arg(long, default_value = "summary.csv")]
    out: String,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.category() {
                ErrorCategory::Config => 2,
                ErrorCategory::Data => 3,
                ErrorCategory::Numerical => 4,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build a {}-thread pool: {e}", cli.jobs)))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Fit(args) => cmd_fit(cli, args),
        Command::CurveUnlabeled(args) => cmd_curve(cli, args, CurveKind::Unlabeled),
        Command::CurveFraction(args) => cmd_curve(cli, args, CurveKind::Fraction),
        Command::Minima(args) => cmd_minima(cli, args),
        Command::Example1d(args) => cmd_example_1d(cli, args),
        Command::SeedSweep(args) => cmd_seed_sweep(cli, args),
        Command::Summarize(args) => cmd_summarize(cli, args),
    }
}

/// Resolves an output file name inside the output directory, refusing paths
/// that would escape it.
fn out_path(cli: &Cli, name: &str) -> Result<PathBuf> {
    let name_path = Path::new(name);
    if name_path.is_absolute()
        || name_path
            .components()
            .any(|c| matches!(c, std::path::Component::ParentDir))
    {
        return Err(Error::Config(format!(
            "output name {name:?} must be relative to the output directory and free of `..`"
        )));
    }
    if !cli.out_dir.as_os_str().is_empty() && !cli.out_dir.exists() {
        std::fs::create_dir_all(&cli.out_dir)?;
    }
    Ok(cli.out_dir.join(name_path))
}

#[derive(Serialize)]
struct Provenance<'a> {
    artifact: &'static str,
    version: &'static str,
    subcommand: &'static str,
    master_seed: Option<u64>,
    config: &'a BTreeMap<String, String>,
}

/// Writes `<output>.provenance.json` echoing the effective configuration.
fn write_provenance(
    output: &Path,
    subcommand: &'static str,
    cfg: &ConfigMap,
    master_seed: Option<u64>,
) -> Result<()> {
    let sidecar = Provenance {
        artifact: "selfls",
        version: env!("CARGO_PKG_VERSION"),
        subcommand,
        master_seed,
        config: cfg.entries(),
    };
    let mut path = output.as_os_str().to_owned();
    path.push(".provenance.json");
    let json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| Error::Internal(format!("provenance serialization: {e}")))?;
    std::fs::write(PathBuf::from(path), json + "\n")?;
    Ok(())
}

fn cmd_fit(_cli: &Cli, args: &FitArgs) -> Result<()> {
    let mut map = args.common.build()?;
    if let Some(v) = &args.classifier {
        map.set("classifier", v);
    }
    if let Some(v) = args.unlabeled {
        map.set("unlabeled", v.to_string());
    }
    let cfg = config::fit_config(&map)?;
    let output = run_fit(&cfg)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&output)
            .map_err(|e| Error::Internal(format!("fit serialization: {e}")))?
    );
    Ok(())
}

enum CurveKind {
    Unlabeled,
    Fraction,
}

fn cmd_curve(cli: &Cli, args: &CurveArgs, kind: CurveKind) -> Result<()> {
    let mut map = args.common.build()?;
    if let Some(v) = &args.u_grid {
        map.set("u_grid", v);
    }
    if let Some(v) = &args.fractions {
        map.set("fractions", v);
    }
    if let Some(v) = args.test_fraction {
        map.set("test_fraction", v.to_string());
    }
    if let Some(v) = args.repeats {
        map.set("repeats", v.to_string());
    }
    if let Some(v) = &args.measures {
        map.set("measures", v);
    }

    let out = out_path(cli, &args.out)?;
    let (table, seed, name) = match kind {
        CurveKind::Unlabeled => {
            let cfg = config::unlabeled_curve_config(&map)?;
            (run_unlabeled_curve(&cfg)?, cfg.master_seed, "curve-unlabeled")
        }
        CurveKind::Fraction => {
            let cfg = config::fraction_curve_config(&map)?;
            (run_fraction_curve(&cfg)?, cfg.master_seed, "curve-fraction")
        }
    };
    write_results_csv(&table, &out)?;
    write_provenance(&out, name, &map, Some(seed))?;
    println!("wrote {} ({} rows)", out.display(), table.len());
    Ok(())
}

/// JSON document emitted by the minima subcommand.
#[derive(Serialize)]
struct MinimaDocument {
    reports: BTreeMap<String, MinimaReport>,
}

fn cmd_minima(cli: &Cli, args: &MinimaArgs) -> Result<()> {
    let mut map = args.common.build()?;
    if let Some(v) = &args.variant {
        map.set("variant", v);
    }
    if let Some(v) = args.restarts {
        map.set("restarts", v.to_string());
    }
    if let Some(v) = args.unlabeled {
        map.set("unlabeled", v.to_string());
    }
    let cfg = config::minima_config(&map)?;
    let reports = run_minima_job(&cfg)?;
    let doc = MinimaDocument {
        reports: reports
            .into_iter()
            .map(|(v, r)| (v.name().to_string(), r))
            .collect(),
    };
    let out = out_path(cli, &args.out)?;
    let json = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Internal(format!("minima serialization: {e}")))?;
    std::fs::write(&out, json + "\n")?;
    write_provenance(&out, "minima", &map, Some(cfg.seed))?;
    for (name, report) in &doc.reports {
        println!(
            "{name}: {} distinct minima over {} runs",
            report.distinct_count(),
            report.total_runs
        );
    }
    println!("wrote {}", out.display());
    Ok(())
}

/// JSON document emitted by the example-1d subcommand.
#[derive(Serialize)]
struct ExampleReport {
    supervised_weights: WeightVector,
    soft_weights: WeightVector,
    hard_weights: WeightVector,
    supervised_boundary: Option<f64>,
    soft_boundary: Option<f64>,
    hard_boundary: Option<f64>,
    soft_boundary_shift: Option<f64>,
    hard_boundary_shift: Option<f64>,
    soft_pseudo_targets: Vec<f64>,
    hard_pseudo_targets: Vec<f64>,
}

/// Where a 1-D linear decision function crosses the encoding midpoint.
fn boundary_1d(w: &WeightVector, encoding: LabelEncoding) -> Option<f64> {
    let slope = w.values()[0];
    let intercept = w.values()[1];
    if slope == 0.0 {
        None
    } else {
        Some((encoding.midpoint() - intercept) / slope)
    }
}

fn parse_f64_list(raw: &str, what: &str) -> Result<Vec<f64>> {
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Error::Config(format!("invalid {what} entry {s:?} in {raw:?}")))
        })
        .collect()
}

fn cmd_example_1d(cli: &Cli, args: &ExampleArgs) -> Result<()> {
    let unlabeled = parse_f64_list(&args.unlabeled, "unlabeled position")?;
    let positions = parse_f64_list(&args.labeled_positions, "labeled position")?;
    if positions.len() != 2 {
        return Err(Error::Config(format!(
            "exactly two labeled positions are required, got {}",
            positions.len()
        )));
    }
    let encoding = LabelEncoding::default();
    let ridge = RidgeConfig {
        lambda: args.lambda,
        penalize_intercept: false,
    };
    let (ds, x_unl_raw) = if positions == [-1.0, 1.0] {
        default_1d_example(&unlabeled)?
    } else {
        selfls::generate_1d_example((positions[0], positions[1]), ("a", "b"), &unlabeled)?
    };

    let x_lab = ds.features().with_intercept()?;
    let y = encode_labels(ds.labels(), ds.class_map(), encoding)?;
    let x_unl = x_unl_raw.with_intercept()?;

    let supervised = fit_ridge(&x_lab, &y, &ridge)?;
    // one descent iteration: the first self-learning step
    let step_cfg = BcdConfig {
        max_iterations: 1,
        ridge,
        ..BcdConfig::default()
    };
    let soft = run_bcd(Variant::SoftLabel, &x_lab, &y, &x_unl, encoding, &step_cfg)?;
    let hard = run_bcd(Variant::HardLabel, &x_lab, &y, &x_unl, encoding, &step_cfg)?;

    let sup_b = boundary_1d(&supervised, encoding);
    let soft_b = boundary_1d(&soft.weights, encoding);
    let hard_b = boundary_1d(&hard.weights, encoding);
    let shift = |b: Option<f64>| match (b, sup_b) {
        (Some(x), Some(s)) => Some(x - s),
        _ => None,
    };
    let report = ExampleReport {
        soft_boundary_shift: shift(soft_b),
        hard_boundary_shift: shift(hard_b),
        supervised_boundary: sup_b,
        soft_boundary: soft_b,
        hard_boundary: hard_b,
        soft_pseudo_targets: soft.pseudo_targets.values().to_vec(),
        hard_pseudo_targets: hard.pseudo_targets.values().to_vec(),
        supervised_weights: supervised.clone(),
        soft_weights: soft.weights.clone(),
        hard_weights: hard.weights.clone(),
    };

    // plot data: every object with its supervised decision value
    let out = out_path(cli, &args.out)?;
    let mut lines = String::from("position,role,decision_value\n");
    let lab_scores = decision_values(&supervised, &x_lab)?;
    for (i, score) in lab_scores.iter().enumerate() {
        lines.push_str(&format!("{},labeled,{score}\n", ds.features().get(i, 0)));
    }
    let unl_scores = decision_values(&supervised, &x_unl)?;
    for (i, score) in unl_scores.iter().enumerate() {
        lines.push_str(&format!("{},unlabeled,{score}\n", x_unl_raw.get(i, 0)));
    }
    std::fs::write(&out, lines)?;

    println!(
        "{}",
        serde_json::to_string_pretty(&report)
            .map_err(|e| Error::Internal(format!("report serialization: {e}")))?
    );
    Ok(())
}

fn cmd_seed_sweep(cli: &Cli, args: &SweepArgs) -> Result<()> {
    let mut map = args.common.build()?;
    if let Some(v) = &args.seeds {
        map.set("seeds", v);
    }
    if let Some(v) = args.unlabeled {
        map.set("unlabeled", v.to_string());
    }
    let (cfg, seeds) = config::sweep_config(&map)?;
    let rows = run_seed_sweep(&cfg, &seeds)?;
    let out = out_path(cli, &args.out)?;
    write_sweep_csv(&rows, &out)?;
    write_provenance(&out, "seed-sweep", &map, None)?;
    let collapsed = rows
        .iter()
        .filter(|r| r.classifier == "self_learning_hard" && r.single_class)
        .count();
    println!(
        "wrote {} ({} rows; hard-label single-class on {collapsed} of {} seeds)",
        out.display(),
        rows.len(),
        seeds.len()
    );
    Ok(())
}

fn cmd_summarize(cli: &Cli, args: &SummarizeArgs) -> Result<()> {
    let table = selfls::read_results_csv(&args.input)?;
    let group_keys: Vec<GroupKey> = match &args.group_by {
        None => DEFAULT_GROUP_KEYS.to_vec(),
        Some(raw) => raw
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(GroupKey::parse)
            .collect::<Result<_>>()?,
    };
    let rows = summarize(&table, &group_keys)?;
    let out = out_path(cli, &args.out)?;
    write_summary_csv(&rows, &group_keys, &out)?;
    println!("wrote {} ({} groups)", out.display(), rows.len());
    Ok(())
}
