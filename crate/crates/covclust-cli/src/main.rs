//! Command-line front end: dataset generation, clustering of CSV data,
//! experiment presets and clustering evaluation.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use covclust::eval::{preset, preset_names, ExperimentConfig};
use covclust::generators::{self, Family};
use covclust::{
    io, misclassification_rate, offline_cluster, pairwise_matrix, run_experiment,
    validate_dataset, DatasetKind, DissimConfig, GroundTruth, PairwiseMatrix, WeightRule,
};

const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Internal(m) => write!(f, "{m}"),
        }
    }
}

impl From<covclust::Error> for CliError {
    fn from(err: covclust::Error) -> Self {
        CliError::Data(err.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn data(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into())
}

fn internal(msg: impl Into<String>) -> CliError {
    CliError::Internal(msg.into())
}

#[derive(Parser)]
#[command(
    name = "covclust",
    version,
    about = "Covariance-based clustering of wide-sense stationary time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset with ground-truth labels
    Generate(GenerateArgs),
    /// Cluster a dataset CSV (or an injected distance matrix)
    Cluster(ClusterArgs),
    /// Run a named experiment preset and write rate reports
    Experiment(ExperimentArgs),
    /// Score a clustering CSV against a ground-truth CSV
    Eval(EvalArgs),
}

fn load_config_file<T: for<'de> Deserialize<'de> + Default>(
    path: &Option<PathBuf>,
) -> CliResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| usage(format!("cannot read config {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| usage(format!("invalid config {}: {e}", p.display())))
        }
    }
}

fn parse_family(name: &str) -> CliResult<Family> {
    Family::parse(name).ok_or_else(|| usage(format!("unknown family '{name}' (rotation|fgn|ar1)")))
}

fn parse_params(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| usage(format!("invalid parameter '{s}'")))
        })
        .collect()
}

fn create_out_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| data(format!("cannot create output directory {}: {e}", dir.display())))
}

// ---------------------------------------------------------------------------
// generate

#[derive(Args)]
struct GenerateArgs {
    /// JSON config file; explicit flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Process family: rotation | fgn | ar1
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated group parameters (default: the preset list)
    #[arg(long)]
    params: Option<String>,
    /// Paths per group
    #[arg(long)]
    per_group: Option<usize>,
    /// Path length for an offline dataset
    #[arg(long)]
    length: Option<usize>,
    /// Emit the online snapshot at this time step instead
    #[arg(long)]
    snapshot_t: Option<usize>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct GenerateConfig {
    family: Option<String>,
    params: Option<Vec<f64>>,
    per_group: Option<usize>,
    length: Option<usize>,
    snapshot_t: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize, PartialEq)]
struct GenerateManifest {
    artifact_version: String,
    command: String,
    family: String,
    params: Vec<f64>,
    per_group: usize,
    length: Option<usize>,
    snapshot_t: Option<usize>,
    seed: u64,
    jittered_factorizations: usize,
}

fn cmd_generate(args: GenerateArgs) -> CliResult<()> {
    let file: GenerateConfig = load_config_file(&args.config)?;
    let family_name = args
        .family
        .or(file.family)
        .ok_or_else(|| usage("--family is required (rotation|fgn|ar1)"))?;
    let family = parse_family(&family_name)?;
    let params = match (args.params, file.params) {
        (Some(text), _) => parse_params(&text)?,
        (None, Some(list)) => list,
        (None, None) => generators::preset_params(family),
    };
    let per_group = args.per_group.or(file.per_group).unwrap_or(10);
    let snapshot_t = args.snapshot_t.or(file.snapshot_t);
    let length = args.length.or(file.length);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("."));

    let jitter_before = generators::jittered_factorization_count();
    let (ds, gt) = match snapshot_t {
        Some(t) => generators::build_online_snapshot(family, &params, t, seed)?,
        None => {
            let length = length.ok_or_else(|| usage("--length is required for offline datasets"))?;
            generators::build_offline_dataset(family, &params, per_group, length, seed)?
        }
    };
    create_out_dir(&out)?;
    io::write_dataset_file(out.join("dataset.csv"), &ds)?;
    io::write_ground_truth(
        std::fs::File::create(out.join("truth.csv")).map_err(covclust::Error::from)?,
        &ds,
        &gt,
    )?;
    let manifest = GenerateManifest {
        artifact_version: VERSION.to_string(),
        command: "generate".to_string(),
        family: family.name().to_string(),
        params,
        per_group,
        length,
        snapshot_t,
        seed,
        jittered_factorizations: generators::jittered_factorization_count() - jitter_before,
    };
    io::write_json_file(out.join("manifest.json"), &manifest)?;
    println!(
        "wrote {} paths to {}",
        ds.len(),
        out.join("dataset.csv").display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// cluster

#[derive(Args)]
struct ClusterArgs {
    /// JSON config file; explicit flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input dataset CSV (series_id,t,value)
    #[arg(long)]
    input: Option<PathBuf>,
    /// Injected distance matrix CSV (i,j,value); skips dissimilarity computation
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Ground-truth CSV (series_id,label); prints the misclassification rate
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Number of clusters
    #[arg(long)]
    kappa: Option<usize>,
    /// Use the online ensemble algorithm
    #[arg(long)]
    online: bool,
    /// Log-transform covariance entries (drops the mean term)
    #[arg(long)]
    log_star: bool,
    /// Drop the mean term of the dissimilarity
    #[arg(long)]
    no_mean_term: bool,
    /// Weight rule: telescoping | telescoping-cubed
    #[arg(long)]
    weight_rule: Option<String>,
    /// Output clustering CSV
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ClusterConfig {
    input: Option<PathBuf>,
    matrix: Option<PathBuf>,
    truth: Option<PathBuf>,
    kappa: Option<usize>,
    online: Option<bool>,
    log_star: Option<bool>,
    no_mean_term: Option<bool>,
    weight_rule: Option<String>,
    out: Option<PathBuf>,
}

fn cmd_cluster(args: ClusterArgs) -> CliResult<()> {
    let file: ClusterConfig = load_config_file(&args.config)?;
    let input = args.input.or(file.input);
    let matrix_path = args.matrix.or(file.matrix);
    let truth = args.truth.or(file.truth);
    let kappa = args
        .kappa
        .or(file.kappa)
        .ok_or_else(|| usage("--kappa is required"))?;
    let online = args.online || file.online.unwrap_or(false);
    let log_star = args.log_star || file.log_star.unwrap_or(false);
    let no_mean_term = args.no_mean_term || file.no_mean_term.unwrap_or(false);
    let weight_rule = match args.weight_rule.or(file.weight_rule) {
        None => WeightRule::Telescoping,
        Some(name) => WeightRule::parse(&name)
            .ok_or_else(|| usage(format!("unknown weight rule '{name}'")))?,
    };
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("clusters.csv"));

    let cfg = DissimConfig {
        weights: weight_rule,
        use_log_star: log_star,
        include_mean_term: !no_mean_term,
        ..DissimConfig::default()
    };

    // Either a real dataset, or id stubs when clustering a bare matrix.
    let kind = if online { DatasetKind::OnlineSnapshot } else { DatasetKind::Offline };
    let (ids, dist): (Vec<String>, PairwiseMatrix) = match (&input, &matrix_path) {
        (Some(input), matrix) => {
            let ds = io::read_dataset_file(input, kind)?;
            let report = validate_dataset(&ds, None);
            if !report.is_empty() {
                return Err(data(format!(
                    "invalid dataset {}: {}",
                    input.display(),
                    report.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
                )));
            }
            let dist = match matrix {
                Some(path) => {
                    let m = read_matrix_file(path)?;
                    if m.len() != ds.len() {
                        return Err(data(format!(
                            "matrix has {} rows but dataset has {} paths",
                            m.len(),
                            ds.len()
                        )));
                    }
                    m
                }
                None => pairwise_matrix(&ds, &cfg)?,
            };
            (ds.ids(), dist)
        }
        (None, Some(path)) => {
            let m = read_matrix_file(path)?;
            let ids = (1..=m.len()).map(|i| i.to_string()).collect();
            (ids, m)
        }
        (None, None) => return Err(usage("need --input and/or --matrix")),
    };

    if kappa < 2 || kappa > ids.len() {
        return Err(data(format!(
            "kappa={kappa} out of range for {} paths",
            ids.len()
        )));
    }

    let assignment = if online {
        let result = covclust::cluster::online_cluster_from_matrix(&dist, kappa, cfg.weights)?;
        if result.used_offline_fallback {
            eprintln!("warning: degenerate ensemble, fell back to the offline algorithm");
        }
        result.clustering.assignment
    } else {
        let result = offline_cluster(&dist, kappa)?;
        if result.degenerate {
            eprintln!("warning: all pairwise dissimilarities are zero; clustering is arbitrary");
        }
        result.clustering.assignment
    };

    io::write_clustering(
        std::fs::File::create(&out).map_err(|e| internal(format!("cannot write {}: {e}", out.display())))?,
        &ids,
        &assignment,
    )?;
    println!("wrote {}", out.display());

    if let Some(truth) = truth {
        let gt = read_truth_file(&truth, &ids)?;
        let rate = misclassification_rate(&assignment, &gt)?;
        println!("misclassification_rate,{rate}");
    }
    Ok(())
}

fn read_matrix_file(path: &Path) -> CliResult<PairwiseMatrix> {
    let file = std::fs::File::open(path)
        .map_err(|e| data(format!("cannot open {}: {e}", path.display())))?;
    Ok(io::read_matrix(file)?)
}

fn read_truth_file(path: &Path, ids: &[String]) -> CliResult<GroundTruth> {
    let file = std::fs::File::open(path)
        .map_err(|e| data(format!("cannot open {}: {e}", path.display())))?;
    Ok(io::read_ground_truth(file, ids)?)
}

// ---------------------------------------------------------------------------
// experiment

#[derive(Args)]
struct ExperimentArgs {
    /// JSON config file; explicit flags override file values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset name: fig1 | fig2 | fig3 | fig4 | smoke
    #[arg(long)]
    preset: Option<String>,
    /// Runs per time step
    #[arg(long)]
    runs: Option<usize>,
    /// First time step to keep
    #[arg(long)]
    t_min: Option<usize>,
    /// Last time step to keep
    #[arg(long)]
    t_max: Option<usize>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct ExperimentFileConfig {
    preset: Option<String>,
    runs: Option<usize>,
    t_min: Option<usize>,
    t_max: Option<usize>,
    seed: Option<u64>,
    out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ExperimentManifest {
    artifact_version: String,
    command: String,
    preset: String,
    config: ExperimentConfig,
}

fn cmd_experiment(args: ExperimentArgs) -> CliResult<()> {
    let file: ExperimentFileConfig = load_config_file(&args.config)?;
    let preset_name = args
        .preset
        .or(file.preset)
        .ok_or_else(|| usage(format!("--preset is required ({})", preset_names().join("|"))))?;
    let mut configs = preset(&preset_name)
        .ok_or_else(|| usage(format!("unknown preset '{preset_name}' ({})", preset_names().join("|"))))?;
    let out = args.out.or(file.out).unwrap_or_else(|| PathBuf::from("experiments"));
    let runs = args.runs.or(file.runs);
    let t_min = args.t_min.or(file.t_min);
    let t_max = args.t_max.or(file.t_max);
    let seed = args.seed.or(file.seed);

    create_out_dir(&out)?;
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string();

    for cfg in &mut configs {
        if let Some(runs) = runs {
            cfg.runs = runs;
        }
        if let Some(seed) = seed {
            cfg.master_seed = seed;
        }
        cfg.t_values.retain(|&t| {
            t >= t_min.unwrap_or(usize::MIN) && t <= t_max.unwrap_or(usize::MAX)
        });
        if cfg.t_values.is_empty() {
            return Err(usage("t range excludes every time step"));
        }

        let reports = run_experiment(cfg)?;
        let tag = cfg.dataset_tag();
        for report in &reports {
            let base = format!("{tag}_{}_{stamp}", report.algorithm);
            let rates_path = out.join(format!("{base}.csv"));
            io::write_report(
                std::fs::File::create(&rates_path)
                    .map_err(|e| internal(format!("cannot write {}: {e}", rates_path.display())))?,
                report,
            )?;
            let summary_path = out.join(format!("{base}_summary.csv"));
            io::write_report_summary(
                std::fs::File::create(&summary_path)
                    .map_err(|e| internal(format!("cannot write {}: {e}", summary_path.display())))?,
                report,
            )?;
            println!("wrote {}", rates_path.display());
            println!("wrote {}", summary_path.display());
        }
        let manifest = ExperimentManifest {
            artifact_version: VERSION.to_string(),
            command: "experiment".to_string(),
            preset: preset_name.clone(),
            config: cfg.clone(),
        };
        io::write_json_file(out.join(format!("{tag}_{stamp}_manifest.json")), &manifest)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// eval

#[derive(Args)]
struct EvalArgs {
    /// Clustering CSV (series_id,cluster)
    #[arg(long)]
    clustering: PathBuf,
    /// Ground-truth CSV (series_id,label)
    #[arg(long)]
    truth: PathBuf,
}

fn cmd_eval(args: EvalArgs) -> CliResult<()> {
    let truth_file = std::fs::File::open(&args.truth)
        .map_err(|e| data(format!("cannot open {}: {e}", args.truth.display())))?;
    let rows = io::read_label_rows(truth_file)?;
    if rows.is_empty() {
        return Err(data("ground-truth file has no rows"));
    }
    let ids: Vec<String> = rows.iter().map(|(id, _)| id.clone()).collect();
    let labels: Vec<u32> = rows.iter().map(|(_, l)| *l).collect();
    let kappa = labels.iter().copied().max().unwrap_or(0);
    let gt = GroundTruth::new(labels, kappa);

    let cluster_file = std::fs::File::open(&args.clustering)
        .map_err(|e| data(format!("cannot open {}: {e}", args.clustering.display())))?;
    let output = io::read_clustering_labels(cluster_file, &ids)?;
    let rate = misclassification_rate(&output, &gt)?;
    println!("misclassification_rate,{rate}");
    Ok(())
}

// ---------------------------------------------------------------------------

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Eval(args) => cmd_eval(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}
