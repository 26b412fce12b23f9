use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fasthash::bench::{infer_bench, BenchOptions, BenchRow};
use fasthash::dataset::{read_codes, read_features, write_codes, write_features};
use fasthash::{
    build_similarity, encode, evaluate, train, Error, GaussianClusters, HashModel, Labels, LossKind, Result,
    SimilarityMode, TrainConfig, XorClusters,
};

#[derive(Parser)]
#[command(name = "fasthash", version, about = "Supervised hashing with graph cuts and boosted trees")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a model from features and labels.
    Train(TrainArgs),
    /// Encode features with a trained model.
    Encode(EncodeArgs),
    /// Retrieval metrics of query codes against database codes.
    Eval(EvalArgs),
    /// Compare Block GraphCut, ICM and spectral inference on one bit.
    InferBench(BenchArgs),
    /// Write a synthetic dataset.
    Synth(SynthArgs),
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    labels: PathBuf,
    /// `key = value` config file; defaults apply to missing keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key, e.g. `--set bits=64`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    out: PathBuf,
    /// Per-bit diagnostics CSV (default: `<out>.bits.csv`).
    #[arg(long)]
    diagnostics: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    db_codes: PathBuf,
    #[arg(long)]
    query_codes: PathBuf,
    /// Database labels.
    #[arg(long)]
    labels: PathBuf,
    /// Query labels (default: the database labels, for self-retrieval).
    #[arg(long)]
    query_labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Multiclass)]
    mode: Mode,
    /// Precision cutoff.
    #[arg(long, default_value_t = 100)]
    k: usize,
    /// Also report KNN classification error with this many neighbors.
    #[arg(long)]
    knn: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Method name recorded in the CSV.
    #[arg(long, default_value = "fasthash")]
    method: String,
    /// Seed recorded in the CSV.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Labels defining the similarity graph; without them a 10-cluster
    /// labelling of `--n` examples is used.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Multiclass)]
    mode: Mode,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value = "ksh")]
    loss: String,
    #[arg(long, default_value_t = 100)]
    max_neighbors: usize,
    #[arg(long, default_value_t = 2)]
    sweeps: usize,
    #[arg(long, default_value_t = 5)]
    seeds: u64,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Multiclass,
    Multilabel,
}

impl From<Mode> for SimilarityMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Multiclass => SimilarityMode::Multiclass,
            Mode::Multilabel => SimilarityMode::Multilabel,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SynthKind {
    Gaussian,
    Xor,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value_t = SynthKind::Gaussian)]
    kind: SynthKind,
    #[arg(long, default_value_t = 2500)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    d: usize,
    /// Gaussian only.
    #[arg(long, default_value_t = 10)]
    classes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    features_out: PathBuf,
    #[arg(long)]
    labels_out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error[config]: cannot set thread count: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match cli.command {
        Command::Train(a) => run_train(a),
        Command::Encode(a) => run_encode(a),
        Command::Eval(a) => run_eval(a),
        Command::InferBench(a) => run_bench(a),
        Command::Synth(a) => run_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.class(), e.to_string().replace('\n', " "));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run_train(a: TrainArgs) -> Result<()> {
    let mut cfg = match &a.config {
        Some(path) => TrainConfig::parse(&fs::read_to_string(path)?)?,
        None => TrainConfig::default(),
    };
    for kv in &a.overrides {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    cfg.validate()?;
    let x = read_features(&a.features)?;
    let labels = Labels::read(&a.labels, cfg.similarity)?;
    if labels.len() != x.n() {
        return Err(Error::Data(format!("{} labels for {} examples", labels.len(), x.n())));
    }
    let sim = build_similarity(&labels, cfg.max_neighbors, cfg.seed)?;
    let (model, report) = train(&x, &sim, &cfg)?;
    model.save(&a.out)?;
    let diag = a.diagnostics.unwrap_or_else(|| suffixed(&a.out, ".bits.csv"));
    fs::write(&diag, report.to_csv())?;
    println!(
        "trained {} bits on {} examples ({} pairs, {} blocks); model {}, diagnostics {}",
        model.bits(),
        x.n(),
        sim.pair_count(),
        report.block_count,
        a.out.display(),
        diag.display()
    );
    Ok(())
}

fn suffixed(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run_encode(a: EncodeArgs) -> Result<()> {
    let model = HashModel::load(&a.model)?;
    let x = read_features(&a.features)?;
    let codes = encode(&model, &x)?;
    write_codes(&a.out, &codes)?;
    println!("encoded {} examples to {} bits", codes.len(), codes.bits());
    Ok(())
}

fn run_eval(a: EvalArgs) -> Result<()> {
    let db = read_codes(&a.db_codes)?;
    let queries = read_codes(&a.query_codes)?;
    let db_labels = Labels::read(&a.labels, a.mode.into())?;
    let query_labels = match &a.query_labels {
        Some(p) => Labels::read(p, a.mode.into())?,
        None => db_labels.clone(),
    };
    let rel = db_labels.relevance(&query_labels)?;
    let report = evaluate(&queries, &db, &rel, a.k, a.knn)?;
    print!("{}", report.to_table());
    if let Some(path) = &a.csv {
        fs::write(path, report.to_csv(db.bits(), &a.method, a.seed))?;
    }
    Ok(())
}

fn run_bench(a: BenchArgs) -> Result<()> {
    let loss: LossKind = a.loss.parse()?;
    let labels = match &a.labels {
        Some(p) => Labels::read(p, a.mode.into())?,
        None => Labels::Classes((0..a.n).map(|i| (i % 10) as u32).collect()),
    };
    let opts = BenchOptions {
        loss,
        sweeps: a.sweeps,
        ..BenchOptions::default()
    };
    let mut csv = format!("{}\n", BenchRow::CSV_HEADER);
    println!("{:<10} {:>6} {:>14} {:>12} {:>10}", "method", "seed", "objective", "normalized", "secs");
    for seed in 0..a.seeds {
        let sim = build_similarity(&labels, a.max_neighbors, seed)?;
        for row in infer_bench(&sim, opts, seed)? {
            println!(
                "{:<10} {:>6} {:>14.2} {:>12.6} {:>10.4}",
                row.method.name(),
                row.seed,
                row.objective,
                row.normalized,
                row.secs
            );
            csv.push_str(&row.csv_row());
            csv.push('\n');
        }
    }
    if let Some(path) = &a.csv {
        fs::write(path, csv)?;
    }
    Ok(())
}

fn run_synth(a: SynthArgs) -> Result<()> {
    let (x, y) = match a.kind {
        SynthKind::Gaussian => GaussianClusters {
            n: a.n,
            d: a.d,
            classes: a.classes,
            ..GaussianClusters::default()
        }
        .generate(a.seed)?,
        SynthKind::Xor => XorClusters {
            n: a.n,
            d: a.d,
            ..XorClusters::default()
        }
        .generate(a.seed)?,
    };
    write_features(&a.features_out, &x)?;
    Labels::Classes(y).write(&a.labels_out)?;
    println!("wrote {} examples with {} features", x.n(), x.d());
    Ok(())
}
