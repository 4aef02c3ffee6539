//! Command-line driver: generate workloads, train lifetime models, run
//! collector comparisons, tune decision thresholds, and diff heap histograms.
//!
//! Exit codes: 0 success, 2 usage or malformed input, 3 safety violation
//! (a reclaim of a reachable object, a partition breach, or reclaimed-set
//! divergence between arms), 1 any other failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use predgc::baseline::{collect_labels, CostModel};
use predgc::experiment::{self, ExperimentError};
use predgc::heap::HeapConfig;
use predgc::histogram::{delta_csv, histo_diff, Histogram};
use predgc::predictor::{
    dataset_from_csv, dataset_to_csv, score_dataset, scored_from_csv, tune_threshold, CountsModel,
    DecisionPolicy, PredictionTarget,
};
use predgc::runtime::{ExecutionMode, TrainedModels};
use predgc::trace::{generate_synthetic, Trace, WorkloadConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_SAFETY: u8 = 3;
const EXIT_FAILURE: u8 = 1;

/// Output-directory override honored by `run` and `train`.
const OUT_DIR_ENV: &str = "PREDGC_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "predgc",
    version,
    about = "Predictive generational GC simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic workload trace.
    Gen(GenArgs),
    /// Replay traces under the baseline collector and fit lifetime models.
    Train(TrainArgs),
    /// Replay one workload under the baseline and predictive collectors.
    Run(Box<RunArgs>),
    /// Pick the smallest decision threshold meeting a target precision.
    Tune(TuneArgs),
    /// Diff two heap histograms per class (new minus old).
    HistoDiff(HistoDiffArgs),
}

#[derive(Args)]
struct WorkloadArgs {
    /// Generator seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of control flows.
    #[arg(long)]
    flows: Option<usize>,
    /// Total allocations, rounded up to a multiple of the flow count.
    #[arg(long)]
    allocs: Option<usize>,
    /// Fraction of allocations dying before their first collection.
    #[arg(long)]
    eden_mortality: Option<f64>,
    /// Fraction surviving at least one minor GC but not reaching Tenured.
    #[arg(long)]
    mid: Option<f64>,
    /// Fraction staying linked to run end.
    #[arg(long)]
    long: Option<f64>,
}

impl WorkloadArgs {
    fn build(&self, fallback_seed: u64) -> Result<WorkloadConfig, Failure> {
        let flows = self.flows.unwrap_or(4);
        let allocs = self.allocs.unwrap_or(20_000);
        if flows == 0 {
            return Err(usage("--flows must be at least 1"));
        }
        if allocs == 0 {
            return Err(usage("--allocs must be positive"));
        }
        let mut cfg = WorkloadConfig::with_defaults(
            flows,
            allocs.div_ceil(flows),
            self.seed.unwrap_or(fallback_seed),
        );
        if let Some(m) = self.eden_mortality {
            cfg.eden_mortality = m;
        }
        if let Some(m) = self.mid {
            cfg.mid_lived_fraction = m;
        }
        if let Some(l) = self.long {
            cfg.long_lived_fraction = l;
        }
        cfg.validate().map_err(|e| usage(&e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct HeapArgs {
    #[arg(long)]
    eden_capacity: Option<u64>,
    #[arg(long)]
    survivor_capacity: Option<u64>,
    #[arg(long)]
    tenured_capacity: Option<u64>,
    #[arg(long)]
    tenuring_threshold: Option<u32>,
    #[arg(long)]
    major_fraction: Option<f64>,
}

impl HeapArgs {
    fn build(&self) -> Result<HeapConfig, Failure> {
        let mut cfg = HeapConfig::default();
        if let Some(v) = self.eden_capacity {
            cfg.eden_capacity_bytes = v;
        }
        if let Some(v) = self.survivor_capacity {
            cfg.survivor_capacity_bytes = v;
        }
        if let Some(v) = self.tenured_capacity {
            cfg.tenured_capacity_bytes = v;
        }
        if let Some(v) = self.tenuring_threshold {
            cfg.tenuring_age_threshold = v;
        }
        if let Some(v) = self.major_fraction {
            cfg.major_gc_occupancy_fraction = v;
        }
        cfg.validate().map_err(|e| usage(&e.to_string()))?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct CostArgs {
    #[arg(long)]
    cost_swept: Option<f64>,
    #[arg(long)]
    cost_byte: Option<f64>,
    #[arg(long)]
    cost_promoted: Option<f64>,
}

impl CostArgs {
    fn build(&self) -> Result<CostModel, Failure> {
        let mut cost = CostModel::default();
        if let Some(v) = self.cost_swept {
            cost.cost_per_swept_object = v;
        }
        if let Some(v) = self.cost_byte {
            cost.cost_per_copied_byte = v;
        }
        if let Some(v) = self.cost_promoted {
            cost.cost_per_promoted_object = v;
        }
        cost.validate().map_err(|e| usage(&e.to_string()))?;
        Ok(cost)
    }
}

#[derive(Args)]
struct GenArgs {
    /// Trace file to write.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    workload: WorkloadArgs,
}

#[derive(Args)]
struct TrainArgs {
    /// Trace file(s) to learn from; repeatable.
    #[arg(long = "trace", required = true)]
    traces: Vec<PathBuf>,
    /// Directory for dataset.csv, survive_model.txt and tenure_model.txt.
    #[arg(long)]
    out_dir: PathBuf,
    /// Laplace smoothing constant.
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[command(flatten)]
    heap: HeapArgs,
}

#[derive(Args)]
struct RunArgs {
    /// Replay this trace file instead of generating a workload.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    workload: WorkloadArgs,
    #[command(flatten)]
    heap: HeapArgs,
    #[command(flatten)]
    cost: CostArgs,
    /// Predictor arm: none (baseline only), oracle, or trained.
    #[arg(long)]
    predictor: Option<String>,
    #[arg(long)]
    survive_model: Option<PathBuf>,
    #[arg(long)]
    tenure_model: Option<PathBuf>,
    /// Survival threshold; required with --predictor trained.
    #[arg(long)]
    threshold: Option<f64>,
    /// Directory for report.json, per-arm cycle CSVs and final histograms.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Compute the two collector legs on separate threads.
    #[arg(long, default_value_t = false)]
    concurrent: bool,
    /// Flat key = value experiment file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TuneArgs {
    /// CSV of `score,truth` rows.
    #[arg(long)]
    scored: Option<PathBuf>,
    /// Labeled dataset CSV; requires --model to score it.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Model file used to score --dataset.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    target_precision: f64,
}

#[derive(Args)]
struct HistoDiffArgs {
    old: PathBuf,
    new: PathBuf,
    /// Write the delta CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure carrying its process exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: &str) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.to_string(),
    }
}

fn from_experiment(err: ExperimentError) -> Failure {
    let code = if err.is_safety_violation() {
        EXIT_SAFETY
    } else if matches!(
        err,
        ExperimentError::Trace(_) | ExperimentError::MalformedTrace { .. }
    ) {
        EXIT_USAGE
    } else {
        EXIT_FAILURE
    };
    Failure {
        code,
        message: err.to_string(),
    }
}

fn read_to_string(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| usage(&format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Train(args) => cmd_train(args),
        Command::Run(args) => cmd_run(*args),
        Command::Tune(args) => cmd_tune(args),
        Command::HistoDiff(args) => cmd_histo_diff(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("predgc: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let config = args.workload.build(42)?;
    let trace = generate_synthetic(&config).map_err(|e| usage(&e.to_string()))?;
    trace.write_file(&args.out).map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    })?;
    println!(
        "wrote {} ({} allocations, seed {})",
        args.out.display(),
        trace.alloc_count(),
        config.seed
    );
    Ok(())
}

fn out_dir_override(requested: Option<PathBuf>) -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .or(requested)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir).map_err(|e| Failure {
        code: EXIT_FAILURE,
        message: format!("cannot create {}: {e}", dir.display()),
    })
}

fn cmd_train(args: TrainArgs) -> Result<(), Failure> {
    let heap_config = args.heap.build()?;
    let out_dir = out_dir_override(Some(args.out_dir)).expect("out dir given");
    ensure_dir(&out_dir)?;

    let mut labels = Vec::new();
    for path in &args.traces {
        let trace = Trace::read_file(path).map_err(|e| usage(&e.to_string()))?;
        let mut batch = collect_labels(&trace, &heap_config).map_err(from_experiment)?;
        labels.append(&mut batch);
    }
    if labels.is_empty() {
        return Err(usage(
            "no labeled examples: traces never reached a collection",
        ));
    }
    let survive = CountsModel::fit_examples(&labels, PredictionTarget::SurvivedEden, args.alpha)
        .map_err(|e| usage(&e.to_string()))?;
    let tenure = CountsModel::fit_examples(&labels, PredictionTarget::ReachedTenured, args.alpha)
        .map_err(|e| usage(&e.to_string()))?;

    write_file(&out_dir.join("dataset.csv"), &dataset_to_csv(&labels))?;
    write_file(&out_dir.join("survive_model.txt"), &survive.to_text())?;
    write_file(&out_dir.join("tenure_model.txt"), &tenure.to_text())?;
    let survivors = labels.iter().filter(|l| l.survived_eden).count();
    println!(
        "trained on {} examples ({} survived eden, {} reached tenured); wrote {}",
        labels.len(),
        survivors,
        labels.iter().filter(|l| l.reached_tenured).count(),
        out_dir.display()
    );
    Ok(())
}

/// Flat `key = value` experiment file; `#` starts a comment.
fn parse_run_config(path: &Path) -> Result<BTreeMap<String, String>, Failure> {
    let text = read_to_string(path)?;
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(&format!(
                "{}:{}: expected `key = value`",
                path.display(),
                idx + 1
            ))
        })?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn merge_run_config(args: &mut RunArgs, file: &BTreeMap<String, String>) -> Result<(), Failure> {
    fn fill<T: std::str::FromStr>(
        slot: &mut Option<T>,
        key: &str,
        value: &str,
    ) -> Result<(), Failure> {
        if slot.is_none() {
            let parsed = value
                .parse::<T>()
                .map_err(|_| usage(&format!("config key `{key}` has bad value `{value}`")))?;
            *slot = Some(parsed);
        }
        Ok(())
    }
    for (key, value) in file {
        match key.as_str() {
            "trace" => fill(&mut args.trace, key, value)?,
            "out_dir" => fill(&mut args.out_dir, key, value)?,
            "survive_model" => fill(&mut args.survive_model, key, value)?,
            "tenure_model" => fill(&mut args.tenure_model, key, value)?,
            "seed" => fill(&mut args.workload.seed, key, value)?,
            "flows" => fill(&mut args.workload.flows, key, value)?,
            "allocs" => fill(&mut args.workload.allocs, key, value)?,
            "eden_mortality" => fill(&mut args.workload.eden_mortality, key, value)?,
            "mid_lived_fraction" => fill(&mut args.workload.mid, key, value)?,
            "long_lived_fraction" => fill(&mut args.workload.long, key, value)?,
            "eden_capacity" => fill(&mut args.heap.eden_capacity, key, value)?,
            "survivor_capacity" => fill(&mut args.heap.survivor_capacity, key, value)?,
            "tenured_capacity" => fill(&mut args.heap.tenured_capacity, key, value)?,
            "tenuring_age_threshold" => fill(&mut args.heap.tenuring_threshold, key, value)?,
            "major_gc_occupancy_fraction" => fill(&mut args.heap.major_fraction, key, value)?,
            "cost_per_swept_object" => fill(&mut args.cost.cost_swept, key, value)?,
            "cost_per_copied_byte" => fill(&mut args.cost.cost_byte, key, value)?,
            "cost_per_promoted_object" => fill(&mut args.cost.cost_promoted, key, value)?,
            "threshold" => fill(&mut args.threshold, key, value)?,
            "predictor" => fill(&mut args.predictor, key, value)?,
            "concurrent" => {
                if !args.concurrent {
                    args.concurrent = value.parse::<bool>().map_err(|_| {
                        usage(&format!("config key `concurrent` has bad value `{value}`"))
                    })?;
                }
            }
            other => return Err(usage(&format!("unknown config key `{other}`"))),
        }
    }
    Ok(())
}

fn cmd_run(mut args: RunArgs) -> Result<(), Failure> {
    if let Some(config_path) = args.config.clone() {
        let file = parse_run_config(&config_path)?;
        merge_run_config(&mut args, &file)?;
    }

    // Exactly one workload source.
    if args.trace.is_some() && args.workload.seed.is_some() {
        return Err(usage("give either --trace or --seed, not both"));
    }
    let trace = match &args.trace {
        Some(path) => Trace::read_file(path).map_err(|e| usage(&e.to_string()))?,
        None => {
            let workload = args.workload.build(42)?;
            generate_synthetic(&workload).map_err(|e| usage(&e.to_string()))?
        }
    };

    let heap_config = args.heap.build()?;
    let cost = args.cost.build()?;
    let predictor = args.predictor.as_deref().unwrap_or("oracle");
    let trained = match predictor {
        "none" | "oracle" => {
            if args.threshold.is_some() {
                return Err(usage("--threshold only applies to --predictor trained"));
            }
            None
        }
        "trained" => {
            let (survive_path, tenure_path, threshold) =
                match (&args.survive_model, &args.tenure_model, args.threshold) {
                    (Some(s), Some(t), Some(th)) => (s, t, th),
                    _ => return Err(usage(
                        "--predictor trained needs --survive-model, --tenure-model and --threshold",
                    )),
                };
            let survive = CountsModel::parse(&read_to_string(survive_path)?)
                .map_err(|e| usage(&e.to_string()))?;
            let tenure = CountsModel::parse(&read_to_string(tenure_path)?)
                .map_err(|e| usage(&e.to_string()))?;
            let policy = DecisionPolicy::new(threshold).map_err(|e| usage(&e.to_string()))?;
            Some(TrainedModels {
                survive_model: survive,
                tenure_model: tenure,
                policy,
            })
        }
        other => return Err(usage(&format!("unknown predictor `{other}`"))),
    };

    let mode = if args.concurrent {
        ExecutionMode::Concurrent
    } else {
        ExecutionMode::Serial
    };

    let report = if predictor == "none" {
        // Baseline only: reuse the comparison shape with a single arm.
        let outcome = experiment::replay_baseline(
            &trace,
            &heap_config,
            &cost,
            experiment::ReplayOptions {
                final_pass: true,
                collect_features: false,
            },
        )
        .map_err(from_experiment)?;
        experiment::ExperimentReport {
            trace_seed: trace.metadata.seed,
            allocations: outcome.totals.objects_allocated,
            heap_config: heap_config.clone(),
            cost_model: cost.clone(),
            execution_mode: mode,
            reclaimed_sets_equal: true,
            reclaimed_object_count: outcome.reclaimed_ids.len() as u64,
            pause_ratio_oracle_vs_baseline: None,
            arms: vec![experiment::ArmReport {
                name: experiment::ARM_BASELINE.to_string(),
                totals: outcome.totals.clone(),
                cycles: outcome.cycles.clone(),
                final_histogram: outcome.final_histogram.clone(),
            }],
        }
    } else {
        experiment::run_collector_comparison(&trace, &heap_config, &cost, trained, mode)
            .map_err(from_experiment)?
    };

    let out_dir = out_dir_override(args.out_dir)
        .ok_or_else(|| usage("--out-dir (or PREDGC_OUT_DIR) is required"))?;
    ensure_dir(&out_dir)?;
    write_file(&out_dir.join("report.json"), &report.to_json())?;
    for arm in &report.arms {
        write_file(
            &out_dir.join(format!("{}_cycles.csv", arm.name)),
            &experiment::cycles_csv(arm),
        )?;
        write_file(
            &out_dir.join(format!("final_histo_{}.txt", arm.name)),
            &arm.final_histogram.to_text(),
        )?;
        write_file(
            &out_dir.join(format!("final_histo_{}.csv", arm.name)),
            &arm.final_histogram.to_csv(),
        )?;
    }

    for arm in &report.arms {
        println!(
            "arm {}: pause_cost={:.2} live_handled={} op_cost={:.2} minor={} major={} reclaimed={}",
            arm.name,
            arm.totals.total_pause_cost,
            arm.totals.total_live_objects_handled,
            arm.totals.total_op_cost,
            arm.totals.minor_collections,
            arm.totals.major_collections,
            arm.totals.objects_reclaimed,
        );
    }
    if let Some(ratio) = report.pause_ratio_oracle_vs_baseline {
        println!("pause ratio (oracle/baseline): {ratio:.4}");
    }
    println!(
        "reclaimed sets equal: {} ({} objects); wrote {}",
        report.reclaimed_sets_equal,
        report.reclaimed_object_count,
        out_dir.display()
    );
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> Result<(), Failure> {
    let scored = match (&args.scored, &args.dataset, &args.model) {
        (Some(path), None, None) => {
            scored_from_csv(&read_to_string(path)?).map_err(|e| usage(&e.to_string()))?
        }
        (None, Some(dataset_path), Some(model_path)) => {
            let dataset = dataset_from_csv(&read_to_string(dataset_path)?)
                .map_err(|e| usage(&e.to_string()))?;
            let model = CountsModel::parse(&read_to_string(model_path)?)
                .map_err(|e| usage(&e.to_string()))?;
            score_dataset(&model, &dataset)
        }
        _ => return Err(usage("give either --scored, or --dataset with --model")),
    };
    let policy =
        tune_threshold(&scored, args.target_precision).map_err(|e| usage(&e.to_string()))?;
    println!("{}", policy.threshold());
    Ok(())
}

fn cmd_histo_diff(args: HistoDiffArgs) -> Result<(), Failure> {
    let old = Histogram::parse(&read_to_string(&args.old)?).map_err(|e| usage(&e.to_string()))?;
    let new = Histogram::parse(&read_to_string(&args.new)?).map_err(|e| usage(&e.to_string()))?;
    let csv = delta_csv(&histo_diff(&old, &new));
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}
