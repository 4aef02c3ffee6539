//! The replay driver and the collector-comparison experiment: one trace
//! replayed under the baseline collector, the predictive collector with
//! trained models, and the predictive collector with a ground-truth oracle,
//! with per-cycle reports, pause-cost totals, and an end-state equivalence
//! check across the arms.
//!
//! Collection triggers are identical in every arm — a minor GC when an
//! allocation would overflow Eden, a major GC when Tenured occupancy crosses
//! its threshold after a minor — and every run ends with one final full
//! collection so that run-end reclamation is policy-independent.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{self, CostModel, GcReport, MinorOutcome};
use crate::heap::{Heap, HeapConfig, HeapError, Node, ObjectId, Space};
use crate::histogram::Histogram;
use crate::predictor::{extract_features, FeatureVector, LabeledExample, PredictorError};
use crate::runtime::{
    ExecutionMode, GroundTruth, OpReport, PredictiveRuntime, PredictorBinding, RuntimeError,
    TrainedModels, TruthRecord,
};
use crate::trace::{ParentRef, Trace, TraceError, TraceEvent};

pub const ARM_BASELINE: &str = "baseline";
pub const ARM_ORACLE: &str = "predictive_oracle";
pub const ARM_TRAINED: &str = "predictive_trained";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("replay failed applying event {index}: {source}")]
    Replay { index: usize, source: HeapError },
    #[error("malformed trace at event {index}: {reason}")]
    MalformedTrace { index: usize, reason: String },
    #[error(transparent)]
    Heap(#[from] HeapError),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("reclaimed-object sets diverge between arms `{0}` and `{1}`")]
    EndStateDivergence(String, String),
}

impl ExperimentError {
    /// Safety violations get a dedicated process exit code.
    pub fn is_safety_violation(&self) -> bool {
        match self {
            ExperimentError::EndStateDivergence(_, _) => true,
            ExperimentError::Replay { source, .. } | ExperimentError::Heap(source) => {
                matches!(source, HeapError::ReclaimReachable(_))
            }
            ExperimentError::Runtime(e) => matches!(
                e,
                RuntimeError::PartitionViolation(_)
                    | RuntimeError::DualClaim(_)
                    | RuntimeError::Heap(HeapError::ReclaimReachable(_))
            ),
            _ => false,
        }
    }
}

/// One collection cycle's accounting; the OP column block is present for
/// cycles run by the predictive collector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub gc: GcReport,
    pub op: Option<OpReport>,
}

/// Whole-run accounting for one arm.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ArmTotals {
    pub total_pause_cost: f64,
    pub total_live_objects_handled: u64,
    pub total_op_cost: f64,
    pub minor_collections: u64,
    pub major_collections: u64,
    pub objects_allocated: u64,
    pub objects_reclaimed: u64,
}

/// Everything one arm's replay produced.
#[derive(Debug, Clone)]
pub struct ArmOutcome {
    pub cycles: Vec<CycleRecord>,
    pub totals: ArmTotals,
    pub reclaimed_ids: BTreeSet<u64>,
    pub final_histogram: Histogram,
    pub heap_digest: Vec<(u64, Space, u32)>,
    /// Labeled examples (baseline replays asked to collect features).
    pub labels: Vec<LabeledExample>,
    /// Ground truth per object (baseline replays).
    pub truth: Option<GroundTruth>,
}

#[derive(Debug, Clone, Copy)]
pub struct ReplayOptions {
    /// Run one final minor + major collection after the last event, so every
    /// trace-determined death is reclaimed by run end.
    pub final_pass: bool,
    /// Extract each object's features at allocation (training runs).
    pub collect_features: bool,
}

/// Resolves survival labels during a baseline replay: the outcome of each
/// object's first sweep, and whether it ever entered Tenured.
#[derive(Debug, Default)]
struct ObjectLogger {
    collect_features: bool,
    features: BTreeMap<ObjectId, FeatureVector>,
    first_sweep_survival: BTreeMap<ObjectId, bool>,
    reached_tenured: BTreeSet<ObjectId>,
}

impl ObjectLogger {
    fn note_alloc(&mut self, heap: &Heap, id: ObjectId) -> Result<(), PredictorError> {
        if self.collect_features {
            let fv = extract_features(heap, id)?;
            self.features.insert(id, fv);
        }
        Ok(())
    }

    fn absorb_minor(&mut self, outcome: &MinorOutcome) {
        for &id in &outcome.reclaimed {
            self.first_sweep_survival.entry(id).or_insert(false);
        }
        for &id in outcome
            .promoted_to_survivor
            .iter()
            .chain(&outcome.promoted_to_tenured)
        {
            self.first_sweep_survival.entry(id).or_insert(true);
        }
        self.reached_tenured.extend(&outcome.promoted_to_tenured);
    }

    /// Labeled examples for every object whose first sweep happened; objects
    /// allocated after the last collection are censored.
    fn labels(&self) -> Vec<LabeledExample> {
        self.features
            .iter()
            .filter_map(|(id, fv)| {
                self.first_sweep_survival.get(id).map(|&survived| {
                    LabeledExample::new(fv.clone(), survived, self.reached_tenured.contains(id))
                })
            })
            .collect()
    }

    fn truth(&self) -> GroundTruth {
        GroundTruth::new(
            self.first_sweep_survival
                .iter()
                .map(|(&id, &survived)| {
                    (
                        id,
                        TruthRecord {
                            survived_first_sweep: survived,
                            reached_tenured: self.reached_tenured.contains(&id),
                        },
                    )
                })
                .collect(),
        )
    }
}

enum ArmCollector {
    Baseline(ObjectLogger),
    Predictive(Box<PredictiveRuntime>, ExecutionMode),
}

impl ArmCollector {
    fn minor(
        &mut self,
        heap: &mut Heap,
        config: &HeapConfig,
        cost: &CostModel,
    ) -> Result<CycleRecord, ExperimentError> {
        match self {
            ArmCollector::Baseline(logger) => {
                let outcome = baseline::minor_gc(heap, config, cost)?;
                logger.absorb_minor(&outcome);
                Ok(CycleRecord {
                    gc: outcome.report,
                    op: None,
                })
            }
            ArmCollector::Predictive(runtime, mode) => {
                let (gc, op) = runtime.predictive_gc_cycle(heap, config, cost, *mode)?;
                Ok(CycleRecord { gc, op: Some(op) })
            }
        }
    }

    fn major(
        &mut self,
        heap: &mut Heap,
        config: &HeapConfig,
        cost: &CostModel,
    ) -> Result<CycleRecord, ExperimentError> {
        let outcome = baseline::major_gc(heap, config, cost)?;
        Ok(CycleRecord {
            gc: outcome.report,
            op: None,
        })
    }

    fn on_allocated(&mut self, heap: &Heap, id: ObjectId) -> Result<(), ExperimentError> {
        match self {
            ArmCollector::Baseline(logger) => logger.note_alloc(heap, id)?,
            ArmCollector::Predictive(runtime, _) => {
                runtime.classify_new(heap, id)?;
            }
        }
        Ok(())
    }
}

/// Replays a trace under the baseline collector.
pub fn replay_baseline(
    trace: &Trace,
    config: &HeapConfig,
    cost: &CostModel,
    options: ReplayOptions,
) -> Result<ArmOutcome, ExperimentError> {
    let collector = ArmCollector::Baseline(ObjectLogger {
        collect_features: options.collect_features,
        ..ObjectLogger::default()
    });
    replay(trace, config, cost, collector, options.final_pass)
}

/// Replays a trace under the predictive collector with the given binding.
/// Always runs the final full collection, matching comparison semantics.
pub fn replay_predictive(
    trace: &Trace,
    config: &HeapConfig,
    cost: &CostModel,
    binding: PredictorBinding,
    mode: ExecutionMode,
) -> Result<ArmOutcome, ExperimentError> {
    let collector = ArmCollector::Predictive(Box::new(PredictiveRuntime::new(binding)), mode);
    replay(trace, config, cost, collector, true)
}

fn replay(
    trace: &Trace,
    config: &HeapConfig,
    cost: &CostModel,
    mut collector: ArmCollector,
    final_pass: bool,
) -> Result<ArmOutcome, ExperimentError> {
    config.validate()?;
    cost.validate()?;
    let mut heap = Heap::new();
    let mut tags: BTreeMap<&str, ObjectId> = BTreeMap::new();
    let mut cycles: Vec<CycleRecord> = Vec::new();
    let mut allocated = 0u64;

    let resolve = |parent: &ParentRef,
                   tags: &BTreeMap<&str, ObjectId>,
                   index: usize|
     -> Result<Node, ExperimentError> {
        match parent {
            ParentRef::Root => Ok(Node::Root),
            ParentRef::Tag(t) => {
                tags.get(t.as_str())
                    .map(|&id| Node::Object(id))
                    .ok_or_else(|| ExperimentError::MalformedTrace {
                        index,
                        reason: format!("unknown tag `{t}`"),
                    })
            }
        }
    };

    for (index, event) in trace.events.iter().enumerate() {
        match event {
            TraceEvent::Alloc {
                tag,
                class_name,
                size_bytes,
                parent,
            } => {
                if heap.occupancy(Space::Eden) + size_bytes > config.eden_capacity_bytes {
                    cycles.push(collector.minor(&mut heap, config, cost)?);
                    let tenured_limit =
                        config.major_gc_occupancy_fraction * config.tenured_capacity_bytes as f64;
                    if heap.occupancy(Space::Tenured) as f64 >= tenured_limit {
                        cycles.push(collector.major(&mut heap, config, cost)?);
                    }
                }
                let id = heap
                    .allocate(class_name, *size_bytes)
                    .map_err(|source| ExperimentError::Replay { index, source })?;
                allocated += 1;
                let parent_node = resolve(parent, &tags, index)?;
                heap.link(parent_node, id)
                    .map_err(|source| ExperimentError::Replay { index, source })?;
                tags.insert(tag.as_str(), id);
                collector.on_allocated(&heap, id)?;
            }
            TraceEvent::Link { parent, child } => {
                let p = resolve(parent, &tags, index)?;
                let c =
                    *tags
                        .get(child.as_str())
                        .ok_or_else(|| ExperimentError::MalformedTrace {
                            index,
                            reason: format!("unknown tag `{child}`"),
                        })?;
                heap.link(p, c)
                    .map_err(|source| ExperimentError::Replay { index, source })?;
            }
            TraceEvent::Unlink { parent, child } => {
                let p = resolve(parent, &tags, index)?;
                let c =
                    *tags
                        .get(child.as_str())
                        .ok_or_else(|| ExperimentError::MalformedTrace {
                            index,
                            reason: format!("unknown tag `{child}`"),
                        })?;
                heap.unlink(p, c)
                    .map_err(|source| ExperimentError::Replay { index, source })?;
            }
            TraceEvent::Tick => {}
        }
    }

    if final_pass {
        cycles.push(collector.minor(&mut heap, config, cost)?);
        cycles.push(collector.major(&mut heap, config, cost)?);
    }

    let mut totals = ArmTotals {
        objects_allocated: allocated,
        ..ArmTotals::default()
    };
    for cycle in &cycles {
        totals.total_pause_cost += cycle.gc.pause_cost;
        totals.total_live_objects_handled += cycle.gc.live_objects_handled;
        totals.objects_reclaimed += cycle.gc.objects_reclaimed;
        match cycle.gc.kind {
            baseline::GcKind::Minor => totals.minor_collections += 1,
            baseline::GcKind::Major => totals.major_collections += 1,
        }
        if let Some(op) = &cycle.op {
            totals.total_op_cost += op.op_cost;
            totals.objects_reclaimed += op.objects_reclaimed_by_op;
        }
    }

    let (labels, truth) = match &collector {
        ArmCollector::Baseline(logger) => (logger.labels(), Some(logger.truth())),
        ArmCollector::Predictive(_, _) => (Vec::new(), None),
    };

    Ok(ArmOutcome {
        cycles,
        totals,
        reclaimed_ids: heap.reclaimed_ids().iter().map(|id| id.0).collect(),
        final_histogram: heap.histogram(false),
        heap_digest: heap.state_digest(),
        labels,
        truth,
    })
}

/// Computes per-object ground truth by replaying the trace under the
/// baseline collector with the final full collection included, so the truth
/// table is total over every allocated object.
pub fn compute_ground_truth(
    trace: &Trace,
    config: &HeapConfig,
    cost: &CostModel,
) -> Result<GroundTruth, ExperimentError> {
    let outcome = replay_baseline(
        trace,
        config,
        cost,
        ReplayOptions {
            final_pass: true,
            collect_features: false,
        },
    )?;
    Ok(outcome.truth.expect("baseline replay records truth"))
}

/// One arm's results in the experiment report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArmReport {
    pub name: String,
    pub totals: ArmTotals,
    pub cycles: Vec<CycleRecord>,
    pub final_histogram: Histogram,
}

/// The whole comparison: per-arm totals and per-cycle arrays, plus the
/// end-state equivalence verdict and the headline pause ratio.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub trace_seed: Option<u64>,
    pub allocations: u64,
    pub heap_config: HeapConfig,
    pub cost_model: CostModel,
    pub execution_mode: ExecutionMode,
    pub arms: Vec<ArmReport>,
    pub reclaimed_sets_equal: bool,
    pub reclaimed_object_count: u64,
    /// Oracle-arm pause cost over baseline pause cost; absent when the
    /// baseline never paused.
    pub pause_ratio_oracle_vs_baseline: Option<f64>,
}

impl ExperimentReport {
    pub fn arm(&self, name: &str) -> Option<&ArmReport> {
        self.arms.iter().find(|a| a.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Per-cycle CSV for one arm. Predictive arms carry the extra OP columns;
/// pure-GC cycles (majors) fill them with zeros.
pub fn cycles_csv(arm: &ArmReport) -> String {
    let predictive = arm.cycles.iter().any(|c| c.op.is_some());
    let mut out = String::new();
    if predictive {
        out.push_str(GcReport::CSV_HEADER);
        out.push(',');
        out.push_str(OpReport::CSV_HEADER);
        out.push('\n');
        let zeros = OpReport::default();
        for cycle in &arm.cycles {
            out.push_str(&cycle.gc.csv_row());
            out.push(',');
            out.push_str(&cycle.op.as_ref().unwrap_or(&zeros).csv_row());
            out.push('\n');
        }
    } else {
        out.push_str(GcReport::CSV_HEADER);
        out.push('\n');
        for cycle in &arm.cycles {
            out.push_str(&cycle.gc.csv_row());
            out.push('\n');
        }
    }
    out
}

/// Replays the identical trace under the baseline collector, the predictive
/// collector with trained models (when given), and the predictive collector
/// with the ground-truth oracle. Liveness is trace-determined, so the arms
/// must reclaim identical object sets by run end; divergence is a hard error.
pub fn run_collector_comparison(
    trace: &Trace,
    config: &HeapConfig,
    cost: &CostModel,
    trained: Option<TrainedModels>,
    mode: ExecutionMode,
) -> Result<ExperimentReport, ExperimentError> {
    let baseline_outcome = replay_baseline(
        trace,
        config,
        cost,
        ReplayOptions {
            final_pass: true,
            collect_features: false,
        },
    )?;
    let truth = baseline_outcome
        .truth
        .clone()
        .expect("baseline replay records truth");

    let oracle_outcome =
        replay_predictive(trace, config, cost, PredictorBinding::Oracle(truth), mode)?;
    let trained_outcome = match trained {
        Some(models) => Some(replay_predictive(
            trace,
            config,
            cost,
            PredictorBinding::Trained(models),
            mode,
        )?),
        None => None,
    };

    let mut arms = vec![
        (ARM_BASELINE, &baseline_outcome),
        (ARM_ORACLE, &oracle_outcome),
    ];
    if let Some(outcome) = &trained_outcome {
        arms.push((ARM_TRAINED, outcome));
    }
    for (name, outcome) in &arms[1..] {
        if outcome.reclaimed_ids != baseline_outcome.reclaimed_ids {
            return Err(ExperimentError::EndStateDivergence(
                ARM_BASELINE.to_string(),
                name.to_string(),
            ));
        }
    }

    let baseline_pause = baseline_outcome.totals.total_pause_cost;
    let ratio =
        (baseline_pause > 0.0).then(|| oracle_outcome.totals.total_pause_cost / baseline_pause);

    Ok(ExperimentReport {
        trace_seed: trace.metadata.seed,
        allocations: baseline_outcome.totals.objects_allocated,
        heap_config: config.clone(),
        cost_model: cost.clone(),
        execution_mode: mode,
        reclaimed_sets_equal: true,
        reclaimed_object_count: baseline_outcome.reclaimed_ids.len() as u64,
        pause_ratio_oracle_vs_baseline: ratio,
        arms: arms
            .into_iter()
            .map(|(name, outcome)| ArmReport {
                name: name.to_string(),
                totals: outcome.totals.clone(),
                cycles: outcome.cycles.clone(),
                final_histogram: outcome.final_histogram.clone(),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictor::{CountsModel, DecisionPolicy, PredictionTarget};
    use crate::trace::{generate_synthetic, WorkloadConfig};

    fn small_config() -> HeapConfig {
        HeapConfig {
            eden_capacity_bytes: 8_192,
            survivor_capacity_bytes: 2_048,
            tenured_capacity_bytes: 65_536,
            tenuring_age_threshold: 3,
            major_gc_occupancy_fraction: 0.9,
        }
    }

    fn small_workload(seed: u64) -> WorkloadConfig {
        let mut cfg = WorkloadConfig::with_defaults(2, 300, seed);
        cfg.assumed_eden_capacity = 8_192;
        cfg
    }

    #[test]
    fn baseline_replay_keeps_books_straight() {
        let trace = generate_synthetic(&small_workload(11)).unwrap();
        let out = replay_baseline(
            &trace,
            &small_config(),
            &CostModel::default(),
            ReplayOptions {
                final_pass: true,
                collect_features: false,
            },
        )
        .unwrap();
        assert!(out.totals.minor_collections >= 2);
        for cycle in &out.cycles {
            assert_eq!(
                cycle.gc.objects_swept,
                cycle.gc.objects_reclaimed + cycle.gc.live_objects_handled
            );
        }
        assert_eq!(out.totals.objects_reclaimed, out.reclaimed_ids.len() as u64);
    }

    #[test]
    fn labels_follow_unlink_timing() {
        let trace = generate_synthetic(&small_workload(13)).unwrap();
        let labels = crate::baseline::collect_labels(&trace, &small_config()).unwrap();
        assert!(!labels.is_empty());
        let survived = labels.iter().filter(|l| l.survived_eden).count() as f64;
        let rate = survived / labels.len() as f64;
        assert!(
            (0.02..=0.25).contains(&rate),
            "survival rate {rate} outside plausible band"
        );
        for l in &labels {
            assert!(l.survived_eden || !l.reached_tenured);
        }
    }

    #[test]
    fn label_survival_rate_tracks_mortality_at_scale() {
        // 10000 allocations at eden mortality 0.9: the labeled survivor
        // fraction lands near 0.1.
        let cfg = WorkloadConfig::with_defaults(2, 5_000, 97);
        let trace = generate_synthetic(&cfg).unwrap();
        let labels = crate::baseline::collect_labels(&trace, &HeapConfig::default()).unwrap();
        assert!(
            labels.len() >= 4_000,
            "too few labeled examples: {}",
            labels.len()
        );
        let survived = labels.iter().filter(|l| l.survived_eden).count() as f64;
        let rate = survived / labels.len() as f64;
        assert!(
            (0.07..=0.13).contains(&rate),
            "survival rate {rate} outside [0.07, 0.13]"
        );
    }

    #[test]
    fn label_examples_pin_both_labels() {
        // Object u dies before any collection; object v stays root-linked
        // through three minor GCs at threshold 3 and must reach Tenured.
        let mut text =
            String::from("ALLOC u dies.Fast 64 ROOT\nALLOC v lives.Long 64 ROOT\nUNLINK ROOT u\n");
        for i in 0..200 {
            text.push_str(&format!("ALLOC f{i} fill.Er 64 ROOT\nUNLINK ROOT f{i}\n"));
        }
        let trace = Trace::from_text(&text).unwrap();
        let config = HeapConfig {
            eden_capacity_bytes: 2_048,
            survivor_capacity_bytes: 1_024,
            tenured_capacity_bytes: 65_536,
            tenuring_age_threshold: 3,
            major_gc_occupancy_fraction: 0.9,
        };
        let outcome = replay_baseline(
            &trace,
            &config,
            &CostModel::default(),
            ReplayOptions {
                final_pass: false,
                collect_features: true,
            },
        )
        .unwrap();
        assert!(outcome.totals.minor_collections >= 3);
        let label_of = |class: &str| {
            outcome
                .labels
                .iter()
                .find(|l| l.features.class_name == class)
                .expect("labeled")
        };
        assert!(!label_of("dies.Fast").survived_eden);
        let long = label_of("lives.Long");
        assert!(long.survived_eden && long.reached_tenured);
    }

    #[test]
    fn oracle_arm_never_handles_live_objects() {
        let trace = generate_synthetic(&small_workload(17)).unwrap();
        let config = small_config();
        let cost = CostModel::default();
        let truth = compute_ground_truth(&trace, &config, &cost).unwrap();
        let out = replay_predictive(
            &trace,
            &config,
            &cost,
            PredictorBinding::Oracle(truth),
            ExecutionMode::Serial,
        )
        .unwrap();
        for cycle in &out.cycles {
            if cycle.op.is_some() {
                assert_eq!(
                    cycle.gc.live_objects_handled, 0,
                    "oracle GC leg touched a live object at cycle {}",
                    cycle.gc.cycle_index
                );
            }
        }
    }

    #[test]
    fn comparison_arms_reclaim_identical_sets() {
        let trace = generate_synthetic(&small_workload(19)).unwrap();
        let config = small_config();
        let labels = crate::baseline::collect_labels(&trace, &config).unwrap();
        let survive =
            CountsModel::fit_examples(&labels, PredictionTarget::SurvivedEden, 1.0).unwrap();
        let tenure =
            CountsModel::fit_examples(&labels, PredictionTarget::ReachedTenured, 1.0).unwrap();
        let trained = TrainedModels {
            survive_model: survive,
            tenure_model: tenure,
            policy: DecisionPolicy::new(0.8).unwrap(),
        };
        let report = run_collector_comparison(
            &trace,
            &config,
            &CostModel::default(),
            Some(trained),
            ExecutionMode::Serial,
        )
        .unwrap();
        assert!(report.reclaimed_sets_equal);
        assert_eq!(report.arms.len(), 3);
        let baseline = report.arm(ARM_BASELINE).unwrap();
        let oracle = report.arm(ARM_ORACLE).unwrap();
        assert!(
            oracle.totals.total_pause_cost < baseline.totals.total_pause_cost,
            "oracle pause {} not below baseline {}",
            oracle.totals.total_pause_cost,
            baseline.totals.total_pause_cost
        );
    }

    #[test]
    fn report_json_is_deterministic() {
        let trace = generate_synthetic(&small_workload(23)).unwrap();
        let config = small_config();
        let run = || {
            run_collector_comparison(
                &trace,
                &config,
                &CostModel::default(),
                None,
                ExecutionMode::Serial,
            )
            .unwrap()
            .to_json()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn zero_survivor_trace_costs_match_across_arms() {
        // Everything dies before its first sweep: no promotions anywhere, so
        // baseline and oracle pause costs coincide.
        let text = "\
ALLOC a A 4000 ROOT
ALLOC b A 4000 ROOT
UNLINK ROOT a
UNLINK ROOT b
ALLOC c A 4000 ROOT
UNLINK ROOT c
ALLOC d A 4000 ROOT
UNLINK ROOT d
";
        let trace = Trace::from_text(text).unwrap();
        let report = run_collector_comparison(
            &trace,
            &small_config(),
            &CostModel::default(),
            None,
            ExecutionMode::Serial,
        )
        .unwrap();
        let baseline = report.arm(ARM_BASELINE).unwrap();
        let oracle = report.arm(ARM_ORACLE).unwrap();
        assert_eq!(
            baseline.totals.total_pause_cost,
            oracle.totals.total_pause_cost
        );
        assert_eq!(baseline.totals.total_live_objects_handled, 0);
    }

    #[test]
    fn serial_and_concurrent_replays_agree() {
        let trace = generate_synthetic(&small_workload(29)).unwrap();
        let config = small_config();
        let cost = CostModel::default();
        let truth = compute_ground_truth(&trace, &config, &cost).unwrap();
        let serial = replay_predictive(
            &trace,
            &config,
            &cost,
            PredictorBinding::Oracle(truth.clone()),
            ExecutionMode::Serial,
        )
        .unwrap();
        let concurrent = replay_predictive(
            &trace,
            &config,
            &cost,
            PredictorBinding::Oracle(truth),
            ExecutionMode::Concurrent,
        )
        .unwrap();
        assert_eq!(serial.heap_digest, concurrent.heap_digest);
        assert_eq!(serial.reclaimed_ids, concurrent.reclaimed_ids);
    }
}
