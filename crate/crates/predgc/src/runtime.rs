//! The predictive collector: a dual-root registry partitioning young objects
//! into likely-dead (the GC's domain) and likely-live (the Object Promoter's
//! domain), plus the collection cycle that sweeps only the likely-dead side
//! while the OP pre-promotes expected survivors and reclaims any dead object
//! it encounters.
//!
//! Both legs of a cycle plan their work against one shared marking pass and
//! touch disjoint object sets, so the plans can be computed concurrently;
//! heap mutation is applied at leg completion, and the serial schedule
//! produces bit-identical final state.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{CostModel, GcKind, GcReport};
use crate::heap::{Heap, HeapConfig, HeapError, ObjectId, Space};
use crate::predictor::{
    count_bin, decide, extract_features, CountsModel, Decision, DecisionPolicy, PredictorError,
};

#[derive(Debug, Error)]
pub enum RuntimeError {
    #[error(transparent)]
    Heap(#[from] HeapError),
    #[error(transparent)]
    Predictor(#[from] PredictorError),
    #[error("partition invariant violated: {0}")]
    PartitionViolation(String),
    #[error("object {0} claimed by both collector legs")]
    DualClaim(ObjectId),
    #[error("no ground-truth lifetime recorded for object {0}")]
    MissingTruth(ObjectId),
}

/// Predicted lifetime band for a young object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LifetimeClass {
    DieInEden,
    MidLived,
    LongLived,
}

/// Maps the two survival posteriors to a lifetime band: predicted not to
/// survive Eden means likely-dead; otherwise the tenure posterior splits
/// mid-lived from long-lived.
pub fn expected_lifetime(
    p_survive_eden: f64,
    p_reach_tenured: f64,
    policy: DecisionPolicy,
) -> LifetimeClass {
    if decide(p_survive_eden, policy) == Decision::PredictDie {
        LifetimeClass::DieInEden
    } else if decide(p_reach_tenured, policy) == Decision::PredictSurvive {
        LifetimeClass::LongLived
    } else {
        LifetimeClass::MidLived
    }
}

/// The two survival posteriors plus the lifetime band they map to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifetimePrediction {
    pub p_survive_eden: f64,
    pub p_reach_tenured: f64,
    pub lifetime_class: LifetimeClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartitionKind {
    Gc,
    Op,
}

/// Partition of live-registry membership under two sub-roots: the GC root
/// holds objects predicted to die before their first collection, the OP root
/// holds expected survivors ordered by decreasing lifetime expectancy
/// (long-lived entries ahead of mid-lived ones, insertion-stable within a
/// band). Tenured objects leave the registry.
#[derive(Debug, Clone, Default)]
pub struct DualRootRegistry {
    gc: BTreeSet<ObjectId>,
    long_entries: Vec<ObjectId>,
    mid_entries: Vec<ObjectId>,
    membership: BTreeMap<ObjectId, (PartitionKind, LifetimeClass)>,
}

impl DualRootRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, id: ObjectId, class: LifetimeClass) {
        debug_assert!(
            !self.membership.contains_key(&id),
            "object registered twice"
        );
        match class {
            LifetimeClass::DieInEden => {
                self.gc.insert(id);
                self.membership.insert(id, (PartitionKind::Gc, class));
            }
            LifetimeClass::MidLived => {
                self.mid_entries.push(id);
                self.membership.insert(id, (PartitionKind::Op, class));
            }
            LifetimeClass::LongLived => {
                self.long_entries.push(id);
                self.membership.insert(id, (PartitionKind::Op, class));
            }
        }
    }

    pub fn partition_of(&self, id: ObjectId) -> Option<PartitionKind> {
        self.membership.get(&id).map(|(kind, _)| *kind)
    }

    pub fn lifetime_of(&self, id: ObjectId) -> Option<LifetimeClass> {
        self.membership.get(&id).map(|(_, class)| *class)
    }

    pub fn contains(&self, id: ObjectId) -> bool {
        self.membership.contains_key(&id)
    }

    /// GC-partition members in id order.
    pub fn gc_members(&self) -> Vec<ObjectId> {
        self.gc.iter().copied().collect()
    }

    /// OP-partition entries in scan order: every long-lived entry before
    /// every mid-lived one.
    pub fn op_entries(&self) -> Vec<(ObjectId, LifetimeClass)> {
        self.long_entries
            .iter()
            .map(|&id| (id, LifetimeClass::LongLived))
            .chain(
                self.mid_entries
                    .iter()
                    .map(|&id| (id, LifetimeClass::MidLived)),
            )
            .collect()
    }

    pub fn gc_len(&self) -> usize {
        self.gc.len()
    }

    pub fn op_len(&self) -> usize {
        self.long_entries.len() + self.mid_entries.len()
    }

    pub fn total_len(&self) -> usize {
        self.membership.len()
    }

    /// Drops members entirely (reclaimed, or promoted to Tenured).
    pub fn remove_many(&mut self, ids: &BTreeSet<ObjectId>) {
        if ids.is_empty() {
            return;
        }
        self.gc.retain(|id| !ids.contains(id));
        self.long_entries.retain(|id| !ids.contains(id));
        self.mid_entries.retain(|id| !ids.contains(id));
        for id in ids {
            self.membership.remove(id);
        }
    }

    /// Moves OP entries whose fresh decision is likely-dead into the GC
    /// partition.
    pub fn demote_many(&mut self, ids: &BTreeSet<ObjectId>) {
        if ids.is_empty() {
            return;
        }
        self.long_entries.retain(|id| !ids.contains(id));
        self.mid_entries.retain(|id| !ids.contains(id));
        for &id in ids {
            self.gc.insert(id);
            self.membership
                .insert(id, (PartitionKind::Gc, LifetimeClass::DieInEden));
        }
    }

    /// Re-banding of an OP entry after rescoring; re-inserted at the tail of
    /// its new band.
    pub fn set_op_class(&mut self, id: ObjectId, class: LifetimeClass) {
        debug_assert!(matches!(
            class,
            LifetimeClass::MidLived | LifetimeClass::LongLived
        ));
        if self.lifetime_of(id) == Some(class) {
            return;
        }
        self.long_entries.retain(|&x| x != id);
        self.mid_entries.retain(|&x| x != id);
        match class {
            LifetimeClass::LongLived => self.long_entries.push(id),
            _ => self.mid_entries.push(id),
        }
        self.membership.insert(id, (PartitionKind::Op, class));
    }
}

/// Ground-truth lifetimes read off a baseline replay of the same trace:
/// whether each object was reachable when first swept, and whether it ever
/// reached Tenured.
#[derive(Debug, Clone, Default)]
pub struct GroundTruth {
    truths: BTreeMap<ObjectId, TruthRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruthRecord {
    pub survived_first_sweep: bool,
    pub reached_tenured: bool,
}

impl GroundTruth {
    pub fn new(truths: BTreeMap<ObjectId, TruthRecord>) -> Self {
        GroundTruth { truths }
    }

    pub fn classify(&self, id: ObjectId) -> Option<LifetimeClass> {
        self.truths.get(&id).map(|t| {
            if !t.survived_first_sweep {
                LifetimeClass::DieInEden
            } else if t.reached_tenured {
                LifetimeClass::LongLived
            } else {
                LifetimeClass::MidLived
            }
        })
    }

    pub fn len(&self) -> usize {
        self.truths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truths.is_empty()
    }
}

/// Fitted models plus the survival threshold.
#[derive(Debug, Clone)]
pub struct TrainedModels {
    pub survive_model: CountsModel,
    pub tenure_model: CountsModel,
    pub policy: DecisionPolicy,
}

/// What drives classification: fitted models, or recorded ground truth
/// (the 100%-accurate predictor of the oracle experiment arm).
#[derive(Debug, Clone)]
pub enum PredictorBinding {
    Trained(TrainedModels),
    Oracle(GroundTruth),
}

/// Object Promoter accounting for one scan.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct OpReport {
    pub objects_scanned: u64,
    pub objects_reclaimed_by_op: u64,
    pub objects_pre_promoted_to_survivor: u64,
    pub objects_pre_promoted_to_tenured: u64,
    pub objects_moved_to_gc_partition: u64,
    pub op_cost: f64,
}

impl OpReport {
    pub const CSV_HEADER: &'static str =
        "op_scanned,op_reclaimed,op_pre_promoted_s,op_pre_promoted_t,op_cost";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.objects_scanned,
            self.objects_reclaimed_by_op,
            self.objects_pre_promoted_to_survivor,
            self.objects_pre_promoted_to_tenured,
            self.op_cost,
        )
    }
}

/// Whether a predictive cycle computes its two leg plans one after the other
/// or on two threads against the shared marking. Both must produce identical
/// final heap state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecutionMode {
    Serial,
    Concurrent,
}

/// The predictive collector's run state: the registry, the predictor
/// binding, and the per-entry counter bins recorded at last scoring (used to
/// spot stale entries worth re-scoring).
#[derive(Debug, Clone)]
pub struct PredictiveRuntime {
    registry: DualRootRegistry,
    binding: PredictorBinding,
    scored_bins: BTreeMap<ObjectId, (u8, u8)>,
}

/// GC-leg work plan, computed against the shared marking without touching
/// the heap.
#[derive(Debug, Default)]
struct GcLegPlan {
    reclaim: Vec<ObjectId>,
    to_survivor: Vec<ObjectId>,
    to_tenured: Vec<ObjectId>,
    bytes_copied: u64,
    swept: u64,
}

/// OP-leg work plan.
#[derive(Debug, Default)]
struct OpLegPlan {
    reclaim: Vec<ObjectId>,
    pre_tenure: Vec<ObjectId>,
    pre_survivor: Vec<ObjectId>,
    demote: Vec<ObjectId>,
    rescored: Vec<(ObjectId, LifetimeClass, (u8, u8))>,
    scanned: u64,
    bytes_moved: u64,
}

impl PredictiveRuntime {
    pub fn new(binding: PredictorBinding) -> Self {
        PredictiveRuntime {
            registry: DualRootRegistry::new(),
            binding,
            scored_bins: BTreeMap::new(),
        }
    }

    pub fn registry(&self) -> &DualRootRegistry {
        &self.registry
    }

    pub fn binding(&self) -> &PredictorBinding {
        &self.binding
    }

    /// Classifies a newly allocated Eden object and files it under the
    /// matching sub-root.
    pub fn classify_new(
        &mut self,
        heap: &Heap,
        id: ObjectId,
    ) -> Result<LifetimeClass, RuntimeError> {
        let class = match &self.binding {
            PredictorBinding::Oracle(truth) => {
                truth.classify(id).ok_or(RuntimeError::MissingTruth(id))?
            }
            PredictorBinding::Trained(models) => {
                let fv = extract_features(heap, id)?;
                let prediction = predict(models, &fv);
                self.scored_bins.insert(
                    id,
                    (fv.class_instances_alive_bin, fv.class_eden_survivors_bin),
                );
                prediction.lifetime_class
            }
        };
        self.registry.insert(id, class);
        Ok(class)
    }

    /// One Object Promoter pass over the OP partition, standalone: marks,
    /// then reclaims dead entries, pre-promotes live ones toward the space
    /// they are expected to die in, and demotes entries whose fresh decision
    /// flipped to likely-dead.
    pub fn op_scan(
        &mut self,
        heap: &mut Heap,
        config: &HeapConfig,
        cost_model: &CostModel,
    ) -> Result<OpReport, RuntimeError> {
        let marked = heap.mark_reachable();
        let plan = self.plan_op_leg(heap, &marked, config);
        self.apply_op_plan(heap, plan, cost_model)
    }

    /// One predictive collection: a single marking pass feeds both legs; the
    /// GC leg sweeps only the likely-dead partition (false negatives are aged
    /// and promoted exactly as the baseline would), while the OP leg scans the
    /// likely-live partition. Only the GC leg bills to the pause.
    pub fn predictive_gc_cycle(
        &mut self,
        heap: &mut Heap,
        config: &HeapConfig,
        cost_model: &CostModel,
        mode: ExecutionMode,
    ) -> Result<(GcReport, OpReport), RuntimeError> {
        // Any straggler allocated since the last classification gets filed
        // before sweeping.
        let unclassified: Vec<ObjectId> = heap
            .alive_ids()
            .filter(|&id| {
                heap.object(id).unwrap().space != Space::Tenured && !self.registry.contains(id)
            })
            .collect();
        for id in unclassified {
            self.classify_new(heap, id)?;
        }

        let marked = heap.mark_reachable();
        let (gc_plan, op_plan) = match mode {
            ExecutionMode::Serial => {
                let gc = plan_gc_leg(heap, &marked, config, &self.registry);
                let op = self.plan_op_leg(heap, &marked, config);
                (gc, op)
            }
            ExecutionMode::Concurrent => {
                let registry = &self.registry;
                let this = &*self;
                let heap_ref = &*heap;
                let marked_ref = &marked;
                std::thread::scope(|scope| {
                    let gc_thread =
                        scope.spawn(move || plan_gc_leg(heap_ref, marked_ref, config, registry));
                    let op = this.plan_op_leg(heap_ref, marked_ref, config);
                    (gc_thread.join().expect("gc leg planning panicked"), op)
                })
            }
        };

        // The legs' claims must stay disjoint (partition invariant).
        let gc_touched: BTreeSet<ObjectId> = gc_plan
            .reclaim
            .iter()
            .chain(&gc_plan.to_survivor)
            .chain(&gc_plan.to_tenured)
            .copied()
            .collect();
        for (id, _) in op_plan
            .reclaim
            .iter()
            .map(|&id| (id, ()))
            .chain(op_plan.pre_tenure.iter().map(|&id| (id, ())))
            .chain(op_plan.pre_survivor.iter().map(|&id| (id, ())))
            .chain(op_plan.demote.iter().map(|&id| (id, ())))
        {
            if gc_touched.contains(&id) {
                return Err(RuntimeError::DualClaim(id));
            }
        }

        let gc_report = self.apply_gc_plan(heap, gc_plan, cost_model)?;
        let op_report = self.apply_op_plan(heap, op_plan, cost_model)?;
        heap.roll_survivor_window();
        heap.swap_survivor_halves();
        let cycle_index = heap.advance_cycle();
        let gc_report = GcReport {
            cycle_index,
            ..gc_report
        };

        self.check_partition_totality(heap)?;
        Ok((gc_report, op_report))
    }

    /// Cheap totality check: every alive non-Tenured object sits in exactly
    /// one partition.
    fn check_partition_totality(&self, heap: &Heap) -> Result<(), RuntimeError> {
        let young = heap.space_count(Space::Eden)
            + heap.space_count(Space::Survivor0)
            + heap.space_count(Space::Survivor1);
        if young != self.registry.total_len() as u64 {
            return Err(RuntimeError::PartitionViolation(format!(
                "{} alive young objects but {} registry members",
                young,
                self.registry.total_len()
            )));
        }
        Ok(())
    }

    fn plan_op_leg(
        &self,
        heap: &Heap,
        marked: &BTreeSet<ObjectId>,
        config: &HeapConfig,
    ) -> OpLegPlan {
        let mut plan = OpLegPlan::default();
        let active_half = heap.active_survivor();
        let mut active_used = heap.occupancy(active_half);

        for (id, mut class) in self.registry.op_entries() {
            plan.scanned += 1;
            if !marked.contains(&id) {
                plan.reclaim.push(id);
                continue;
            }
            let rec = heap.object(id).expect("registry members are alive");

            // Dynamic features may have drifted; re-score stale entries.
            if let PredictorBinding::Trained(models) = &self.binding {
                let stats = heap.class_stats(&rec.class_name);
                let bins = (count_bin(stats.alive), count_bin(stats.eden_survivors));
                if self.scored_bins.get(&id) != Some(&bins) {
                    let fv = extract_features(heap, id).expect("registry members are alive");
                    class = predict(models, &fv).lifetime_class;
                    plan.rescored.push((id, class, bins));
                }
            }

            match class {
                LifetimeClass::DieInEden => plan.demote.push(id),
                LifetimeClass::LongLived => {
                    if rec.space != Space::Tenured {
                        plan.pre_tenure.push(id);
                        plan.bytes_moved += rec.size_bytes;
                    }
                }
                LifetimeClass::MidLived => {
                    if rec.space == Space::Eden {
                        plan.bytes_moved += rec.size_bytes;
                        if active_used + rec.size_bytes > config.survivor_capacity_bytes {
                            plan.pre_tenure.push(id);
                        } else {
                            active_used += rec.size_bytes;
                            plan.pre_survivor.push(id);
                        }
                    }
                }
            }
        }
        plan
    }

    fn apply_gc_plan(
        &mut self,
        heap: &mut Heap,
        plan: GcLegPlan,
        cost_model: &CostModel,
    ) -> Result<GcReport, RuntimeError> {
        let target_half = heap.survivor_copy_target();
        for &id in &plan.to_survivor {
            heap.bump_age(id)?;
            heap.promote(id, target_half)?;
        }
        for &id in &plan.to_tenured {
            heap.bump_age(id)?;
            heap.promote(id, Space::Tenured)?;
        }
        heap.reclaim_batch(&plan.reclaim)?;

        // Entries promoted to the survivor half stay in the GC partition,
        // mirroring the baseline's re-sweeping of survivor residents.
        let mut gone: BTreeSet<ObjectId> = plan.reclaim.iter().copied().collect();
        gone.extend(&plan.to_tenured);
        self.registry.remove_many(&gone);
        for id in gone {
            self.scored_bins.remove(&id);
        }

        let reclaimed = plan.reclaim.len() as u64;
        let promoted_s = plan.to_survivor.len() as u64;
        let promoted_t = plan.to_tenured.len() as u64;
        Ok(GcReport {
            cycle_index: heap.current_cycle(), // stamped by the caller
            kind: GcKind::Minor,
            objects_swept: plan.swept,
            objects_reclaimed: reclaimed,
            live_objects_handled: plan.swept - reclaimed,
            bytes_copied: plan.bytes_copied,
            objects_promoted_to_survivor: promoted_s,
            objects_promoted_to_tenured: promoted_t,
            pause_cost: cost_model.cost(plan.swept, plan.bytes_copied, promoted_s + promoted_t),
        })
    }

    fn apply_op_plan(
        &mut self,
        heap: &mut Heap,
        plan: OpLegPlan,
        cost_model: &CostModel,
    ) -> Result<OpReport, RuntimeError> {
        for (id, class, bins) in &plan.rescored {
            self.scored_bins.insert(*id, *bins);
            if matches!(class, LifetimeClass::MidLived | LifetimeClass::LongLived) {
                self.registry.set_op_class(*id, *class);
            }
        }
        heap.reclaim_batch(&plan.reclaim)?;
        let active_half = heap.active_survivor();
        for &id in &plan.pre_survivor {
            heap.promote(id, active_half)?;
        }
        for &id in &plan.pre_tenure {
            heap.promote(id, Space::Tenured)?;
        }

        let mut gone: BTreeSet<ObjectId> = plan.reclaim.iter().copied().collect();
        gone.extend(&plan.pre_tenure);
        self.registry.remove_many(&gone);
        for id in gone {
            self.scored_bins.remove(&id);
        }
        let demoted: BTreeSet<ObjectId> = plan.demote.iter().copied().collect();
        self.registry.demote_many(&demoted);

        Ok(OpReport {
            objects_scanned: plan.scanned,
            objects_reclaimed_by_op: plan.reclaim.len() as u64,
            objects_pre_promoted_to_survivor: plan.pre_survivor.len() as u64,
            objects_pre_promoted_to_tenured: plan.pre_tenure.len() as u64,
            objects_moved_to_gc_partition: plan.demote.len() as u64,
            op_cost: cost_model.cost(
                plan.scanned,
                plan.bytes_moved,
                (plan.pre_survivor.len() + plan.pre_tenure.len()) as u64,
            ),
        })
    }
}

/// Scores a feature vector under both models and maps it to a lifetime band.
pub fn predict(models: &TrainedModels, fv: &crate::predictor::FeatureVector) -> LifetimePrediction {
    let p_survive_eden = models.survive_model.posterior(fv);
    let p_reach_tenured = models.tenure_model.posterior(fv);
    LifetimePrediction {
        p_survive_eden,
        p_reach_tenured,
        lifetime_class: expected_lifetime(p_survive_eden, p_reach_tenured, models.policy),
    }
}

fn plan_gc_leg(
    heap: &Heap,
    marked: &BTreeSet<ObjectId>,
    config: &HeapConfig,
    registry: &DualRootRegistry,
) -> GcLegPlan {
    let mut plan = GcLegPlan::default();
    let target_half = heap.survivor_copy_target();
    let mut target_used = heap.occupancy(target_half);

    for id in registry.gc_members() {
        plan.swept += 1;
        if !marked.contains(&id) {
            plan.reclaim.push(id);
            continue;
        }
        // A false negative: handled exactly as the baseline would.
        let rec = heap.object(id).expect("registry members are alive");
        let size = rec.size_bytes;
        plan.bytes_copied += size;
        if rec.age + 1 >= config.tenuring_age_threshold
            || target_used + size > config.survivor_capacity_bytes
        {
            plan.to_tenured.push(id);
        } else {
            target_used += size;
            plan.to_survivor.push(id);
        }
    }
    plan
}
