//! The traditional stop-the-world generational collector: mark from ROOT,
//! reclaim the dead, age and copy survivors between the survivor halves, and
//! tenure objects past the age threshold. This is the control arm of every
//! experiment and the label source for training.

use serde::{Deserialize, Serialize};

use crate::experiment::{self, ExperimentError, ReplayOptions};
use crate::heap::{Heap, HeapConfig, HeapError, ObjectId, Space};
use crate::predictor::LabeledExample;
use crate::trace::Trace;

/// Collection flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GcKind {
    Minor,
    Major,
}

impl GcKind {
    pub fn token(self) -> &'static str {
        match self {
            GcKind::Minor => "minor",
            GcKind::Major => "major",
        }
    }
}

/// Abstract stop-the-world cost weights. Live-object handling (copying and
/// promotion) dominates under the defaults, which is the effect the
/// predictive collector is meant to take off the pause path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub cost_per_swept_object: f64,
    pub cost_per_copied_byte: f64,
    pub cost_per_promoted_object: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            cost_per_swept_object: 1.0,
            cost_per_copied_byte: 0.01,
            cost_per_promoted_object: 2.0,
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<(), HeapError> {
        if self.cost_per_swept_object < 0.0
            || self.cost_per_copied_byte < 0.0
            || self.cost_per_promoted_object < 0.0
        {
            return Err(HeapError::InvalidConfig(
                "cost weights must be non-negative".into(),
            ));
        }
        Ok(())
    }

    pub fn cost(&self, swept: u64, bytes_copied: u64, promotions: u64) -> f64 {
        swept as f64 * self.cost_per_swept_object
            + bytes_copied as f64 * self.cost_per_copied_byte
            + promotions as f64 * self.cost_per_promoted_object
    }
}

/// Per-collection accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcReport {
    pub cycle_index: u64,
    pub kind: GcKind,
    pub objects_swept: u64,
    pub objects_reclaimed: u64,
    pub live_objects_handled: u64,
    pub bytes_copied: u64,
    pub objects_promoted_to_survivor: u64,
    pub objects_promoted_to_tenured: u64,
    pub pause_cost: f64,
}

impl GcReport {
    pub const CSV_HEADER: &'static str =
        "cycle,kind,swept,reclaimed,live_handled,bytes_copied,promoted_s,promoted_t,pause_cost";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.cycle_index,
            self.kind.token(),
            self.objects_swept,
            self.objects_reclaimed,
            self.live_objects_handled,
            self.bytes_copied,
            self.objects_promoted_to_survivor,
            self.objects_promoted_to_tenured,
            self.pause_cost,
        )
    }
}

/// A minor GC's report plus the per-object outcome lists the replay driver
/// uses for label bookkeeping.
#[derive(Debug, Clone)]
pub struct MinorOutcome {
    pub report: GcReport,
    pub reclaimed: Vec<ObjectId>,
    pub promoted_to_survivor: Vec<ObjectId>,
    pub promoted_to_tenured: Vec<ObjectId>,
}

#[derive(Debug, Clone)]
pub struct MajorOutcome {
    pub report: GcReport,
    pub reclaimed: Vec<ObjectId>,
}

/// Stop-the-world minor collection: marks from ROOT, reclaims every
/// unreachable object in Eden and the active survivor half, and copies every
/// reachable one — into the other survivor half, or into Tenured once its
/// incremented age reaches the threshold. Survivor overflow promotes straight
/// to Tenured. The survivor halves swap roles afterwards.
pub fn minor_gc(
    heap: &mut Heap,
    config: &HeapConfig,
    cost_model: &CostModel,
) -> Result<MinorOutcome, HeapError> {
    let marked = heap.mark_reachable();
    let mut sweep = heap.alive_in_space(Space::Eden);
    sweep.extend(heap.alive_in_space(heap.active_survivor()));

    let target_half = heap.survivor_copy_target();
    let mut target_used = heap.occupancy(target_half);
    let mut reclaimed = Vec::new();
    let mut promoted_to_survivor = Vec::new();
    let mut promoted_to_tenured = Vec::new();
    let mut bytes_copied = 0u64;

    for &id in &sweep {
        if !marked.contains(&id) {
            reclaimed.push(id);
            continue;
        }
        let age = heap.bump_age(id)?;
        let size = heap.object(id)?.size_bytes;
        bytes_copied += size;
        if age >= config.tenuring_age_threshold
            || target_used + size > config.survivor_capacity_bytes
        {
            heap.promote(id, Space::Tenured)?;
            promoted_to_tenured.push(id);
        } else {
            heap.promote(id, target_half)?;
            target_used += size;
            promoted_to_survivor.push(id);
        }
    }
    heap.reclaim_batch(&reclaimed)?;
    heap.roll_survivor_window();
    heap.swap_survivor_halves();
    let cycle_index = heap.advance_cycle();

    let swept = sweep.len() as u64;
    let n_reclaimed = reclaimed.len() as u64;
    let promotions = (promoted_to_survivor.len() + promoted_to_tenured.len()) as u64;
    Ok(MinorOutcome {
        report: GcReport {
            cycle_index,
            kind: GcKind::Minor,
            objects_swept: swept,
            objects_reclaimed: n_reclaimed,
            live_objects_handled: swept - n_reclaimed,
            bytes_copied,
            objects_promoted_to_survivor: promoted_to_survivor.len() as u64,
            objects_promoted_to_tenured: promoted_to_tenured.len() as u64,
            pause_cost: cost_model.cost(swept, bytes_copied, promotions),
        },
        reclaimed,
        promoted_to_survivor,
        promoted_to_tenured,
    })
}

/// Stop-the-world major collection: reclaims unreachable Tenured objects.
/// No promotion and no copying.
pub fn major_gc(
    heap: &mut Heap,
    _config: &HeapConfig,
    cost_model: &CostModel,
) -> Result<MajorOutcome, HeapError> {
    let marked = heap.mark_reachable();
    let sweep = heap.alive_in_space(Space::Tenured);
    let reclaimed: Vec<ObjectId> = sweep
        .iter()
        .copied()
        .filter(|id| !marked.contains(id))
        .collect();
    heap.reclaim_batch(&reclaimed)?;
    let cycle_index = heap.advance_cycle();

    let swept = sweep.len() as u64;
    let n_reclaimed = reclaimed.len() as u64;
    Ok(MajorOutcome {
        report: GcReport {
            cycle_index,
            kind: GcKind::Major,
            objects_swept: swept,
            objects_reclaimed: n_reclaimed,
            live_objects_handled: swept - n_reclaimed,
            bytes_copied: 0,
            objects_promoted_to_survivor: 0,
            objects_promoted_to_tenured: 0,
            pause_cost: cost_model.cost(swept, 0, 0),
        },
        reclaimed,
    })
}

/// Replays a trace under the baseline collector and labels every object:
/// its features at allocation time, whether it lived through at least one
/// minor GC, and whether it ever reached Tenured. Objects allocated after the
/// last collection never face a GC and are censored out of the dataset.
pub fn collect_labels(
    trace: &Trace,
    config: &HeapConfig,
) -> Result<Vec<LabeledExample>, ExperimentError> {
    let outcome = experiment::replay_baseline(
        trace,
        config,
        &CostModel::default(),
        ReplayOptions {
            final_pass: false,
            collect_features: true,
        },
    )?;
    Ok(outcome.labels)
}
