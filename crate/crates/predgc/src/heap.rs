//! The simulated heap: objects, generational spaces, the mutator reference
//! graph, and the ground-truth reachability oracle.
//!
//! The heap itself never triggers collection; capacity policy lives in the
//! replay driver, and the collectors own all age bookkeeping.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::histogram::Histogram;

/// Unique identity of a simulated object. Ids are assigned sequentially per
/// heap and never reused, so one id names one allocation for a whole run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectId(pub u64);

impl std::fmt::Display for ObjectId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Generational space an object currently occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Space {
    Eden,
    Survivor0,
    Survivor1,
    Tenured,
}

impl Space {
    fn index(self) -> usize {
        match self {
            Space::Eden => 0,
            Space::Survivor0 => 1,
            Space::Survivor1 => 2,
            Space::Tenured => 3,
        }
    }

    pub fn is_survivor(self) -> bool {
        matches!(self, Space::Survivor0 | Space::Survivor1)
    }

    /// The paired survivor half.
    pub fn other_survivor(self) -> Space {
        match self {
            Space::Survivor0 => Space::Survivor1,
            Space::Survivor1 => Space::Survivor0,
            _ => panic!("other_survivor on non-survivor space"),
        }
    }

    /// Legal `promote` transitions: Eden may move to either survivor half or
    /// Tenured, survivors to the other half or Tenured, Tenured stays put.
    fn can_promote_to(self, target: Space) -> bool {
        match self {
            Space::Eden => matches!(target, Space::Survivor0 | Space::Survivor1 | Space::Tenured),
            Space::Survivor0 | Space::Survivor1 => {
                matches!(target, Space::Survivor0 | Space::Survivor1 | Space::Tenured)
            }
            Space::Tenured => target == Space::Tenured,
        }
    }
}

impl std::fmt::Display for Space {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Space::Eden => "eden",
            Space::Survivor0 => "survivor0",
            Space::Survivor1 => "survivor1",
            Space::Tenured => "tenured",
        };
        f.write_str(s)
    }
}

/// A reference-graph endpoint: the distinguished root, or an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Node {
    Root,
    Object(ObjectId),
}

impl From<ObjectId> for Node {
    fn from(id: ObjectId) -> Self {
        Node::Object(id)
    }
}

/// One simulated heap object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObjectRecord {
    pub id: ObjectId,
    pub class_name: String,
    pub size_bytes: u64,
    /// GC cycle count at allocation.
    pub birth_cycle: u64,
    /// Minor-GC cycles survived; incremented only by the collectors.
    pub age: u32,
    pub space: Space,
    pub alive: bool,
}

/// Capacities and thresholds the replay driver enforces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeapConfig {
    pub eden_capacity_bytes: u64,
    pub survivor_capacity_bytes: u64,
    pub tenured_capacity_bytes: u64,
    pub tenuring_age_threshold: u32,
    pub major_gc_occupancy_fraction: f64,
}

impl Default for HeapConfig {
    fn default() -> Self {
        HeapConfig {
            eden_capacity_bytes: 262_144,
            survivor_capacity_bytes: 65_536,
            tenured_capacity_bytes: 4_194_304,
            tenuring_age_threshold: 3,
            major_gc_occupancy_fraction: 0.9,
        }
    }
}

impl HeapConfig {
    pub fn validate(&self) -> Result<(), HeapError> {
        if self.eden_capacity_bytes == 0
            || self.survivor_capacity_bytes == 0
            || self.tenured_capacity_bytes == 0
        {
            return Err(HeapError::InvalidConfig(
                "capacities must be positive".into(),
            ));
        }
        if self.tenuring_age_threshold < 1 {
            return Err(HeapError::InvalidConfig(
                "tenuring_age_threshold must be at least 1".into(),
            ));
        }
        if !(self.major_gc_occupancy_fraction > 0.0 && self.major_gc_occupancy_fraction <= 1.0) {
            return Err(HeapError::InvalidConfig(
                "major_gc_occupancy_fraction must be in (0, 1]".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum HeapError {
    #[error("invalid heap config: {0}")]
    InvalidConfig(String),
    #[error("allocation size must be positive")]
    ZeroSize,
    #[error("unknown object {0}")]
    UnknownObject(ObjectId),
    #[error("object {0} was already reclaimed")]
    DeadObject(ObjectId),
    #[error("edge {0:?} -> {1} does not exist")]
    MissingEdge(Node, ObjectId),
    #[error("illegal space transition {from} -> {to} for object {id}")]
    IllegalTransition {
        id: ObjectId,
        from: Space,
        to: Space,
    },
    #[error("refusing to reclaim reachable object {0}")]
    ReclaimReachable(ObjectId),
}

/// Per-class running counters feeding the dynamic prediction features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassStats {
    pub alive: u64,
    /// Objects of this class that outlived Eden in the latest minor GC
    /// (first-survival transitions of the most recent collection window).
    pub eden_survivors: u64,
}

/// The heap: an object table, a reference multigraph rooted at [`Node::Root`],
/// and per-space occupancy counters.
///
/// Reclaimed objects keep their record (with `alive = false`) so lineage stays
/// queryable; all edge and occupancy bookkeeping covers live objects only.
#[derive(Debug, Clone)]
pub struct Heap {
    objects: BTreeMap<ObjectId, ObjectRecord>,
    out_edges: BTreeMap<Node, BTreeMap<ObjectId, u32>>,
    in_edges: BTreeMap<ObjectId, BTreeMap<Node, u32>>,
    occupancy: [u64; 4],
    space_counts: [u64; 4],
    current_cycle: u64,
    /// Survivor half holding objects between minor GCs; the next collection
    /// copies into the other half. Starts at Survivor1 so the first minor GC
    /// fills Survivor0.
    active_survivor: Space,
    class_stats: BTreeMap<String, ClassStats>,
    /// First-survival counts accumulated during the current collection,
    /// folded into `class_stats` when the window rolls.
    pending_eden_survivors: BTreeMap<String, u64>,
    next_id: u64,
    alive_count: u64,
}

impl Default for Heap {
    fn default() -> Self {
        Self::new()
    }
}

impl Heap {
    pub fn new() -> Self {
        Heap {
            objects: BTreeMap::new(),
            out_edges: BTreeMap::new(),
            in_edges: BTreeMap::new(),
            occupancy: [0; 4],
            space_counts: [0; 4],
            current_cycle: 0,
            active_survivor: Space::Survivor1,
            class_stats: BTreeMap::new(),
            pending_eden_survivors: BTreeMap::new(),
            next_id: 1,
            alive_count: 0,
        }
    }

    /// Creates a new object in Eden with age 0 and returns its fresh id.
    /// Never triggers collection; the driver enforces capacity.
    pub fn allocate(&mut self, class_name: &str, size_bytes: u64) -> Result<ObjectId, HeapError> {
        if size_bytes == 0 {
            return Err(HeapError::ZeroSize);
        }
        let id = ObjectId(self.next_id);
        self.next_id += 1;
        self.objects.insert(
            id,
            ObjectRecord {
                id,
                class_name: class_name.to_string(),
                size_bytes,
                birth_cycle: self.current_cycle,
                age: 0,
                space: Space::Eden,
                alive: true,
            },
        );
        self.occupancy[Space::Eden.index()] += size_bytes;
        self.space_counts[Space::Eden.index()] += 1;
        self.class_stats
            .entry(class_name.to_string())
            .or_default()
            .alive += 1;
        self.alive_count += 1;
        Ok(id)
    }

    fn require_alive(&self, id: ObjectId) -> Result<&ObjectRecord, HeapError> {
        let rec = self.objects.get(&id).ok_or(HeapError::UnknownObject(id))?;
        if !rec.alive {
            return Err(HeapError::DeadObject(id));
        }
        Ok(rec)
    }

    fn require_node_alive(&self, node: Node) -> Result<(), HeapError> {
        match node {
            Node::Root => Ok(()),
            Node::Object(id) => self.require_alive(id).map(|_| ()),
        }
    }

    /// Adds a reference edge. Duplicate edges are counted (multigraph).
    pub fn link(&mut self, parent: Node, child: ObjectId) -> Result<(), HeapError> {
        self.require_node_alive(parent)?;
        self.require_alive(child)?;
        *self
            .out_edges
            .entry(parent)
            .or_default()
            .entry(child)
            .or_insert(0) += 1;
        *self
            .in_edges
            .entry(child)
            .or_default()
            .entry(parent)
            .or_insert(0) += 1;
        Ok(())
    }

    /// Removes one copy of an edge; removing an edge that does not exist
    /// signals a malformed trace.
    pub fn unlink(&mut self, parent: Node, child: ObjectId) -> Result<(), HeapError> {
        let count = self
            .out_edges
            .get_mut(&parent)
            .and_then(|m| m.get_mut(&child))
            .ok_or(HeapError::MissingEdge(parent, child))?;
        *count -= 1;
        if *count == 0 {
            self.out_edges.get_mut(&parent).unwrap().remove(&child);
        }
        let back = self
            .in_edges
            .get_mut(&child)
            .and_then(|m| m.get_mut(&parent))
            .expect("in-edge mirrors out-edge");
        *back -= 1;
        if *back == 0 {
            self.in_edges.get_mut(&child).unwrap().remove(&parent);
        }
        Ok(())
    }

    /// Returns how many copies of `parent -> child` currently exist.
    pub fn edge_count(&self, parent: Node, child: ObjectId) -> u32 {
        self.out_edges
            .get(&parent)
            .and_then(|m| m.get(&child))
            .copied()
            .unwrap_or(0)
    }

    /// The reachability oracle: exactly the alive ids reachable from ROOT.
    /// Pure; this is both the collectors' marking step and the test oracle.
    pub fn mark_reachable(&self) -> BTreeSet<ObjectId> {
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::new();
        if let Some(children) = self.out_edges.get(&Node::Root) {
            for &child in children.keys() {
                if seen.insert(child) {
                    queue.push_back(child);
                }
            }
        }
        while let Some(id) = queue.pop_front() {
            if let Some(children) = self.out_edges.get(&Node::Object(id)) {
                for &child in children.keys() {
                    if seen.insert(child) {
                        queue.push_back(child);
                    }
                }
            }
        }
        seen
    }

    /// Length of the shortest edge path from ROOT to `id`, or `None` when no
    /// path exists. Walks parent edges upward, so cost is bounded by the
    /// object's ancestor closure rather than the whole heap.
    pub fn depth_from_root(&self, id: ObjectId) -> Result<Option<u32>, HeapError> {
        self.require_alive(id)?;
        let mut seen: BTreeSet<ObjectId> = BTreeSet::new();
        let mut frontier: Vec<ObjectId> = vec![id];
        seen.insert(id);
        let mut depth = 0u32;
        while !frontier.is_empty() {
            depth += 1;
            let mut next = Vec::new();
            for &cur in &frontier {
                if let Some(parents) = self.in_edges.get(&cur) {
                    for parent in parents.keys() {
                        match parent {
                            Node::Root => return Ok(Some(depth)),
                            Node::Object(pid) => {
                                if seen.insert(*pid) {
                                    next.push(*pid);
                                }
                            }
                        }
                    }
                }
            }
            frontier = next;
        }
        Ok(None)
    }

    /// Moves a live object between spaces, adjusting occupancy. Ages are the
    /// calling collector's business and are not touched here.
    pub fn promote(&mut self, id: ObjectId, target: Space) -> Result<(), HeapError> {
        let (from, size) = {
            let rec = self.require_alive(id)?;
            (rec.space, rec.size_bytes)
        };
        if !from.can_promote_to(target) {
            return Err(HeapError::IllegalTransition {
                id,
                from,
                to: target,
            });
        }
        if from == target {
            return Ok(());
        }
        self.occupancy[from.index()] -= size;
        self.occupancy[target.index()] += size;
        self.space_counts[from.index()] -= 1;
        self.space_counts[target.index()] += 1;
        self.objects.get_mut(&id).unwrap().space = target;
        Ok(())
    }

    /// Increments an object's age by one survived minor GC. A first survival
    /// is tallied into the pending window for [`Heap::roll_survivor_window`].
    pub fn bump_age(&mut self, id: ObjectId) -> Result<u32, HeapError> {
        self.require_alive(id)?;
        let rec = self.objects.get_mut(&id).unwrap();
        rec.age += 1;
        let age = rec.age;
        if age == 1 {
            let class = rec.class_name.clone();
            *self.pending_eden_survivors.entry(class).or_insert(0) += 1;
        }
        Ok(age)
    }

    /// Closes one minor-GC window: every class's eden-survivor counter takes
    /// the count of its first survivals in this collection. The collectors
    /// call this once per minor GC.
    pub fn roll_survivor_window(&mut self) {
        for (class, stats) in self.class_stats.iter_mut() {
            stats.eden_survivors = self.pending_eden_survivors.get(class).copied().unwrap_or(0);
        }
        self.pending_eden_survivors.clear();
    }

    /// Reclaims one object. See [`Heap::reclaim_batch`].
    pub fn reclaim(&mut self, id: ObjectId) -> Result<(), HeapError> {
        self.reclaim_batch(&[id])
    }

    /// Reclaims a batch of objects after verifying, against a fresh marking
    /// pass, that none of them is reachable. Reclaiming a reachable object is
    /// a contract violation and is surfaced, never silent. All edges incident
    /// to a reclaimed object are removed.
    pub fn reclaim_batch(&mut self, ids: &[ObjectId]) -> Result<(), HeapError> {
        let reachable = self.mark_reachable();
        for &id in ids {
            self.require_alive(id)?;
            if reachable.contains(&id) {
                return Err(HeapError::ReclaimReachable(id));
            }
        }
        for &id in ids {
            // Batch members may already be gone if listed twice.
            self.require_alive(id)?;
            self.remove_edges_of(id);
            let rec = self.objects.get_mut(&id).unwrap();
            rec.alive = false;
            let size = rec.size_bytes;
            let space = rec.space;
            let class = rec.class_name.clone();
            self.occupancy[space.index()] -= size;
            self.space_counts[space.index()] -= 1;
            self.class_stats
                .get_mut(&class)
                .expect("class seen at alloc")
                .alive -= 1;
            self.alive_count -= 1;
        }
        Ok(())
    }

    fn remove_edges_of(&mut self, id: ObjectId) {
        if let Some(children) = self.out_edges.remove(&Node::Object(id)) {
            for child in children.keys() {
                if let Some(parents) = self.in_edges.get_mut(child) {
                    parents.remove(&Node::Object(id));
                }
            }
        }
        if let Some(parents) = self.in_edges.remove(&id) {
            for parent in parents.keys() {
                if let Some(children) = self.out_edges.get_mut(parent) {
                    children.remove(&id);
                }
            }
        }
    }

    /// Per-class snapshot of alive objects, optionally restricted to the
    /// currently reachable ones.
    pub fn histogram(&self, live_only: bool) -> Histogram {
        let reachable = if live_only {
            Some(self.mark_reachable())
        } else {
            None
        };
        let mut totals: BTreeMap<String, (u64, u64)> = BTreeMap::new();
        for rec in self.objects.values() {
            if !rec.alive {
                continue;
            }
            if let Some(ref r) = reachable {
                if !r.contains(&rec.id) {
                    continue;
                }
            }
            let e = totals.entry(rec.class_name.clone()).or_default();
            e.0 += 1;
            e.1 += rec.size_bytes;
        }
        Histogram::from_class_totals(totals)
    }

    pub fn object(&self, id: ObjectId) -> Result<&ObjectRecord, HeapError> {
        self.objects.get(&id).ok_or(HeapError::UnknownObject(id))
    }

    pub fn is_alive(&self, id: ObjectId) -> bool {
        self.objects.get(&id).map(|r| r.alive).unwrap_or(false)
    }

    pub fn occupancy(&self, space: Space) -> u64 {
        self.occupancy[space.index()]
    }

    pub fn alive_count(&self) -> u64 {
        self.alive_count
    }

    /// Number of alive objects in a space.
    pub fn space_count(&self, space: Space) -> u64 {
        self.space_counts[space.index()]
    }

    /// Compact digest of live heap state (id, space, age), for comparing two
    /// executions of the same run.
    pub fn state_digest(&self) -> Vec<(u64, Space, u32)> {
        self.objects
            .values()
            .filter(|r| r.alive)
            .map(|r| (r.id.0, r.space, r.age))
            .collect()
    }

    /// Alive ids in a given space, in id order.
    pub fn alive_in_space(&self, space: Space) -> Vec<ObjectId> {
        self.objects
            .values()
            .filter(|r| r.alive && r.space == space)
            .map(|r| r.id)
            .collect()
    }

    pub fn alive_ids(&self) -> impl Iterator<Item = ObjectId> + '_ {
        self.objects.values().filter(|r| r.alive).map(|r| r.id)
    }

    /// Every id reclaimed so far, in id order.
    pub fn reclaimed_ids(&self) -> Vec<ObjectId> {
        self.objects
            .values()
            .filter(|r| !r.alive)
            .map(|r| r.id)
            .collect()
    }

    pub fn class_stats(&self, class_name: &str) -> ClassStats {
        self.class_stats
            .get(class_name)
            .copied()
            .unwrap_or_default()
    }

    pub fn current_cycle(&self) -> u64 {
        self.current_cycle
    }

    /// Bumps the collection-cycle counter; called once per minor or major GC.
    pub fn advance_cycle(&mut self) -> u64 {
        self.current_cycle += 1;
        self.current_cycle
    }

    /// Survivor half holding objects between minor GCs.
    pub fn active_survivor(&self) -> Space {
        self.active_survivor
    }

    /// Survivor half the next minor GC copies into.
    pub fn survivor_copy_target(&self) -> Space {
        self.active_survivor.other_survivor()
    }

    /// Swaps the survivor halves' roles after a minor GC has copied.
    pub fn swap_survivor_halves(&mut self) {
        self.active_survivor = self.active_survivor.other_survivor();
    }

    /// Recomputes occupancy from scratch and compares with the running
    /// counters. Test and fuzz hook for the conservation invariant.
    pub fn verify_occupancy(&self) -> Result<(), String> {
        let mut fresh = [0u64; 4];
        for rec in self.objects.values() {
            if rec.alive {
                fresh[rec.space.index()] += rec.size_bytes;
            }
        }
        if fresh != self.occupancy {
            return Err(format!(
                "occupancy drift: counters {:?}, actual {:?}",
                self.occupancy, fresh
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root() -> Node {
        Node::Root
    }

    #[test]
    fn first_allocation() {
        let mut heap = Heap::new();
        let id = heap.allocate("A", 24).unwrap();
        assert_eq!(id, ObjectId(1));
        let rec = heap.object(id).unwrap();
        assert_eq!(rec.space, Space::Eden);
        assert_eq!(rec.age, 0);
        assert_eq!(heap.occupancy(Space::Eden), 24);
    }

    #[test]
    fn ids_are_fresh_and_occupancy_sums() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 24).unwrap();
        let b = heap.allocate("A", 24).unwrap();
        assert_ne!(a, b);
        assert_eq!(heap.occupancy(Space::Eden), 48);
    }

    #[test]
    fn zero_size_allocation_rejected() {
        let mut heap = Heap::new();
        assert_eq!(heap.allocate("A", 0), Err(HeapError::ZeroSize));
    }

    #[test]
    fn model_source_histogram_row() {
        // 15736 instances at 16 bytes each is the 251776-byte class row.
        let mut heap = Heap::new();
        for _ in 0..15736 {
            heap.allocate("com.sun.media.sound.ModelSource", 16)
                .unwrap();
        }
        let h = heap.histogram(false);
        let row = h.get("com.sun.media.sound.ModelSource").unwrap();
        assert_eq!(row.instances, 15736);
        assert_eq!(row.bytes, 251776);
    }

    #[test]
    fn link_unlink_inverse() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        heap.link(root(), a).unwrap();
        heap.unlink(root(), a).unwrap();
        assert_eq!(heap.edge_count(root(), a), 0);
    }

    #[test]
    fn duplicate_edges_are_counted() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        heap.link(root(), a).unwrap();
        heap.link(root(), a).unwrap();
        heap.unlink(root(), a).unwrap();
        assert_eq!(heap.edge_count(root(), a), 1);
        assert!(heap.mark_reachable().contains(&a));
    }

    #[test]
    fn link_from_reclaimed_parent_fails() {
        let mut heap = Heap::new();
        let p = heap.allocate("P", 8).unwrap();
        let c = heap.allocate("C", 8).unwrap();
        heap.reclaim(p).unwrap();
        assert_eq!(heap.link(Node::Object(p), c), Err(HeapError::DeadObject(p)));
    }

    #[test]
    fn unlink_missing_edge_fails() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        assert!(matches!(
            heap.unlink(root(), a),
            Err(HeapError::MissingEdge(Node::Root, _))
        ));
    }

    #[test]
    fn mark_empty_heap() {
        let heap = Heap::new();
        assert!(heap.mark_reachable().is_empty());
    }

    #[test]
    fn mark_chain_and_orphan() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        let b = heap.allocate("B", 8).unwrap();
        let c = heap.allocate("C", 8).unwrap();
        heap.link(root(), a).unwrap();
        heap.link(Node::Object(a), b).unwrap();
        let marked = heap.mark_reachable();
        assert!(marked.contains(&a) && marked.contains(&b));
        assert!(!marked.contains(&c));
    }

    #[test]
    fn mark_cycle_through_root_then_cut() {
        // ROOT -> a -> b -> a: both reachable until the root edge goes away.
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        let b = heap.allocate("B", 8).unwrap();
        heap.link(root(), a).unwrap();
        heap.link(Node::Object(a), b).unwrap();
        heap.link(Node::Object(b), a).unwrap();
        let marked = heap.mark_reachable();
        assert_eq!(marked.len(), 2);
        heap.unlink(root(), a).unwrap();
        assert!(heap.mark_reachable().is_empty());
    }

    #[test]
    fn mark_is_pure() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        heap.link(root(), a).unwrap();
        assert_eq!(heap.mark_reachable(), heap.mark_reachable());
    }

    #[test]
    fn promotion_paths() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 16).unwrap();
        heap.promote(a, Space::Survivor0).unwrap();
        assert_eq!(heap.object(a).unwrap().space, Space::Survivor0);
        assert_eq!(heap.occupancy(Space::Eden), 0);
        assert_eq!(heap.occupancy(Space::Survivor0), 16);
        heap.promote(a, Space::Tenured).unwrap();
        assert_eq!(heap.object(a).unwrap().space, Space::Tenured);
        assert!(matches!(
            heap.promote(a, Space::Eden),
            Err(HeapError::IllegalTransition { .. })
        ));
    }

    #[test]
    fn reclaim_unlinked_object() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 32).unwrap();
        heap.reclaim(a).unwrap();
        assert!(!heap.is_alive(a));
        assert_eq!(heap.occupancy(Space::Eden), 0);
        assert_eq!(heap.reclaim(a), Err(HeapError::DeadObject(a)));
    }

    #[test]
    fn reclaim_reachable_is_refused() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        heap.link(root(), a).unwrap();
        assert_eq!(heap.reclaim(a), Err(HeapError::ReclaimReachable(a)));
        assert!(heap.is_alive(a));
    }

    #[test]
    fn reclaim_cycle_in_sequence() {
        // a -> b -> a detached from ROOT: reclaiming a removes its edges,
        // which frees b for the next reclaim.
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        let b = heap.allocate("B", 8).unwrap();
        heap.link(Node::Object(a), b).unwrap();
        heap.link(Node::Object(b), a).unwrap();
        heap.reclaim(a).unwrap();
        heap.reclaim(b).unwrap();
        assert!(!heap.is_alive(a) && !heap.is_alive(b));
        heap.verify_occupancy().unwrap();
    }

    #[test]
    fn histogram_empty_heap() {
        assert!(Heap::new().histogram(false).is_empty());
    }

    #[test]
    fn histogram_tie_broken_by_class_name() {
        let mut heap = Heap::new();
        for _ in 0..3 {
            heap.allocate("A", 24).unwrap();
        }
        heap.allocate("B", 72).unwrap();
        let h = heap.histogram(false);
        assert_eq!(h.rows()[0].class_name, "A");
        assert_eq!(h.rows()[0].instances, 3);
        assert_eq!(h.rows()[0].bytes, 72);
        assert_eq!(h.rows()[1].class_name, "B");
        assert_eq!(h.rows()[1].bytes, 72);
    }

    #[test]
    fn histogram_polygon_row_layout() {
        let mut heap = Heap::new();
        for _ in 0..3 {
            let id = heap.allocate("java.awt.Polygon", 24).unwrap();
            heap.link(root(), id).unwrap();
        }
        let h = heap.histogram(true);
        assert_eq!(
            h.to_text().lines().nth(1).unwrap(),
            "1:\t3\t72\tjava.awt.Polygon"
        );
    }

    #[test]
    fn histogram_live_only_excludes_unreachable() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        heap.allocate("A", 8).unwrap();
        heap.link(root(), a).unwrap();
        assert_eq!(heap.histogram(true).get("A").unwrap().instances, 1);
        assert_eq!(heap.histogram(false).get("A").unwrap().instances, 2);
    }

    #[test]
    fn depth_walks_shortest_path() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        let b = heap.allocate("B", 8).unwrap();
        let c = heap.allocate("C", 8).unwrap();
        heap.link(root(), a).unwrap();
        heap.link(Node::Object(a), b).unwrap();
        heap.link(Node::Object(b), c).unwrap();
        heap.link(root(), c).unwrap(); // shortcut
        assert_eq!(heap.depth_from_root(a).unwrap(), Some(1));
        assert_eq!(heap.depth_from_root(b).unwrap(), Some(2));
        assert_eq!(heap.depth_from_root(c).unwrap(), Some(1));
        let d = heap.allocate("D", 8).unwrap();
        assert_eq!(heap.depth_from_root(d).unwrap(), None);
    }

    #[test]
    fn class_stats_track_alive_and_survivors() {
        let mut heap = Heap::new();
        let a = heap.allocate("A", 8).unwrap();
        let b = heap.allocate("A", 8).unwrap();
        assert_eq!(heap.class_stats("A").alive, 2);
        heap.bump_age(a).unwrap();
        heap.roll_survivor_window();
        assert_eq!(heap.class_stats("A").eden_survivors, 1);
        // Re-survival of the same object is not a fresh Eden exit.
        heap.bump_age(a).unwrap();
        heap.bump_age(b).unwrap();
        heap.roll_survivor_window();
        assert_eq!(heap.class_stats("A").eden_survivors, 1);
        // A window with no survivals resets the counter.
        heap.roll_survivor_window();
        assert_eq!(heap.class_stats("A").eden_survivors, 0);
        heap.reclaim(a).unwrap();
        assert_eq!(heap.class_stats("A").alive, 1);
    }

    #[test]
    fn survivor_roles_swap() {
        let mut heap = Heap::new();
        assert_eq!(heap.survivor_copy_target(), Space::Survivor0);
        heap.swap_survivor_halves();
        assert_eq!(heap.survivor_copy_target(), Space::Survivor1);
    }
}
