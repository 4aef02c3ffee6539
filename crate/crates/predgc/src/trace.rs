//! Mutator traces: the replayable event stream driving the simulated heap,
//! a line-oriented text format for persisting them, and the seeded synthetic
//! workload generator.
//!
//! Generated workloads follow the weak generational hypothesis: most objects
//! are unlinked within the flow segment that allocated them, a small fraction
//! survives into the survivor spaces, and a thin tail stays linked to run end.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::heap::{Heap, Node, ObjectId};

/// Reserved parent token naming the GC root in trace files.
pub const ROOT_TOKEN: &str = "ROOT";

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("trace line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("invalid workload config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Trace-local parent reference: the root or a previously allocated tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParentRef {
    Root,
    Tag(String),
}

impl ParentRef {
    fn token(&self) -> &str {
        match self {
            ParentRef::Root => ROOT_TOKEN,
            ParentRef::Tag(t) => t,
        }
    }
}

/// One mutator event. Tags are trace-local names; the heap assigns real ids
/// at replay time.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceEvent {
    Alloc {
        tag: String,
        class_name: String,
        size_bytes: u64,
        parent: ParentRef,
    },
    Link {
        parent: ParentRef,
        child: String,
    },
    Unlink {
        parent: ParentRef,
        child: String,
    },
    Tick,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceMetadata {
    pub seed: Option<u64>,
    pub flows: Vec<String>,
}

/// An ordered, replayable stream of mutator events.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub metadata: TraceMetadata,
    pub events: Vec<TraceEvent>,
}

impl Trace {
    pub fn alloc_count(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, TraceEvent::Alloc { .. }))
            .count()
    }

    /// Renders the line-oriented text form.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# predgc trace v1\n");
        if let Some(seed) = self.metadata.seed {
            writeln!(out, "# seed: {seed}").expect("string write");
        }
        for flow in &self.metadata.flows {
            writeln!(out, "# flow: {flow}").expect("string write");
        }
        for ev in &self.events {
            match ev {
                TraceEvent::Alloc {
                    tag,
                    class_name,
                    size_bytes,
                    parent,
                } => writeln!(
                    out,
                    "ALLOC {tag} {class_name} {size_bytes} {}",
                    parent.token()
                ),
                TraceEvent::Link { parent, child } => {
                    writeln!(out, "LINK {} {child}", parent.token())
                }
                TraceEvent::Unlink { parent, child } => {
                    writeln!(out, "UNLINK {} {child}", parent.token())
                }
                TraceEvent::Tick => writeln!(out, "TICK"),
            }
            .expect("string write");
        }
        out
    }

    /// Parses and validates the text form: tags must be unique, and LINK and
    /// UNLINK may only name ROOT or previously allocated tags.
    pub fn from_text(text: &str) -> Result<Trace, TraceError> {
        let mut trace = Trace::default();
        let mut seen: BTreeMap<String, ()> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                if let Some(seed) = comment.strip_prefix("seed:") {
                    trace.metadata.seed = seed.trim().parse::<u64>().ok();
                } else if let Some(flow) = comment.strip_prefix("flow:") {
                    trace.metadata.flows.push(flow.trim().to_string());
                }
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let parse_err = |reason: String| TraceError::Parse {
                line: line_no,
                reason,
            };
            match tokens[0] {
                "ALLOC" => {
                    if tokens.len() != 5 {
                        return Err(parse_err("ALLOC expects: tag class bytes parent".into()));
                    }
                    let (tag, class_name, bytes_tok, parent_tok) =
                        (tokens[1], tokens[2], tokens[3], tokens[4]);
                    if tag == ROOT_TOKEN {
                        return Err(parse_err("tag may not be ROOT".into()));
                    }
                    if seen.contains_key(tag) {
                        return Err(parse_err(format!("duplicate tag `{tag}`")));
                    }
                    let size_bytes = bytes_tok
                        .parse::<u64>()
                        .map_err(|_| parse_err(format!("bad byte count `{bytes_tok}`")))?;
                    if size_bytes == 0 {
                        return Err(parse_err("allocation size must be positive".into()));
                    }
                    let parent = parse_parent(parent_tok, &seen)
                        .ok_or_else(|| parse_err(format!("unknown parent `{parent_tok}`")))?;
                    seen.insert(tag.to_string(), ());
                    trace.events.push(TraceEvent::Alloc {
                        tag: tag.to_string(),
                        class_name: class_name.to_string(),
                        size_bytes,
                        parent,
                    });
                }
                kw @ ("LINK" | "UNLINK") => {
                    if tokens.len() != 3 {
                        return Err(parse_err(format!("{kw} expects: parent child")));
                    }
                    let parent = parse_parent(tokens[1], &seen)
                        .ok_or_else(|| parse_err(format!("unknown parent `{}`", tokens[1])))?;
                    let child = tokens[2];
                    if child == ROOT_TOKEN || !seen.contains_key(child) {
                        return Err(parse_err(format!("unknown child `{child}`")));
                    }
                    let child = child.to_string();
                    trace.events.push(if kw == "LINK" {
                        TraceEvent::Link { parent, child }
                    } else {
                        TraceEvent::Unlink { parent, child }
                    });
                }
                "TICK" => trace.events.push(TraceEvent::Tick),
                other => return Err(parse_err(format!("unknown event `{other}`"))),
            }
        }
        Ok(trace)
    }

    pub fn write_file(&self, path: &Path) -> Result<(), TraceError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Trace, TraceError> {
        let text = std::fs::read_to_string(path)?;
        Trace::from_text(&text)
    }
}

fn parse_parent(token: &str, seen: &BTreeMap<String, ()>) -> Option<ParentRef> {
    if token == ROOT_TOKEN {
        Some(ParentRef::Root)
    } else if seen.contains_key(token) {
        Some(ParentRef::Tag(token.to_string()))
    } else {
        None
    }
}

/// Lifetime role a workload class is generated to play.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassRole {
    /// Unlinked within its flow segment, before the next plausible minor GC.
    Short,
    /// Survives at least one minor GC but is unlinked before tenuring age.
    Mid,
    /// Stays linked to run end.
    Long,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub name: String,
    pub size_bytes: u64,
    pub role: ClassRole,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlowSpec {
    pub classes: Vec<ClassSpec>,
}

/// Parameters of the synthetic workload generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkloadConfig {
    pub n_flows: usize,
    pub flows: Vec<FlowSpec>,
    /// Fraction of allocations unlinked before the next minor GC would
    /// plausibly occur. Defaults to 0.9, inside the 80-98% band the weak
    /// generational hypothesis describes.
    pub eden_mortality: f64,
    pub mid_lived_fraction: f64,
    pub long_lived_fraction: f64,
    pub allocations_per_flow: usize,
    pub seed: u64,
    /// Eden capacity the generator assumes when timing mid-lived unlinks so
    /// they land after one minor GC but before tenuring age.
    pub assumed_eden_capacity: u64,
}

impl Default for WorkloadConfig {
    fn default() -> Self {
        WorkloadConfig::with_defaults(4, 5_000, 42)
    }
}

impl WorkloadConfig {
    /// Builds a config with a default class roster per flow.
    pub fn with_defaults(n_flows: usize, allocations_per_flow: usize, seed: u64) -> Self {
        let flows = (0..n_flows).map(default_flow).collect();
        WorkloadConfig {
            n_flows,
            flows,
            eden_mortality: 0.9,
            mid_lived_fraction: 0.07,
            long_lived_fraction: 0.03,
            allocations_per_flow,
            seed,
            assumed_eden_capacity: 262_144,
        }
    }

    pub fn total_allocations(&self) -> usize {
        self.n_flows * self.allocations_per_flow
    }

    pub fn validate(&self) -> Result<(), TraceError> {
        let bad = |msg: &str| Err(TraceError::InvalidConfig(msg.to_string()));
        if self.n_flows < 1 {
            return bad("n_flows must be at least 1");
        }
        if self.flows.len() != self.n_flows {
            return bad("flows roster length must equal n_flows");
        }
        if self.allocations_per_flow < 1 {
            return bad("allocations_per_flow must be at least 1");
        }
        if self.assumed_eden_capacity == 0 {
            return bad("assumed_eden_capacity must be positive");
        }
        for frac in [
            self.eden_mortality,
            self.mid_lived_fraction,
            self.long_lived_fraction,
        ] {
            if !(0.0..=1.0).contains(&frac) {
                return bad("lifetime fractions must lie in [0, 1]");
            }
        }
        let sum = self.eden_mortality + self.mid_lived_fraction + self.long_lived_fraction;
        if (sum - 1.0).abs() > 1e-9 {
            return bad("lifetime fractions must sum to 1");
        }
        for flow in &self.flows {
            if flow.classes.is_empty() {
                return bad("every flow needs at least one class");
            }
            for class in &flow.classes {
                if class.name.is_empty()
                    || class.name == ROOT_TOKEN
                    || class.name.chars().any(char::is_whitespace)
                {
                    return bad("class names must be non-empty, whitespace-free, not ROOT");
                }
                if class.size_bytes == 0 {
                    return bad("class sizes must be positive");
                }
            }
        }
        Ok(())
    }
}

fn default_flow(f: usize) -> FlowSpec {
    let c = |suffix: &str, size: u64, role: ClassRole| ClassSpec {
        name: format!("com.app.flow{f}.{suffix}"),
        size_bytes: size,
        role,
    };
    FlowSpec {
        classes: vec![
            c("Scratch", 24 + 8 * (f as u64 % 3), ClassRole::Short),
            c("Temp", 48, ClassRole::Short),
            c("Buffer", 48 + 8 * (f as u64 % 2), ClassRole::Short),
            c("Batch", 80, ClassRole::Mid),
            c("Cache", 96 + 16 * (f as u64 % 2), ClassRole::Mid),
            c("Session", 144, ClassRole::Long),
            c("Registry", 160 + 32 * (f as u64 % 3), ClassRole::Long),
        ],
    }
}

/// Deterministically generates a trace from a workload config: same config,
/// byte-identical trace.
pub fn generate_synthetic(config: &WorkloadConfig) -> Result<Trace, TraceError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let target = config.total_allocations();

    // Per-flow class indices by role, with a fallback to the whole roster.
    let role_picks: Vec<[Vec<usize>; 3]> = config
        .flows
        .iter()
        .map(|flow| {
            let mut by_role: [Vec<usize>; 3] = Default::default();
            for (i, class) in flow.classes.iter().enumerate() {
                let slot = match class.role {
                    ClassRole::Short => 0,
                    ClassRole::Mid => 1,
                    ClassRole::Long => 2,
                };
                by_role[slot].push(i);
            }
            for bucket in &mut by_role {
                if bucket.is_empty() {
                    *bucket = (0..flow.classes.len()).collect();
                }
            }
            by_role
        })
        .collect();

    let mut trace = Trace {
        metadata: TraceMetadata {
            seed: Some(config.seed),
            flows: config
                .flows
                .iter()
                .enumerate()
                .map(|(i, flow)| {
                    format!(
                        "flow{i}: {}",
                        flow.classes
                            .iter()
                            .map(|c| c.name.as_str())
                            .collect::<Vec<_>>()
                            .join(" ")
                    )
                })
                .collect(),
        },
        events: Vec::new(),
    };

    // Pending death unlinks. Short-lived edges come due a fixed number of
    // allocations later; mid-lived edges come due after enough further
    // allocation bytes that at least one minor GC must have intervened.
    let mut due_by_allocs: Vec<(usize, ParentRef, String)> = Vec::new();
    let mut due_by_bytes: Vec<(u64, ParentRef, String)> = Vec::new();
    let mut long_registry: Vec<String> = Vec::new();

    let mut allocs = 0usize;
    let mut bytes = 0u64;
    let mut next_tag = 1u64;

    while allocs < target {
        let flow_idx = rng.gen_range(0..config.n_flows);
        let flow = &config.flows[flow_idx];
        let picks = &role_picks[flow_idx];
        let seg_len = rng.gen_range(8..=24).min(target - allocs);
        trace.events.push(TraceEvent::Tick);

        // An open short-lived container other shorts in this segment may
        // nest under; closed once its death unlink has been emitted.
        let mut container: Option<(String, String)> = None; // (container tag, deepest child tag)

        for _ in 0..seg_len {
            flush_due(
                &mut trace.events,
                &mut due_by_allocs,
                allocs,
                &mut container,
            );
            flush_bytes_due(&mut trace.events, &mut due_by_bytes, bytes);

            let roll: f64 = rng.gen();
            let tag = format!("o{next_tag}");
            next_tag += 1;

            if roll < config.eden_mortality {
                let class = pick(flow, &picks[0], &mut rng);
                let nested = container.is_some() && rng.gen_bool(0.6);
                if nested {
                    let (root_tag, deep_tag) = container.clone().unwrap();
                    let parent_tag = if rng.gen_bool(0.35) {
                        deep_tag
                    } else {
                        root_tag.clone()
                    };
                    trace.events.push(TraceEvent::Alloc {
                        tag: tag.clone(),
                        class_name: class.name.clone(),
                        size_bytes: class.size_bytes,
                        parent: ParentRef::Tag(parent_tag),
                    });
                    container = Some((root_tag, tag.clone()));
                } else {
                    trace.events.push(TraceEvent::Alloc {
                        tag: tag.clone(),
                        class_name: class.name.clone(),
                        size_bytes: class.size_bytes,
                        parent: ParentRef::Root,
                    });
                    due_by_allocs.push((
                        allocs + rng.gen_range(2..=12),
                        ParentRef::Root,
                        tag.clone(),
                    ));
                    if rng.gen_bool(0.3) {
                        container = Some((tag.clone(), tag.clone()));
                    }
                }
                bytes += class.size_bytes;
            } else if roll < config.eden_mortality + config.mid_lived_fraction {
                let class = pick(flow, &picks[1], &mut rng);
                let parent = if !long_registry.is_empty() && rng.gen_bool(0.3) {
                    let i = rng.gen_range(0..long_registry.len());
                    ParentRef::Tag(long_registry[i].clone())
                } else {
                    ParentRef::Root
                };
                trace.events.push(TraceEvent::Alloc {
                    tag: tag.clone(),
                    class_name: class.name.clone(),
                    size_bytes: class.size_bytes,
                    parent: parent.clone(),
                });
                bytes += class.size_bytes;
                let delay =
                    (config.assumed_eden_capacity as f64 * rng.gen_range(1.15..2.05)) as u64;
                due_by_bytes.push((bytes + delay, parent, tag.clone()));
            } else {
                let class = pick(flow, &picks[2], &mut rng);
                trace.events.push(TraceEvent::Alloc {
                    tag: tag.clone(),
                    class_name: class.name.clone(),
                    size_bytes: class.size_bytes,
                    parent: ParentRef::Root,
                });
                bytes += class.size_bytes;
                if long_registry.len() >= 2 && rng.gen_bool(0.15) {
                    let i = rng.gen_range(0..long_registry.len());
                    trace.events.push(TraceEvent::Link {
                        parent: ParentRef::Tag(long_registry[i].clone()),
                        child: tag.clone(),
                    });
                }
                long_registry.push(tag.clone());
            }
            allocs += 1;
        }
    }

    // Remaining short-lived deaths still fire; pending mid-lived deaths are
    // dropped, leaving those objects linked like long-lived ones.
    due_by_allocs.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.2.cmp(&b.2)));
    for (_, parent, child) in due_by_allocs.drain(..) {
        trace.events.push(TraceEvent::Unlink { parent, child });
    }
    Ok(trace)
}

fn pick<'a>(flow: &'a FlowSpec, indices: &[usize], rng: &mut ChaCha8Rng) -> &'a ClassSpec {
    &flow.classes[indices[rng.gen_range(0..indices.len())]]
}

fn flush_due(
    events: &mut Vec<TraceEvent>,
    due: &mut Vec<(usize, ParentRef, String)>,
    allocs: usize,
    container: &mut Option<(String, String)>,
) {
    let mut fired: Vec<(usize, ParentRef, String)> = due
        .iter()
        .filter(|(at, _, _)| *at <= allocs)
        .cloned()
        .collect();
    if fired.is_empty() {
        return;
    }
    due.retain(|(at, _, _)| *at > allocs);
    fired.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.2.cmp(&b.2)));
    for (_, parent, child) in fired {
        if let Some((root_tag, _)) = container {
            if *root_tag == child {
                *container = None;
            }
        }
        events.push(TraceEvent::Unlink { parent, child });
    }
}

fn flush_bytes_due(
    events: &mut Vec<TraceEvent>,
    due: &mut Vec<(u64, ParentRef, String)>,
    bytes: u64,
) {
    let mut fired: Vec<(u64, ParentRef, String)> = due
        .iter()
        .filter(|(at, _, _)| *at <= bytes)
        .cloned()
        .collect();
    if fired.is_empty() {
        return;
    }
    due.retain(|(at, _, _)| *at > bytes);
    fired.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.2.cmp(&b.2)));
    for (_, parent, child) in fired {
        events.push(TraceEvent::Unlink { parent, child });
    }
}

/// Replays a trace without collecting until Eden would first overflow the
/// given capacity, then reports the fraction of the objects allocated so far
/// that are already unreachable — the workload's observed eden mortality.
///
/// Returns `None` when the trace never fills Eden. The trace must replay
/// cleanly (generated traces always do); a malformed one panics.
pub fn measure_eden_mortality(trace: &Trace, eden_capacity: u64) -> Option<f64> {
    let mut heap = Heap::new();
    let mut tags: BTreeMap<&str, ObjectId> = BTreeMap::new();
    let mut allocated = 0u64;

    for event in &trace.events {
        match event {
            TraceEvent::Alloc {
                tag,
                class_name,
                size_bytes,
                parent,
            } => {
                if heap.occupancy(crate::heap::Space::Eden) + size_bytes > eden_capacity {
                    let reachable = heap.mark_reachable().len() as u64;
                    return Some(1.0 - reachable as f64 / allocated as f64);
                }
                let id = heap.allocate(class_name, *size_bytes).expect("valid trace");
                let parent_node = resolve(parent, &tags);
                heap.link(parent_node, id).expect("valid trace");
                tags.insert(tag.as_str(), id);
                allocated += 1;
            }
            TraceEvent::Link { parent, child } => {
                let p = resolve(parent, &tags);
                let c = tags[child.as_str()];
                heap.link(p, c).expect("valid trace");
            }
            TraceEvent::Unlink { parent, child } => {
                let p = resolve(parent, &tags);
                let c = tags[child.as_str()];
                heap.unlink(p, c).expect("valid trace");
            }
            TraceEvent::Tick => {}
        }
    }
    None
}

fn resolve(parent: &ParentRef, tags: &BTreeMap<&str, ObjectId>) -> Node {
    match parent {
        ParentRef::Root => Node::Root,
        ParentRef::Tag(t) => Node::Object(tags[t.as_str()]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_deterministic() {
        let cfg = WorkloadConfig::with_defaults(1, 10, 42);
        let a = generate_synthetic(&cfg).unwrap();
        let b = generate_synthetic(&cfg).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate_synthetic(&WorkloadConfig::with_defaults(2, 50, 1)).unwrap();
        let b = generate_synthetic(&WorkloadConfig::with_defaults(2, 50, 2)).unwrap();
        assert_ne!(a.to_text(), b.to_text());
    }

    #[test]
    fn default_mortality_is_representative() {
        assert!((WorkloadConfig::default().eden_mortality - 0.9).abs() < 1e-12);
    }

    #[test]
    fn measured_mortality_tracks_configured() {
        let cfg = WorkloadConfig::with_defaults(2, 5_000, 7);
        let trace = generate_synthetic(&cfg).unwrap();
        let measured = measure_eden_mortality(&trace, cfg.assumed_eden_capacity).unwrap();
        assert!(
            (measured - 0.9).abs() <= 0.03,
            "measured mortality {measured} strays from configured 0.9"
        );
    }

    #[test]
    fn generated_allocation_count_matches_config() {
        let cfg = WorkloadConfig::with_defaults(3, 40, 9);
        let trace = generate_synthetic(&cfg).unwrap();
        assert_eq!(trace.alloc_count(), 120);
    }

    #[test]
    fn empty_trace_round_trips() {
        let t = Trace::default();
        let back = Trace::from_text(&t.to_text()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn small_trace_round_trips() {
        let t = Trace {
            metadata: TraceMetadata {
                seed: Some(5),
                flows: vec!["flow0: A".into()],
            },
            events: vec![
                TraceEvent::Alloc {
                    tag: "o1".into(),
                    class_name: "A".into(),
                    size_bytes: 24,
                    parent: ParentRef::Root,
                },
                TraceEvent::Link {
                    parent: ParentRef::Tag("o1".into()),
                    child: "o1".into(),
                },
            ],
        };
        let back = Trace::from_text(&t.to_text()).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn forward_reference_is_a_parse_error() {
        let err = Trace::from_text("LINK x y\nALLOC x A 8 ROOT\n").unwrap_err();
        match err {
            TraceError::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_tag_is_a_parse_error() {
        let text = "ALLOC x A 8 ROOT\nALLOC x A 8 ROOT\n";
        let err = Trace::from_text(text).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn root_as_child_is_rejected() {
        let err = Trace::from_text("ALLOC x A 8 ROOT\nLINK x ROOT\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn fraction_sum_is_validated() {
        let mut cfg = WorkloadConfig::with_defaults(1, 10, 0);
        cfg.mid_lived_fraction = 0.2;
        assert!(matches!(
            generate_synthetic(&cfg),
            Err(TraceError::InvalidConfig(_))
        ));
    }

    #[test]
    fn generated_trace_replays_against_heap() {
        // Replay validity: every event must apply cleanly in order.
        let cfg = WorkloadConfig::with_defaults(2, 100, 3);
        let trace = generate_synthetic(&cfg).unwrap();
        let mut heap = Heap::new();
        let mut tags: BTreeMap<&str, ObjectId> = BTreeMap::new();
        for ev in &trace.events {
            match ev {
                TraceEvent::Alloc {
                    tag,
                    class_name,
                    size_bytes,
                    parent,
                } => {
                    let id = heap.allocate(class_name, *size_bytes).unwrap();
                    heap.link(resolve(parent, &tags), id).unwrap();
                    tags.insert(tag, id);
                }
                TraceEvent::Link { parent, child } => {
                    heap.link(resolve(parent, &tags), tags[child.as_str()])
                        .unwrap();
                }
                TraceEvent::Unlink { parent, child } => {
                    heap.unlink(resolve(parent, &tags), tags[child.as_str()])
                        .unwrap();
                }
                TraceEvent::Tick => {}
            }
        }
        heap.verify_occupancy().unwrap();
    }
}
