//! Property suites for the simulator's cross-cutting invariants: occupancy
//! conservation, reclaim safety, marking monotonicity, generator determinism
//! and replay validity, diff antisymmetry, posterior normalization, smoothing
//! bounds, threshold monotonicity, and registry ordering.

use std::collections::BTreeMap;

use proptest::prelude::*;

use predgc::baseline::{minor_gc, CostModel};
use predgc::experiment::{replay_baseline, ReplayOptions};
use predgc::heap::{Heap, HeapConfig, HeapError, Node, ObjectId, Space};
use predgc::histogram::{histo_diff, Histogram};
use predgc::predictor::{
    decide, evaluate_at, naive_bayes_net, tune_threshold, CountsModel, Decision, DecisionPolicy,
    FeatureSchema, PredictionTarget, SlotDef,
};
use predgc::runtime::{DualRootRegistry, LifetimeClass};
use predgc::trace::{generate_synthetic, WorkloadConfig};

#[derive(Debug, Clone)]
enum HeapOp {
    Alloc { class: u8, size: u64 },
    LinkFromRoot { target: usize },
    LinkPair { from: usize, to: usize },
    UnlinkFromRoot { target: usize },
    TryReclaim { target: usize },
    Promote { target: usize, to_survivor: bool },
}

fn heap_op() -> impl Strategy<Value = HeapOp> {
    prop_oneof![
        3 => (0u8..4, 1u64..128).prop_map(|(class, size)| HeapOp::Alloc { class, size }),
        3 => any::<proptest::sample::Index>().prop_map(|i| HeapOp::LinkFromRoot { target: i.index(64) }),
        2 => (any::<proptest::sample::Index>(), any::<proptest::sample::Index>())
            .prop_map(|(a, b)| HeapOp::LinkPair { from: a.index(64), to: b.index(64) }),
        2 => any::<proptest::sample::Index>().prop_map(|i| HeapOp::UnlinkFromRoot { target: i.index(64) }),
        2 => any::<proptest::sample::Index>().prop_map(|i| HeapOp::TryReclaim { target: i.index(64) }),
        1 => (any::<proptest::sample::Index>(), any::<bool>())
            .prop_map(|(i, s)| HeapOp::Promote { target: i.index(64), to_survivor: s }),
    ]
}

proptest! {
    /// Occupancy counters always equal the sum of live object sizes, reclaim
    /// is only ever accepted for unreachable objects, and the marking oracle
    /// is pure.
    #[test]
    fn heap_ops_preserve_invariants(ops in proptest::collection::vec(heap_op(), 1..120)) {
        let mut heap = Heap::new();
        let mut ids: Vec<ObjectId> = Vec::new();
        for op in ops {
            match op {
                HeapOp::Alloc { class, size } => {
                    let id = heap.allocate(&format!("klass.C{class}"), size).unwrap();
                    ids.push(id);
                }
                HeapOp::LinkFromRoot { target } => {
                    if let Some(&id) = ids.get(target % ids.len().max(1)) {
                        if heap.is_alive(id) {
                            heap.link(Node::Root, id).unwrap();
                        }
                    }
                }
                HeapOp::LinkPair { from, to } => {
                    if ids.len() >= 2 {
                        let a = ids[from % ids.len()];
                        let b = ids[to % ids.len()];
                        if heap.is_alive(a) && heap.is_alive(b) {
                            heap.link(Node::Object(a), b).unwrap();
                        }
                    }
                }
                HeapOp::UnlinkFromRoot { target } => {
                    if let Some(&id) = ids.get(target % ids.len().max(1)) {
                        if heap.edge_count(Node::Root, id) > 0 {
                            heap.unlink(Node::Root, id).unwrap();
                        }
                    }
                }
                HeapOp::TryReclaim { target } => {
                    if let Some(&id) = ids.get(target % ids.len().max(1)) {
                        if heap.is_alive(id) {
                            let reachable_before = heap.mark_reachable();
                            match heap.reclaim(id) {
                                Ok(()) => prop_assert!(
                                    !reachable_before.contains(&id),
                                    "reclaim accepted a reachable object"
                                ),
                                Err(HeapError::ReclaimReachable(_)) => prop_assert!(
                                    reachable_before.contains(&id),
                                    "reclaim refused an unreachable object"
                                ),
                                Err(other) => return Err(TestCaseError::fail(format!("{other}"))),
                            }
                        }
                    }
                }
                HeapOp::Promote { target, to_survivor } => {
                    if let Some(&id) = ids.get(target % ids.len().max(1)) {
                        if heap.is_alive(id) {
                            let dest = if to_survivor { Space::Survivor0 } else { Space::Tenured };
                            let _ = heap.promote(id, dest); // illegal transitions refused
                        }
                    }
                }
            }
            heap.verify_occupancy().map_err(TestCaseError::fail)?;
        }
        // The oracle is pure: two calls agree.
        prop_assert_eq!(heap.mark_reachable(), heap.mark_reachable());
    }

    /// Adding an edge never shrinks the reachable set; removing the same edge
    /// restores it exactly.
    #[test]
    fn marking_is_monotone(n in 2usize..30, edges in proptest::collection::vec((0usize..30, 0usize..30), 0..60), pick in any::<proptest::sample::Index>()) {
        let mut heap = Heap::new();
        let ids: Vec<ObjectId> =
            (0..n).map(|i| heap.allocate(&format!("K{}", i % 3), 8).unwrap()).collect();
        heap.link(Node::Root, ids[0]).unwrap();
        for (a, b) in edges {
            heap.link(Node::Object(ids[a % n]), ids[b % n]).unwrap();
        }
        let before = heap.mark_reachable();

        let target = ids[pick.index(n)];
        heap.link(Node::Root, target).unwrap();
        let after_add = heap.mark_reachable();
        prop_assert!(after_add.is_superset(&before), "adding an edge shrank the marking");

        heap.unlink(Node::Root, target).unwrap();
        prop_assert_eq!(heap.mark_reachable(), before);
    }

    /// Diffing two snapshots is antisymmetric per class.
    #[test]
    fn histo_diff_is_antisymmetric(
        rows_a in proptest::collection::btree_map("[a-e]", (1u64..1000, 1u64..100_000), 0..5),
        rows_b in proptest::collection::btree_map("[a-e]", (1u64..1000, 1u64..100_000), 0..5),
    ) {
        let render = |rows: &BTreeMap<String, (u64, u64)>| {
            let mut text = String::new();
            for (i, (name, (inst, bytes))) in rows.iter().enumerate() {
                text.push_str(&format!("{}: {} {} {}\n", i + 1, inst, bytes, name));
            }
            Histogram::parse(&text).unwrap()
        };
        let a = render(&rows_a);
        let b = render(&rows_b);
        let ab = histo_diff(&a, &b);
        let ba = histo_diff(&b, &a);
        prop_assert_eq!(ab.len(), ba.len());
        for (x, y) in ab.iter().zip(&ba) {
            prop_assert_eq!(&x.class_name, &y.class_name);
            prop_assert_eq!(x.delta_instances, -y.delta_instances);
            prop_assert_eq!(x.delta_bytes, -y.delta_bytes);
        }
    }

    /// Smoothed estimates stay strictly inside (0, 1), naive-net CPT rows are
    /// valid distributions, and the two posterior routes normalize.
    #[test]
    fn posterior_normalization_and_smoothing_bounds(
        rows in proptest::collection::vec((0usize..3, 0usize..2, any::<bool>()), 1..60),
        alpha in prop_oneof![Just(0.5f64), Just(1.0), Just(2.0)],
        q0 in 0usize..3,
        q1 in 0usize..2,
    ) {
        let schema = FeatureSchema {
            slots: vec![
                SlotDef { name: "f0".into(), alphabet: vec!["a".into(), "b".into(), "c".into()] },
                SlotDef { name: "f1".into(), alphabet: vec!["x".into(), "y".into()] },
            ],
        };
        let encoded: Vec<(Vec<usize>, bool)> =
            rows.iter().map(|&(v0, v1, label)| (vec![v0, v1], label)).collect();
        let model =
            CountsModel::fit(schema, &encoded, PredictionTarget::SurvivedEden, alpha).unwrap();
        model.validate().unwrap();

        for label in [false, true] {
            let p = model.prior(label);
            prop_assert!(p > 0.0 && p < 1.0);
            for (slot, size) in [(0usize, 3usize), (1, 2)] {
                for v in 0..size {
                    let c = model.conditional(slot, v, label);
                    prop_assert!(c > 0.0 && c < 1.0, "conditional {c} not in (0,1)");
                }
            }
        }

        // Constructing the net revalidates every CPT row sums to 1.
        let net = naive_bayes_net(&model);
        let p = model.posterior_encoded(&[q0, q1]).unwrap();
        let dist = net.posterior_by_enumeration(&[(1, q0), (2, q1)], 0).unwrap();
        prop_assert!((dist[0] + dist[1] - 1.0).abs() <= 1e-12);
        prop_assert!((p + dist[0]) - 1.0 <= 1e-12 && (p - dist[1]).abs() <= 1e-12);
    }

    /// Raising the threshold never predicts more survivors and never raises
    /// recall; tuning always satisfies its target or predicts nothing.
    #[test]
    fn threshold_sweep_is_monotone(
        scored in proptest::collection::vec((0.0f64..=1.0, any::<bool>()), 1..80),
        target in 0.5f64..=1.0,
    ) {
        let mut thresholds: Vec<f64> = scored.iter().map(|&(s, _)| s).collect();
        thresholds.push(0.0);
        thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut last_pos = u64::MAX;
        let mut last_recall = f64::INFINITY;
        for &t in &thresholds {
            let policy = DecisionPolicy::new(t).unwrap();
            let pos = scored
                .iter()
                .filter(|&&(s, _)| decide(s, policy) == Decision::PredictSurvive)
                .count() as u64;
            prop_assert!(pos <= last_pos);
            last_pos = pos;
            let recall = evaluate_at(&scored, policy).recall().unwrap_or(0.0);
            prop_assert!(recall <= last_recall + 1e-15);
            last_recall = recall;
        }

        let policy = tune_threshold(&scored, target).unwrap();
        let pr = evaluate_at(&scored, policy);
        let predicted = pr.true_positives + pr.false_positives;
        prop_assert!(
            predicted == 0 || pr.precision().unwrap() >= target,
            "tuned policy missed its target"
        );
    }

    /// The OP partition never holds a mid-lived entry ahead of a long-lived
    /// one, whatever mix of inserts, demotions and re-bandings happened.
    #[test]
    fn registry_keeps_long_before_mid(
        ops in proptest::collection::vec((0u8..4, 0u64..40), 1..80),
    ) {
        let mut reg = DualRootRegistry::new();
        let mut next = 1u64;
        for (kind, pick) in ops {
            match kind {
                0 => {
                    let class = match pick % 3 {
                        0 => LifetimeClass::DieInEden,
                        1 => LifetimeClass::MidLived,
                        _ => LifetimeClass::LongLived,
                    };
                    reg.insert(ObjectId(next), class);
                    next += 1;
                }
                1 => {
                    if let Some((id, _)) = reg.op_entries().get((pick as usize) % reg.op_len().max(1)).copied() {
                        reg.demote_many(&std::iter::once(id).collect());
                    }
                }
                2 => {
                    if let Some((id, _)) = reg.op_entries().get((pick as usize) % reg.op_len().max(1)).copied() {
                        let class = if pick % 2 == 0 {
                            LifetimeClass::MidLived
                        } else {
                            LifetimeClass::LongLived
                        };
                        reg.set_op_class(id, class);
                    }
                }
                _ => {
                    if let Some((id, _)) = reg.op_entries().first().copied() {
                        reg.remove_many(&std::iter::once(id).collect());
                    }
                }
            }
            let mut seen_mid = false;
            for (_, class) in reg.op_entries() {
                match class {
                    LifetimeClass::MidLived => seen_mid = true,
                    LifetimeClass::LongLived => {
                        prop_assert!(!seen_mid, "long-lived entry after a mid-lived one")
                    }
                    LifetimeClass::DieInEden => {
                        return Err(TestCaseError::fail("die-in-eden entry in OP partition"))
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Same config, byte-identical trace; and every generated trace replays
    /// against the heap without a malformed-trace error.
    #[test]
    fn generator_is_deterministic_and_replayable(
        flows in 1usize..=3,
        per_flow in 20usize..=120,
        seed in any::<u64>(),
        mortality in 0.75f64..0.95,
        mid_share in 0.2f64..0.8,
    ) {
        let mut config = WorkloadConfig::with_defaults(flows, per_flow, seed);
        config.eden_mortality = mortality;
        config.mid_lived_fraction = (1.0 - mortality) * mid_share;
        config.long_lived_fraction = 1.0 - config.eden_mortality - config.mid_lived_fraction;
        config.assumed_eden_capacity = 4096;

        let trace = generate_synthetic(&config).unwrap();
        let again = generate_synthetic(&config).unwrap();
        prop_assert_eq!(trace.to_text(), again.to_text());

        let heap_config = HeapConfig {
            eden_capacity_bytes: 4096,
            survivor_capacity_bytes: 1024,
            tenured_capacity_bytes: 32768,
            tenuring_age_threshold: 2,
            major_gc_occupancy_fraction: 0.8,
        };
        let outcome = replay_baseline(
            &trace,
            &heap_config,
            &CostModel::default(),
            ReplayOptions { final_pass: true, collect_features: false },
        );
        prop_assert!(outcome.is_ok(), "generated trace failed to replay: {:?}", outcome.err());
        for cycle in outcome.unwrap().cycles {
            prop_assert_eq!(
                cycle.gc.objects_swept,
                cycle.gc.objects_reclaimed + cycle.gc.live_objects_handled
            );
        }
    }

    /// Ages only ever grow, and equal the number of minor GCs survived.
    #[test]
    fn age_counts_survived_collections(keep in proptest::collection::vec(any::<bool>(), 4..24)) {
        let mut heap = Heap::new();
        let config = HeapConfig::default();
        let cost = CostModel::default();
        let ids: Vec<ObjectId> = keep
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let id = heap.allocate(&format!("K{}", i % 2), 16).unwrap();
                heap.link(Node::Root, id).unwrap();
                id
            })
            .collect();
        for (i, &k) in keep.iter().enumerate() {
            if !k {
                heap.unlink(Node::Root, ids[i]).unwrap();
            }
        }
        let rounds = 3u32;
        for _ in 0..rounds {
            minor_gc(&mut heap, &config, &cost).unwrap();
        }
        for (i, &k) in keep.iter().enumerate() {
            if k {
                let rec = heap.object(ids[i]).unwrap();
                let expected = rounds.min(config.tenuring_age_threshold.max(rounds));
                prop_assert_eq!(rec.age, expected, "survivor age mismatch");
            } else {
                prop_assert!(!heap.is_alive(ids[i]));
            }
        }
    }
}
