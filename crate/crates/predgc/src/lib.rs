//! Desk-scale simulator of a prediction-driven generational garbage collector.
//!
//! The crate models a generational heap (eden, paired survivor spaces, tenured)
//! driven by replayable allocation traces, and runs two collectors over it side
//! by side:
//!
//! * a traditional stop-the-world generational collector ([`baseline`]), and
//! * a predictive collector ([`runtime`]) that classifies every new object with
//!   a Bayesian lifetime model ([`predictor`]), keeps a dual-root registry of
//!   likely-dead vs. likely-live objects, and lets a concurrent Object Promoter
//!   pre-promote expected survivors off the stop-the-world path.
//!
//! [`experiment`] replays one trace under both collectors (plus a ground-truth
//! oracle arm) and reports pause-cost totals, so the claimed reduction in
//! live-object handling can be measured and its safety properties checked.

pub mod baseline;
pub mod bayes;
pub mod experiment;
pub mod heap;
pub mod histogram;
pub mod predictor;
pub mod runtime;
pub mod trace;

pub use heap::{Heap, HeapConfig, Node, ObjectId, Space};
pub use histogram::Histogram;
pub use trace::{Trace, TraceEvent, WorkloadConfig};
