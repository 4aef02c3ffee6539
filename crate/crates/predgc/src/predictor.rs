//! The Bayesian lifetime model: feature extraction, Laplace-smoothed
//! frequency training, posterior inference, threshold decisions, and
//! precision/recall evaluation and tuning.
//!
//! The operative model is naive Bayes — the survival label is the sole parent
//! of every feature — expressed through [`crate::bayes::DiscreteBayesNet`] so
//! the general product-form joint stays available as a verification route.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bayes::{BayesNode, DiscreteBayesNet};
use crate::heap::{Heap, HeapError, ObjectId};

/// Reserved alphabet token absorbing class names unseen at training time.
pub const OTHER_CLASS: &str = "OTHER";

/// Count features are capped at this log2 bin.
pub const MAX_COUNT_BIN: u8 = 20;

#[derive(Debug, Error)]
pub enum PredictorError {
    #[error("dataset must not be empty")]
    EmptyDataset,
    #[error("smoothing constant alpha must be positive")]
    BadAlpha,
    #[error("predictions and truths differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("scored set must not be empty")]
    EmptyScored,
    #[error("score {0} outside [0, 1]")]
    BadScore(f64),
    #[error("threshold {0} outside [0, 1]")]
    BadThreshold(f64),
    #[error("slot {slot} has no value index {value}")]
    UnknownValue { slot: usize, value: usize },
    #[error("example has {0} feature values, schema has {1} slots")]
    SchemaMismatch(usize, usize),
    #[error("inconsistent model counts: {0}")]
    InconsistentCounts(String),
    #[error("model text line {line}: {reason}")]
    ModelParse { line: usize, reason: String },
    #[error("dataset line {line}: {reason}")]
    DatasetParse { line: usize, reason: String },
    #[error(transparent)]
    Heap(#[from] HeapError),
}

/// Which survival event a model predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictionTarget {
    SurvivedEden,
    ReachedTenured,
}

impl PredictionTarget {
    pub fn token(self) -> &'static str {
        match self {
            PredictionTarget::SurvivedEden => "survived_eden",
            PredictionTarget::ReachedTenured => "reached_tenured",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        match token {
            "survived_eden" => Some(PredictionTarget::SurvivedEden),
            "reached_tenured" => Some(PredictionTarget::ReachedTenured),
            _ => None,
        }
    }
}

/// Discretized shortest-path depth from the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DepthBin {
    D0,
    D1,
    D2,
    D3,
    D4,
    D5Plus,
    Unlinked,
}

impl DepthBin {
    pub const ALL: [DepthBin; 7] = [
        DepthBin::D0,
        DepthBin::D1,
        DepthBin::D2,
        DepthBin::D3,
        DepthBin::D4,
        DepthBin::D5Plus,
        DepthBin::Unlinked,
    ];

    pub fn token(self) -> &'static str {
        match self {
            DepthBin::D0 => "0",
            DepthBin::D1 => "1",
            DepthBin::D2 => "2",
            DepthBin::D3 => "3",
            DepthBin::D4 => "4",
            DepthBin::D5Plus => "5plus",
            DepthBin::Unlinked => "unlinked",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        DepthBin::ALL.into_iter().find(|b| b.token() == token)
    }

    pub fn from_depth(depth: Option<u32>) -> Self {
        match depth {
            None => DepthBin::Unlinked,
            Some(0) => DepthBin::D0,
            Some(1) => DepthBin::D1,
            Some(2) => DepthBin::D2,
            Some(3) => DepthBin::D3,
            Some(4) => DepthBin::D4,
            Some(_) => DepthBin::D5Plus,
        }
    }

    fn index(self) -> usize {
        DepthBin::ALL.iter().position(|b| *b == self).unwrap()
    }
}

/// Log2 bin for running counters; `floor(log2(n + 1))` so zero has a bin.
pub fn count_bin(n: u64) -> u8 {
    ((n + 1).ilog2() as u8).min(MAX_COUNT_BIN)
}

/// Log2 bin for object sizes (sizes are always positive).
pub fn size_bin(size_bytes: u64) -> u8 {
    (size_bytes.ilog2() as u8).min(MAX_COUNT_BIN)
}

/// The discrete per-object evidence the lifetime models condition on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub class_name: String,
    pub hierarchy_depth_bin: DepthBin,
    pub class_instances_alive_bin: u8,
    pub class_eden_survivors_bin: u8,
    pub size_bin: u8,
}

/// Reads an object's features off the live heap: shortest-path depth from
/// ROOT, the per-class alive and eden-survivor counters, and its size bin.
pub fn extract_features(heap: &Heap, id: ObjectId) -> Result<FeatureVector, PredictorError> {
    let depth = heap.depth_from_root(id)?;
    let rec = heap.object(id)?;
    let stats = heap.class_stats(&rec.class_name);
    Ok(FeatureVector {
        class_name: rec.class_name.clone(),
        hierarchy_depth_bin: DepthBin::from_depth(depth),
        class_instances_alive_bin: count_bin(stats.alive),
        class_eden_survivors_bin: count_bin(stats.eden_survivors),
        size_bin: size_bin(rec.size_bytes),
    })
}

/// A training example: features at allocation time plus the two labels the
/// replay resolved for the object.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub features: FeatureVector,
    pub survived_eden: bool,
    pub reached_tenured: bool,
}

impl LabeledExample {
    /// Reaching the tenured space implies surviving Eden.
    pub fn new(features: FeatureVector, survived_eden: bool, reached_tenured: bool) -> Self {
        assert!(
            survived_eden || !reached_tenured,
            "reached_tenured requires survived_eden"
        );
        LabeledExample {
            features,
            survived_eden,
            reached_tenured,
        }
    }

    pub fn label(&self, target: PredictionTarget) -> bool {
        match target {
            PredictionTarget::SurvivedEden => self.survived_eden,
            PredictionTarget::ReachedTenured => self.reached_tenured,
        }
    }
}

/// One discrete feature slot: a name and its finite value alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotDef {
    pub name: String,
    pub alphabet: Vec<String>,
}

/// Ordered feature slots a counts model is fitted over.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub slots: Vec<SlotDef>,
}

impl FeatureSchema {
    /// The five-slot schema used for heap objects. The class alphabet is the
    /// given set plus the reserved [`OTHER_CLASS`] token.
    pub fn standard(class_names: &BTreeSet<String>) -> Self {
        let mut classes: Vec<String> = class_names.iter().cloned().collect();
        if !classes.iter().any(|c| c == OTHER_CLASS) {
            classes.push(OTHER_CLASS.to_string());
        }
        let bin_alphabet: Vec<String> = (0..=MAX_COUNT_BIN).map(|b| b.to_string()).collect();
        FeatureSchema {
            slots: vec![
                SlotDef {
                    name: "class_name".into(),
                    alphabet: classes,
                },
                SlotDef {
                    name: "depth_bin".into(),
                    alphabet: DepthBin::ALL
                        .iter()
                        .map(|b| b.token().to_string())
                        .collect(),
                },
                SlotDef {
                    name: "alive_bin".into(),
                    alphabet: bin_alphabet.clone(),
                },
                SlotDef {
                    name: "survivors_bin".into(),
                    alphabet: bin_alphabet.clone(),
                },
                SlotDef {
                    name: "size_bin".into(),
                    alphabet: bin_alphabet,
                },
            ],
        }
    }

    /// Encodes a feature vector against the standard schema; unseen class
    /// names fall into the OTHER bucket.
    pub fn encode(&self, fv: &FeatureVector) -> Vec<usize> {
        debug_assert_eq!(self.slots.len(), 5, "encode expects the standard schema");
        let class_slot = &self.slots[0].alphabet;
        let class_idx = class_slot
            .iter()
            .position(|c| *c == fv.class_name)
            .unwrap_or_else(|| {
                class_slot
                    .iter()
                    .position(|c| c == OTHER_CLASS)
                    .expect("standard schema carries OTHER")
            });
        vec![
            class_idx,
            fv.hierarchy_depth_bin.index(),
            fv.class_instances_alive_bin as usize,
            fv.class_eden_survivors_bin as usize,
            fv.size_bin as usize,
        ]
    }
}

/// Smoothed frequency tables realizing the Bayesian survival model:
/// per-label example counts plus per (slot, value, label) counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsModel {
    pub target: PredictionTarget,
    pub alpha: f64,
    pub schema: FeatureSchema,
    /// Indexed by label as usize: `[negatives, positives]`.
    label_counts: [u64; 2],
    /// `counts[slot][value][label]`.
    counts: Vec<Vec<[u64; 2]>>,
}

impl CountsModel {
    /// Tallies exact counts over encoded rows.
    pub fn fit(
        schema: FeatureSchema,
        rows: &[(Vec<usize>, bool)],
        target: PredictionTarget,
        alpha: f64,
    ) -> Result<Self, PredictorError> {
        if rows.is_empty() {
            return Err(PredictorError::EmptyDataset);
        }
        if alpha.is_nan() || alpha <= 0.0 {
            return Err(PredictorError::BadAlpha);
        }
        let mut counts: Vec<Vec<[u64; 2]>> = schema
            .slots
            .iter()
            .map(|s| vec![[0, 0]; s.alphabet.len()])
            .collect();
        let mut label_counts = [0u64; 2];
        for (values, label) in rows {
            if values.len() != schema.slots.len() {
                return Err(PredictorError::SchemaMismatch(
                    values.len(),
                    schema.slots.len(),
                ));
            }
            label_counts[*label as usize] += 1;
            for (slot, &value) in values.iter().enumerate() {
                if value >= schema.slots[slot].alphabet.len() {
                    return Err(PredictorError::UnknownValue { slot, value });
                }
                counts[slot][value][*label as usize] += 1;
            }
        }
        Ok(CountsModel {
            target,
            alpha,
            schema,
            label_counts,
            counts,
        })
    }

    /// Fits the standard five-slot schema from labeled heap examples,
    /// deriving the class alphabet from the dataset.
    pub fn fit_examples(
        dataset: &[LabeledExample],
        target: PredictionTarget,
        alpha: f64,
    ) -> Result<Self, PredictorError> {
        if dataset.is_empty() {
            return Err(PredictorError::EmptyDataset);
        }
        let classes: BTreeSet<String> = dataset
            .iter()
            .map(|ex| ex.features.class_name.clone())
            .collect();
        let schema = FeatureSchema::standard(&classes);
        let rows: Vec<(Vec<usize>, bool)> = dataset
            .iter()
            .map(|ex| (schema.encode(&ex.features), ex.label(target)))
            .collect();
        CountsModel::fit(schema, &rows, target, alpha)
    }

    pub fn example_count(&self) -> u64 {
        self.label_counts[0] + self.label_counts[1]
    }

    pub fn label_count(&self, label: bool) -> u64 {
        self.label_counts[label as usize]
    }

    /// Smoothed prior `P(Y = label)`.
    pub fn prior(&self, label: bool) -> f64 {
        (self.label_counts[label as usize] as f64 + self.alpha)
            / (self.example_count() as f64 + self.alpha * 2.0)
    }

    /// Smoothed conditional `P(slot = value | Y = label)`.
    pub fn conditional(&self, slot: usize, value: usize, label: bool) -> f64 {
        let alphabet = self.schema.slots[slot].alphabet.len() as f64;
        (self.counts[slot][value][label as usize] as f64 + self.alpha)
            / (self.label_counts[label as usize] as f64 + self.alpha * alphabet)
    }

    /// Posterior probability of the positive label given encoded evidence:
    /// the prior-times-conditionals product, normalized by the same product
    /// summed over both labels.
    pub fn posterior_encoded(&self, values: &[usize]) -> Result<f64, PredictorError> {
        if values.len() != self.schema.slots.len() {
            return Err(PredictorError::SchemaMismatch(
                values.len(),
                self.schema.slots.len(),
            ));
        }
        let mut weight = [self.prior(false), self.prior(true)];
        for (slot, &value) in values.iter().enumerate() {
            if value >= self.schema.slots[slot].alphabet.len() {
                return Err(PredictorError::UnknownValue { slot, value });
            }
            weight[0] *= self.conditional(slot, value, false);
            weight[1] *= self.conditional(slot, value, true);
        }
        Ok(weight[1] / (weight[0] + weight[1]))
    }

    /// Posterior for a heap feature vector under the standard schema.
    pub fn posterior(&self, fv: &FeatureVector) -> f64 {
        self.posterior_encoded(&self.schema.encode(fv))
            .expect("standard encoding is always in range")
    }

    /// Checks the internal consistency invariant: for every slot and label,
    /// the per-value counts sum to that label's example count.
    pub fn validate(&self) -> Result<(), PredictorError> {
        if self.alpha.is_nan() || self.alpha <= 0.0 {
            return Err(PredictorError::BadAlpha);
        }
        for (slot, values) in self.counts.iter().enumerate() {
            for label in 0..2 {
                let sum: u64 = values.iter().map(|v| v[label]).sum();
                if sum != self.label_counts[label] {
                    return Err(PredictorError::InconsistentCounts(format!(
                        "slot {slot} label {label}: value counts sum to {sum}, label count is {}",
                        self.label_counts[label]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Serializes the model as sectioned text with exact integer counts.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("[meta]\n");
        writeln!(out, "target = {}", self.target.token()).unwrap();
        writeln!(out, "alpha = {}", self.alpha).unwrap();
        out.push_str("[labels]\n");
        writeln!(out, "negative = {}", self.label_counts[0]).unwrap();
        writeln!(out, "positive = {}", self.label_counts[1]).unwrap();
        for (slot, def) in self.schema.slots.iter().enumerate() {
            writeln!(out, "[feature {}]", def.name).unwrap();
            for (value, token) in def.alphabet.iter().enumerate() {
                let c = self.counts[slot][value];
                writeln!(out, "{token}\t{}\t{}", c[0], c[1]).unwrap();
            }
        }
        out
    }

    /// Parses the sectioned text form back into a model.
    pub fn parse(text: &str) -> Result<Self, PredictorError> {
        enum Section {
            None,
            Meta,
            Labels,
            Feature(usize),
        }
        let mut target = None;
        let mut alpha = None;
        let mut label_counts = [0u64; 2];
        let mut slots: Vec<SlotDef> = Vec::new();
        let mut counts: Vec<Vec<[u64; 2]>> = Vec::new();
        let mut section = Section::None;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            let err = |reason: String| PredictorError::ModelParse {
                line: line_no,
                reason,
            };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(header) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                section = match header {
                    "meta" => Section::Meta,
                    "labels" => Section::Labels,
                    _ => {
                        let name = header
                            .strip_prefix("feature ")
                            .ok_or_else(|| err(format!("unknown section `{header}`")))?;
                        slots.push(SlotDef {
                            name: name.to_string(),
                            alphabet: Vec::new(),
                        });
                        counts.push(Vec::new());
                        Section::Feature(slots.len() - 1)
                    }
                };
                continue;
            }
            match section {
                Section::None => return Err(err("content before any section".into())),
                Section::Meta => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| err("expected `key = value`".into()))?;
                    match key.trim() {
                        "target" => {
                            target =
                                Some(PredictionTarget::parse(value.trim()).ok_or_else(|| {
                                    err(format!("unknown target `{}`", value.trim()))
                                })?)
                        }
                        "alpha" => {
                            alpha = Some(
                                value
                                    .trim()
                                    .parse::<f64>()
                                    .map_err(|_| err(format!("bad alpha `{}`", value.trim())))?,
                            )
                        }
                        other => return Err(err(format!("unknown meta key `{other}`"))),
                    }
                }
                Section::Labels => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| err("expected `key = value`".into()))?;
                    let n = value
                        .trim()
                        .parse::<u64>()
                        .map_err(|_| err(format!("bad count `{}`", value.trim())))?;
                    match key.trim() {
                        "negative" => label_counts[0] = n,
                        "positive" => label_counts[1] = n,
                        other => return Err(err(format!("unknown label `{other}`"))),
                    }
                }
                Section::Feature(slot) => {
                    let mut fields = line.split('\t');
                    let token = fields.next().unwrap();
                    let neg = fields
                        .next()
                        .and_then(|f| f.parse::<u64>().ok())
                        .ok_or_else(|| err("expected `value<TAB>neg<TAB>pos`".into()))?;
                    let pos = fields
                        .next()
                        .and_then(|f| f.parse::<u64>().ok())
                        .ok_or_else(|| err("expected `value<TAB>neg<TAB>pos`".into()))?;
                    slots[slot].alphabet.push(token.to_string());
                    counts[slot].push([neg, pos]);
                }
            }
        }

        let model = CountsModel {
            target: target.ok_or(PredictorError::ModelParse {
                line: 0,
                reason: "missing target".into(),
            })?,
            alpha: alpha.ok_or(PredictorError::ModelParse {
                line: 0,
                reason: "missing alpha".into(),
            })?,
            schema: FeatureSchema { slots },
            label_counts,
            counts,
        };
        model.validate()?;
        Ok(model)
    }
}

/// Builds the naive-Bayes instantiation of the model as a general net: the
/// label node is the sole parent of every feature node, with smoothed
/// estimates as CPT entries.
pub fn naive_bayes_net(model: &CountsModel) -> DiscreteBayesNet {
    let mut nodes = vec![BayesNode {
        name: "label".into(),
        alphabet: vec!["false".into(), "true".into()],
        parents: vec![],
        cpt: vec![vec![model.prior(false), model.prior(true)]],
    }];
    for (slot, def) in model.schema.slots.iter().enumerate() {
        let rows = vec![
            (0..def.alphabet.len())
                .map(|v| model.conditional(slot, v, false))
                .collect::<Vec<f64>>(),
            (0..def.alphabet.len())
                .map(|v| model.conditional(slot, v, true))
                .collect::<Vec<f64>>(),
        ];
        nodes.push(BayesNode {
            name: def.name.clone(),
            alphabet: def.alphabet.clone(),
            parents: vec![0],
            cpt: rows,
        });
    }
    DiscreteBayesNet::new(nodes).expect("smoothed tables always form valid CPTs")
}

/// The survival threshold. Posteriors strictly above it predict survival.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionPolicy {
    threshold: f64,
}

impl DecisionPolicy {
    pub fn new(threshold: f64) -> Result<Self, PredictorError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(PredictorError::BadThreshold(threshold));
        }
        Ok(DecisionPolicy { threshold })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    PredictSurvive,
    PredictDie,
}

/// Strictly-above rule: a posterior equal to the threshold predicts death,
/// the conservative direction for a no-false-positive tuning goal.
pub fn decide(p: f64, policy: DecisionPolicy) -> Decision {
    if p > policy.threshold {
        Decision::PredictSurvive
    } else {
        Decision::PredictDie
    }
}

/// Confusion counts with survive as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionRecall {
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl PrecisionRecall {
    /// `TP / (TP + FP)`, or `None` when nothing was predicted positive.
    pub fn precision(&self) -> Option<f64> {
        let denom = self.true_positives + self.false_positives;
        (denom > 0).then(|| self.true_positives as f64 / denom as f64)
    }

    /// `TP / (TP + FN)`, or `None` when there are no actual positives.
    pub fn recall(&self) -> Option<f64> {
        let denom = self.true_positives + self.false_negatives;
        (denom > 0).then(|| self.true_positives as f64 / denom as f64)
    }
}

/// Exact confusion-matrix arithmetic over aligned sequences.
pub fn evaluate(
    predictions: &[Decision],
    truths: &[bool],
) -> Result<PrecisionRecall, PredictorError> {
    if predictions.len() != truths.len() {
        return Err(PredictorError::LengthMismatch(
            predictions.len(),
            truths.len(),
        ));
    }
    let mut pr = PrecisionRecall::default();
    for (&pred, &truth) in predictions.iter().zip(truths) {
        match (pred, truth) {
            (Decision::PredictSurvive, true) => pr.true_positives += 1,
            (Decision::PredictSurvive, false) => pr.false_positives += 1,
            (Decision::PredictDie, true) => pr.false_negatives += 1,
            (Decision::PredictDie, false) => pr.true_negatives += 1,
        }
    }
    Ok(pr)
}

/// Evaluates a scored set at a fixed threshold.
pub fn evaluate_at(scored: &[(f64, bool)], policy: DecisionPolicy) -> PrecisionRecall {
    let mut pr = PrecisionRecall::default();
    for &(score, truth) in scored {
        match (decide(score, policy), truth) {
            (Decision::PredictSurvive, true) => pr.true_positives += 1,
            (Decision::PredictSurvive, false) => pr.false_positives += 1,
            (Decision::PredictDie, true) => pr.false_negatives += 1,
            (Decision::PredictDie, false) => pr.true_negatives += 1,
        }
    }
    pr
}

/// Returns the smallest threshold from `{0} ∪ {observed scores}` whose
/// evaluation reaches the target precision (an empty predicted-positive set
/// counts as reaching it). Smallest-first maximizes recall subject to the
/// precision constraint; such a threshold always exists because the largest
/// observed score predicts nothing positive under the strict rule.
pub fn tune_threshold(
    scored: &[(f64, bool)],
    target_precision: f64,
) -> Result<DecisionPolicy, PredictorError> {
    if scored.is_empty() {
        return Err(PredictorError::EmptyScored);
    }
    for &(score, _) in scored {
        if !(0.0..=1.0).contains(&score) {
            return Err(PredictorError::BadScore(score));
        }
    }

    // Ascending unique scores; each is a candidate threshold, plus zero.
    let mut points: Vec<(f64, bool)> = scored.to_vec();
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("scores validated finite"));
    let mut candidates: Vec<f64> = Vec::with_capacity(points.len() + 1);
    candidates.push(0.0);
    for &(score, _) in &points {
        if *candidates.last().unwrap() != score {
            candidates.push(score);
        }
    }

    let total_tp = points.iter().filter(|&&(_, t)| t).count() as u64;
    let total_fp = points.len() as u64 - total_tp;

    // Sweep candidates in ascending order, dropping points once their score
    // falls at or below the candidate (strict > rule).
    let mut dropped = 0usize;
    let mut dropped_tp = 0u64;
    for &threshold in &candidates {
        while dropped < points.len() && points[dropped].0 <= threshold {
            if points[dropped].1 {
                dropped_tp += 1;
            }
            dropped += 1;
        }
        let tp = total_tp - dropped_tp;
        let fp = total_fp - (dropped as u64 - dropped_tp);
        let predicted = tp + fp;
        if predicted == 0 || tp as f64 / predicted as f64 >= target_precision {
            return Ok(DecisionPolicy { threshold });
        }
    }
    // The largest score always yields an empty positive set.
    unreachable!("the largest candidate threshold predicts nothing positive")
}

/// Renders labeled examples as the dataset CSV.
pub fn dataset_to_csv(dataset: &[LabeledExample]) -> String {
    let mut out = String::from(
        "class_name,depth_bin,alive_bin,survivors_bin,size_bin,survived_eden,reached_tenured\n",
    );
    for ex in dataset {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            ex.features.class_name,
            ex.features.hierarchy_depth_bin.token(),
            ex.features.class_instances_alive_bin,
            ex.features.class_eden_survivors_bin,
            ex.features.size_bin,
            ex.survived_eden,
            ex.reached_tenured,
        )
        .expect("string write");
    }
    out
}

/// Parses the dataset CSV (header required).
pub fn dataset_from_csv(text: &str) -> Result<Vec<LabeledExample>, PredictorError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        let err = |reason: String| PredictorError::DatasetParse {
            line: line_no,
            reason,
        };
        if line.is_empty() || (line_no == 1 && line.starts_with("class_name,")) {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(err(format!("expected 7 fields, found {}", fields.len())));
        }
        let depth = DepthBin::parse(fields[1])
            .ok_or_else(|| err(format!("bad depth bin `{}`", fields[1])))?;
        let parse_bin = |f: &str| f.parse::<u8>().map_err(|_| err(format!("bad bin `{f}`")));
        let parse_bool = |f: &str| match f {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(err(format!("bad boolean `{other}`"))),
        };
        let survived_eden = parse_bool(fields[5])?;
        let reached_tenured = parse_bool(fields[6])?;
        if reached_tenured && !survived_eden {
            return Err(err("reached_tenured requires survived_eden".into()));
        }
        out.push(LabeledExample {
            features: FeatureVector {
                class_name: fields[0].to_string(),
                hierarchy_depth_bin: depth,
                class_instances_alive_bin: parse_bin(fields[2])?,
                class_eden_survivors_bin: parse_bin(fields[3])?,
                size_bin: parse_bin(fields[4])?,
            },
            survived_eden,
            reached_tenured,
        });
    }
    Ok(out)
}

/// Scores every example under the model, pairing the posterior with the
/// example's truth for the model's own target.
pub fn score_dataset(model: &CountsModel, dataset: &[LabeledExample]) -> Vec<(f64, bool)> {
    dataset
        .iter()
        .map(|ex| (model.posterior(&ex.features), ex.label(model.target)))
        .collect()
}

/// Scored-set CSV: `score,truth` rows.
pub fn scored_to_csv(scored: &[(f64, bool)]) -> String {
    let mut out = String::from("score,truth\n");
    for &(score, truth) in scored {
        writeln!(out, "{score},{truth}").expect("string write");
    }
    out
}

/// Parses the scored-set CSV (header optional).
pub fn scored_from_csv(text: &str) -> Result<Vec<(f64, bool)>, PredictorError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with("score,") {
            continue;
        }
        let err = |reason: String| PredictorError::DatasetParse {
            line: line_no,
            reason,
        };
        let (score_tok, truth_tok) = line
            .split_once(',')
            .ok_or_else(|| err("expected `score,truth`".into()))?;
        let score = score_tok
            .trim()
            .parse::<f64>()
            .map_err(|_| err(format!("bad score `{score_tok}`")))?;
        let truth = match truth_tok.trim() {
            "true" => true,
            "false" => false,
            other => return Err(err(format!("bad truth `{other}`"))),
        };
        out.push((score, truth));
    }
    Ok(out)
}
