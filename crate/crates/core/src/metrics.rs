//! Accuracy and group-fairness metrics under a calibrated decision threshold.
//!
//! A row is predicted positive iff its score is at or above the threshold.
//! Thresholds are calibrated globally (one threshold for all groups), and
//! fairness is the ratio of the smallest to the largest per-group rate.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Dataset;

/// Threshold that admits no row, since scores never exceed 1.
pub const REJECT_ALL: f64 = 1.0 + f64::EPSILON;

pub const DEFAULT_MIN_GROUP_SUPPORT: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("score set is empty")]
    Empty,
    #[error("score at row {row} is {value}, outside [0, 1]")]
    ScoreOutOfRange { row: usize, value: f64 },
    #[error("length mismatch: {scores} scores for {rows} rows")]
    LengthMismatch { scores: usize, rows: usize },
    #[error("invalid threshold policy: {0}")]
    BadPolicy(String),
    #[error("unattainable target: {0}")]
    Unattainable(String),
}

/// Per-row scores with the labels and groups they are judged against.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreSet {
    scores: Vec<f64>,
    labels: Vec<u8>,
    group_ids: Vec<usize>,
    group_names: Vec<String>,
}

impl ScoreSet {
    pub fn new<S: AsRef<str>>(scores: Vec<f64>, labels: Vec<u8>, groups: &[S]) -> Result<Self, MetricError> {
        if scores.len() != labels.len() || scores.len() != groups.len() {
            return Err(MetricError::LengthMismatch { scores: scores.len(), rows: labels.len() });
        }
        if scores.is_empty() {
            return Err(MetricError::Empty);
        }
        if let Some((row, &value)) = scores
            .iter()
            .enumerate()
            .find(|(_, s)| !(s.is_finite() && (0.0..=1.0).contains(*s)))
        {
            return Err(MetricError::ScoreOutOfRange { row, value });
        }
        let mut group_names: Vec<String> = groups.iter().map(|g| g.as_ref().to_string()).collect();
        group_names.sort();
        group_names.dedup();
        let group_ids = groups
            .iter()
            .map(|g| group_names.binary_search_by(|n| n.as_str().cmp(g.as_ref())).unwrap())
            .collect();
        Ok(ScoreSet { scores, labels, group_ids, group_names })
    }

    /// Scores for every row of `ds`, in row order.
    pub fn for_dataset(scores: Vec<f64>, ds: &Dataset) -> Result<Self, MetricError> {
        if scores.len() != ds.len() {
            return Err(MetricError::LengthMismatch { scores: scores.len(), rows: ds.len() });
        }
        Self::new(scores, ds.labels().to_vec(), ds.groups())
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn group_names(&self) -> &[String] {
        &self.group_names
    }

    pub fn group_of(&self, row: usize) -> &str {
        &self.group_names[self.group_ids[row]]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    GlobalFpr,
    GlobalTpr,
    TopK,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::GlobalFpr => "global-fpr",
            PolicyKind::GlobalTpr => "global-tpr",
            PolicyKind::TopK => "top-k",
        })
    }
}

/// How the decision threshold is chosen: a global FPR cap, a global TPR
/// floor, or a fixed number of positive predictions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdPolicy {
    #[serde(rename = "policy")]
    pub kind: PolicyKind,
    pub target: f64,
}

impl ThresholdPolicy {
    pub fn global_fpr(target: f64) -> Self {
        ThresholdPolicy { kind: PolicyKind::GlobalFpr, target }
    }

    pub fn global_tpr(target: f64) -> Self {
        ThresholdPolicy { kind: PolicyKind::GlobalTpr, target }
    }

    pub fn top_k(k: usize) -> Self {
        ThresholdPolicy { kind: PolicyKind::TopK, target: k as f64 }
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        match self.kind {
            PolicyKind::GlobalFpr | PolicyKind::GlobalTpr => {
                if !(self.target > 0.0 && self.target < 1.0) {
                    return Err(MetricError::BadPolicy(format!(
                        "{} target must lie in (0, 1), got {}",
                        self.kind, self.target
                    )));
                }
            }
            PolicyKind::TopK => {
                if !(self.target >= 1.0 && self.target.fract() == 0.0) {
                    return Err(MetricError::BadPolicy(format!(
                        "top-k target must be a positive integer, got {}",
                        self.target
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AccuracyMetric {
    Precision,
    Recall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FairnessMetric {
    /// Balanced true positive rates.
    EqualOpportunity,
    /// Balanced false positive rates.
    PredictiveEquality,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub accuracy: AccuracyMetric,
    pub fairness: FairnessMetric,
    #[serde(flatten)]
    pub policy: ThresholdPolicy,
    #[serde(default = "default_support")]
    pub min_group_support: usize,
}

fn default_support() -> usize {
    DEFAULT_MIN_GROUP_SUPPORT
}

impl MetricSpec {
    pub fn new(accuracy: AccuracyMetric, fairness: FairnessMetric, policy: ThresholdPolicy) -> Self {
        MetricSpec { accuracy, fairness, policy, min_group_support: DEFAULT_MIN_GROUP_SUPPORT }
    }

    pub fn with_min_group_support(mut self, support: usize) -> Self {
        self.min_group_support = support;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

impl Counts {
    fn add(&mut self, label: u8, predicted: bool) {
        match (label == 1, predicted) {
            (true, true) => self.tp += 1,
            (false, true) => self.fp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fn_ += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn tpr(&self) -> Option<f64> {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn fpr(&self) -> Option<f64> {
        ratio(self.fp, self.fp + self.tn)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupConfusion {
    pub groups: BTreeMap<String, Counts>,
    pub global: Counts,
}

impl GroupConfusion {
    /// Confusion for explicit per-row predictions.
    pub fn from_predictions(scores: &ScoreSet, predicted: &[bool]) -> Self {
        let mut per_id = vec![Counts::default(); scores.group_names.len()];
        let mut global = Counts::default();
        for (row, &p) in predicted.iter().enumerate() {
            per_id[scores.group_ids[row]].add(scores.labels[row], p);
            global.add(scores.labels[row], p);
        }
        let groups = scores.group_names.iter().cloned().zip(per_id).collect();
        GroupConfusion { groups, global }
    }
}

pub fn confusion(scores: &ScoreSet, threshold: f64) -> GroupConfusion {
    let predicted: Vec<bool> = scores.scores.iter().map(|&s| s >= threshold).collect();
    GroupConfusion::from_predictions(scores, &predicted)
}

/// Row indices ordered by descending score, earlier rows first on ties.
fn ranked(scores: &ScoreSet) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores.scores[b].total_cmp(&scores.scores[a]).then(a.cmp(&b)));
    order
}

/// Exactly `k` positive predictions: the highest scores, ties to earlier rows.
pub fn top_k_predictions(scores: &ScoreSet, k: usize) -> Vec<bool> {
    let mut predicted = vec![false; scores.len()];
    for &row in ranked(scores).iter().take(k) {
        predicted[row] = true;
    }
    predicted
}

/// Picks the decision threshold prescribed by `policy` over the observed scores.
///
/// Candidates are the distinct observed scores plus [`REJECT_ALL`].
/// `global-fpr` returns the smallest candidate whose FPR stays within the
/// target; `global-tpr` the largest candidate whose TPR reaches it; `top-k`
/// the k-th highest score.
pub fn calibrate_threshold(scores: &ScoreSet, policy: &ThresholdPolicy) -> Result<f64, MetricError> {
    policy.validate()?;
    let order = ranked(scores);
    let positives = scores.labels.iter().filter(|&&l| l == 1).count();
    let negatives = scores.len() - positives;

    if policy.kind == PolicyKind::TopK {
        let k = policy.target as usize;
        if k > scores.len() {
            return Err(MetricError::BadPolicy(format!("top-k target {k} exceeds {} rows", scores.len())));
        }
        return Ok(scores.scores[order[k - 1]]);
    }
    if policy.kind == PolicyKind::GlobalTpr && positives == 0 {
        return Err(MetricError::Unattainable("TPR target with no positive rows".into()));
    }

    // walk distinct thresholds from high to low; tp/fp only grow
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut best = match policy.kind {
        PolicyKind::GlobalFpr => Some(REJECT_ALL),
        _ => None,
    };
    let mut i = 0;
    while i < order.len() {
        let threshold = scores.scores[order[i]];
        while i < order.len() && scores.scores[order[i]] == threshold {
            if scores.labels[order[i]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        match policy.kind {
            PolicyKind::GlobalFpr => {
                let fpr = if negatives == 0 { 0.0 } else { fp as f64 / negatives as f64 };
                if fpr <= policy.target {
                    best = Some(threshold);
                } else {
                    break;
                }
            }
            PolicyKind::GlobalTpr => {
                if tp as f64 / positives as f64 >= policy.target {
                    return Ok(threshold);
                }
            }
            PolicyKind::TopK => unreachable!(),
        }
    }
    best.ok_or_else(|| MetricError::Unattainable(format!("{} target {}", policy.kind, policy.target)))
}

/// Precision or recall; 0 when the denominator is 0.
pub fn accuracy_metric(c: &GroupConfusion, which: AccuracyMetric) -> f64 {
    let g = &c.global;
    match which {
        AccuracyMetric::Precision => ratio(g.tp, g.tp + g.fp).unwrap_or(0.0),
        AccuracyMetric::Recall => ratio(g.tp, g.tp + g.fn_).unwrap_or(0.0),
    }
}

/// Ratio of the smallest to the largest per-group rate (TPR for equal
/// opportunity, FPR for predictive equality).
///
/// A group takes part only when the rate's denominator (its positives or
/// negatives) holds at least `min_group_support` rows. With fewer than two
/// participating groups, or when every participating rate is zero, the
/// result is 1.
pub fn fairness_metric(c: &GroupConfusion, which: FairnessMetric, min_group_support: usize) -> f64 {
    let rates: Vec<f64> = c
        .groups
        .values()
        .filter_map(|counts| {
            let (num, den) = match which {
                FairnessMetric::EqualOpportunity => (counts.tp, counts.tp + counts.fn_),
                FairnessMetric::PredictiveEquality => (counts.fp, counts.fp + counts.tn),
            };
            (den >= min_group_support.max(1)).then(|| num as f64 / den as f64)
        })
        .collect();
    if rates.len() < 2 {
        return 1.0;
    }
    let max = rates.iter().copied().fold(f64::MIN, f64::max);
    let min = rates.iter().copied().fold(f64::MAX, f64::min);
    if max <= 0.0 {
        1.0
    } else {
        min / max
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub fairness: f64,
    pub threshold: f64,
}

/// Calibrates on `scores` and measures both metrics on the same predictions.
///
/// Under `top-k` exactly k rows are admitted even when the k-th score is tied.
pub fn evaluate(scores: &ScoreSet, spec: &MetricSpec) -> Result<Evaluation, MetricError> {
    let threshold = calibrate_threshold(scores, &spec.policy)?;
    let c = match spec.policy.kind {
        PolicyKind::TopK => GroupConfusion::from_predictions(
            scores,
            &top_k_predictions(scores, spec.policy.target as usize),
        ),
        _ => confusion(scores, threshold),
    };
    Ok(Evaluation {
        accuracy: accuracy_metric(&c, spec.accuracy),
        fairness: fairness_metric(&c, spec.fairness, spec.min_group_support),
        threshold,
    })
}

/// Measures both metrics at a threshold calibrated elsewhere.
pub fn evaluate_at(scores: &ScoreSet, spec: &MetricSpec, threshold: f64) -> Evaluation {
    let c = confusion(scores, threshold);
    Evaluation {
        accuracy: accuracy_metric(&c, spec.accuracy),
        fairness: fairness_metric(&c, spec.fairness, spec.min_group_support),
        threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(rows: &[(f64, u8, &str)]) -> ScoreSet {
        let groups: Vec<&str> = rows.iter().map(|r| r.2).collect();
        ScoreSet::new(rows.iter().map(|r| r.0).collect(), rows.iter().map(|r| r.1).collect(), &groups).unwrap()
    }

    fn counts(tp: usize, fp: usize, tn: usize, fn_: usize) -> Counts {
        Counts { tp, fp, tn, fn_ }
    }

    fn grouped(groups: &[(&str, Counts)]) -> GroupConfusion {
        let mut global = Counts::default();
        for (_, c) in groups {
            global.tp += c.tp;
            global.fp += c.fp;
            global.tn += c.tn;
            global.fn_ += c.fn_;
        }
        GroupConfusion { groups: groups.iter().map(|(g, c)| (g.to_string(), *c)).collect(), global }
    }

    #[test]
    fn rejects_bad_score_sets() {
        assert_eq!(ScoreSet::new(vec![], vec![], &Vec::<String>::new()), Err(MetricError::Empty));
        assert!(matches!(
            ScoreSet::new(vec![1.5], vec![1], &["a"]),
            Err(MetricError::ScoreOutOfRange { row: 0, .. })
        ));
        assert!(matches!(
            ScoreSet::new(vec![f64::NAN], vec![1], &["a"]),
            Err(MetricError::ScoreOutOfRange { .. })
        ));
    }

    #[test]
    fn fpr_calibration_example() {
        let s = set(&[(0.9, 1, "a"), (0.8, 0, "a"), (0.2, 0, "b"), (0.1, 1, "b")]);
        assert_eq!(calibrate_threshold(&s, &ThresholdPolicy::global_fpr(0.5)).unwrap(), 0.8);
        // below one negative's worth the cap only admits 0.9
        assert_eq!(calibrate_threshold(&s, &ThresholdPolicy::global_fpr(0.4)).unwrap(), 0.9);
    }

    #[test]
    fn fpr_without_negatives_admits_all() {
        let s = set(&[(0.9, 1, "a"), (0.3, 1, "b"), (0.6, 1, "b")]);
        let t = calibrate_threshold(&s, &ThresholdPolicy::global_fpr(0.01)).unwrap();
        assert_eq!(t, 0.3);
        assert_eq!(confusion(&s, t).global.tp, 3);
    }

    #[test]
    fn fpr_all_negatives_above_cap_rejects_all() {
        let s = set(&[(0.5, 0, "a"), (0.5, 1, "b")]);
        assert_eq!(calibrate_threshold(&s, &ThresholdPolicy::global_fpr(0.05)).unwrap(), REJECT_ALL);
    }

    #[test]
    fn tpr_calibration() {
        let s = set(&[(0.9, 1, "a"), (0.8, 0, "a"), (0.7, 1, "b"), (0.1, 1, "b")]);
        assert_eq!(calibrate_threshold(&s, &ThresholdPolicy::global_tpr(0.5)).unwrap(), 0.7);
        assert_eq!(calibrate_threshold(&s, &ThresholdPolicy::global_tpr(0.3)).unwrap(), 0.9);
        let no_pos = set(&[(0.9, 0, "a"), (0.1, 0, "b")]);
        assert!(matches!(
            calibrate_threshold(&no_pos, &ThresholdPolicy::global_tpr(0.5)),
            Err(MetricError::Unattainable(_))
        ));
    }

    #[test]
    fn top_k_calibration() {
        let s = set(&[(0.2, 1, "a"), (0.9, 0, "a"), (0.5, 1, "b"), (0.5, 0, "b")]);
        assert_eq!(calibrate_threshold(&s, &ThresholdPolicy::top_k(4)).unwrap(), 0.2);
        assert_eq!(confusion(&s, 0.2).global.total() - confusion(&s, 0.2).global.tn - confusion(&s, 0.2).global.fn_, 4);
        assert_eq!(calibrate_threshold(&s, &ThresholdPolicy::top_k(2)).unwrap(), 0.5);
        // tie at the boundary goes to the earlier row
        assert_eq!(top_k_predictions(&s, 2), vec![false, true, true, false]);
        assert!(calibrate_threshold(&s, &ThresholdPolicy::top_k(5)).is_err());
        assert!(calibrate_threshold(&s, &ThresholdPolicy { kind: PolicyKind::TopK, target: 1.5 }).is_err());
    }

    #[test]
    fn confusion_cases() {
        let one = set(&[(0.7, 1, "a"), (0.1, 0, "b")]);
        let c = confusion(&one, 0.5);
        assert_eq!(c.global.tp, 1);
        assert_eq!(c.groups["a"].tp, 1);
        let none = confusion(&one, 0.8);
        assert_eq!((none.global.tp, none.global.fp), (0, 0));

        // hand count: threshold 0.5
        let six = set(&[
            (0.9, 1, "a"), // tp a
            (0.6, 0, "a"), // fp a
            (0.4, 1, "a"), // fn a
            (0.5, 1, "b"), // tp b
            (0.2, 0, "b"), // tn b
            (0.1, 0, "b"), // tn b
        ]);
        let c = confusion(&six, 0.5);
        assert_eq!(c.groups["a"], counts(1, 1, 0, 1));
        assert_eq!(c.groups["b"], counts(1, 0, 2, 0));
        assert_eq!(c.global, counts(2, 1, 2, 1));
    }

    #[test]
    fn accuracy_definitions() {
        let c = grouped(&[("a", counts(3, 1, 0, 0)), ("b", counts(0, 0, 1, 0))]);
        assert_eq!(accuracy_metric(&c, AccuracyMetric::Precision), 0.75);
        let empty = grouped(&[("a", counts(0, 0, 4, 2))]);
        assert_eq!(accuracy_metric(&empty, AccuracyMetric::Precision), 0.0);
        let half = grouped(&[("a", counts(5, 0, 0, 5))]);
        assert_eq!(accuracy_metric(&half, AccuracyMetric::Recall), 0.5);
    }

    #[test]
    fn fairness_ratio() {
        let c = grouped(&[("a", counts(8, 0, 0, 2)), ("b", counts(4, 0, 0, 6))]);
        assert!((fairness_metric(&c, FairnessMetric::EqualOpportunity, 1) - 0.5).abs() < 1e-12);

        let equal = grouped(&[("a", counts(6, 0, 0, 4)), ("b", counts(3, 0, 0, 2))]);
        assert!((fairness_metric(&equal, FairnessMetric::EqualOpportunity, 1) - 1.0).abs() < 1e-12);

        // FPRs 0.02, 0.05, 0.04
        let three = grouped(&[
            ("a", counts(0, 2, 98, 0)),
            ("b", counts(0, 5, 95, 0)),
            ("c", counts(0, 2, 48, 0)),
        ]);
        let f = fairness_metric(&three, FairnessMetric::PredictiveEquality, 10);
        assert!((f - 0.4).abs() < 1e-12, "{f}");
    }

    #[test]
    fn fairness_support_and_degenerate_rules() {
        // group b has too few positives to count
        let c = grouped(&[("a", counts(8, 0, 0, 2)), ("b", counts(0, 0, 0, 3))]);
        assert_eq!(fairness_metric(&c, FairnessMetric::EqualOpportunity, 10), 1.0);
        assert_eq!(fairness_metric(&c, FairnessMetric::EqualOpportunity, 3), 0.0);
        let zero = grouped(&[("a", counts(0, 0, 0, 20)), ("b", counts(0, 0, 0, 30))]);
        assert_eq!(fairness_metric(&zero, FairnessMetric::EqualOpportunity, 10), 1.0);
    }

    #[test]
    fn perfect_scorer() {
        let rows: Vec<(f64, u8, &str)> = (0..40)
            .map(|i| {
                let label = (i % 3 == 0) as u8;
                (label as f64, label, if i % 2 == 0 { "a" } else { "b" })
            })
            .collect();
        let s = set(&rows);
        let spec = MetricSpec::new(
            AccuracyMetric::Precision,
            FairnessMetric::EqualOpportunity,
            ThresholdPolicy::global_fpr(0.05),
        )
        .with_min_group_support(1);
        let e = evaluate(&s, &spec).unwrap();
        assert_eq!((e.accuracy, e.fairness), (1.0, 1.0));
    }

    #[test]
    fn constant_scorer_trace() {
        // every candidate but the sentinel has FPR 1 > 0.05, so nothing is admitted
        let rows: Vec<(f64, u8, &str)> = (0..40)
            .map(|i| (0.5, (i % 4 == 0) as u8, if i < 20 { "a" } else { "b" }))
            .collect();
        let s = set(&rows);
        let spec = MetricSpec::new(
            AccuracyMetric::Precision,
            FairnessMetric::PredictiveEquality,
            ThresholdPolicy::global_fpr(0.05),
        );
        let e = evaluate(&s, &spec).unwrap();
        assert_eq!(e.threshold, REJECT_ALL);
        assert_eq!(e.accuracy, 0.0);
        assert_eq!(e.fairness, 1.0);
    }

    /// Independent recomputation for one threshold.
    fn brute(rows: &[(f64, u8, &str)], t: f64) -> (f64, f64) {
        let mut per: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        let (mut tp, mut fp) = (0, 0);
        for &(s, y, g) in rows {
            let e = per.entry(g).or_default();
            if y == 1 {
                e.1 += 1;
                if s >= t {
                    e.0 += 1;
                    tp += 1;
                }
            } else if s >= t {
                fp += 1;
            }
        }
        let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let tprs: Vec<f64> = per.values().map(|(h, p)| *h as f64 / *p as f64).collect();
        let (lo, hi) = (tprs.iter().cloned().fold(1.0, f64::min), tprs.iter().cloned().fold(0.0, f64::max));
        (precision, if hi == 0.0 { 1.0 } else { lo / hi })
    }

    #[test]
    fn twenty_row_fixture_matches_brute_force() {
        let rows: Vec<(f64, u8, &str)> = vec![
            (0.95, 1, "a"), (0.91, 0, "b"), (0.88, 1, "b"), (0.83, 1, "a"), (0.80, 0, "a"),
            (0.74, 1, "b"), (0.71, 0, "a"), (0.66, 1, "a"), (0.61, 0, "b"), (0.58, 1, "b"),
            (0.52, 0, "a"), (0.47, 1, "a"), (0.43, 0, "b"), (0.39, 0, "a"), (0.33, 1, "b"),
            (0.28, 0, "b"), (0.21, 0, "a"), (0.17, 1, "a"), (0.12, 0, "b"), (0.05, 0, "b"),
        ];
        let s = set(&rows);
        let spec = MetricSpec::new(
            AccuracyMetric::Precision,
            FairnessMetric::EqualOpportunity,
            ThresholdPolicy::global_tpr(0.5),
        )
        .with_min_group_support(1);
        let e = evaluate(&s, &spec).unwrap();
        // brute force: largest threshold with recall >= 0.5 over all candidates
        let positives = rows.iter().filter(|r| r.1 == 1).count() as f64;
        let t = rows
            .iter()
            .map(|r| r.0)
            .filter(|&t| rows.iter().filter(|r| r.1 == 1 && r.0 >= t).count() as f64 / positives >= 0.5)
            .fold(f64::MIN, f64::max);
        assert_eq!(e.threshold, t);
        let (a, f) = brute(&rows, t);
        assert!((e.accuracy - a).abs() < 1e-12);
        assert!((e.fairness - f).abs() < 1e-12);
    }

    fn arb_scores() -> impl Strategy<Value = (Vec<f64>, Vec<u8>, Vec<String>)> {
        (1usize..60).prop_flat_map(|n| {
            (
                proptest::collection::vec((0u32..20).prop_map(|x| x as f64 / 19.0), n),
                proptest::collection::vec(0u8..2, n),
                proptest::collection::vec(prop_oneof![Just("a"), Just("b"), Just("c")].prop_map(String::from), n),
            )
        })
    }

    proptest! {
        #[test]
        fn metrics_stay_in_unit_interval((scores, labels, groups) in arb_scores(), fpr in 0.01f64..0.99) {
            let s = ScoreSet::new(scores, labels, &groups).unwrap();
            for fairness in [FairnessMetric::EqualOpportunity, FairnessMetric::PredictiveEquality] {
                let spec = MetricSpec::new(AccuracyMetric::Recall, fairness, ThresholdPolicy::global_fpr(fpr))
                    .with_min_group_support(1);
                let e = evaluate(&s, &spec).unwrap();
                prop_assert!((0.0..=1.0).contains(&e.accuracy));
                prop_assert!((0.0..=1.0).contains(&e.fairness));
            }
        }

        #[test]
        fn fairness_ignores_group_names((scores, labels, groups) in arb_scores(), t in 0.0f64..1.0) {
            let renamed: Vec<String> = groups.iter().map(|g| match g.as_str() {
                "a" => "z".to_string(), "b" => "a".to_string(), _ => "m".to_string(),
            }).collect();
            let a = confusion(&ScoreSet::new(scores.clone(), labels.clone(), &groups).unwrap(), t);
            let b = confusion(&ScoreSet::new(scores, labels, &renamed).unwrap(), t);
            for which in [FairnessMetric::EqualOpportunity, FairnessMetric::PredictiveEquality] {
                prop_assert_eq!(fairness_metric(&a, which, 1), fairness_metric(&b, which, 1));
            }
        }
    }
}
