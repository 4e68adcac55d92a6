//! Closed-form accuracy/fairness surface for exercising the scheduler.
//!
//! For hyperparameters `u1, u2 ∈ [0, 1]` and budget `b ∈ (0, R]`:
//!
//! ```text
//! a(u, b) = (1 − exp(−3b/R)) · (1 − |u1 − 0.7|)
//! f(u)    = 1 − |u2 − 0.3|
//! ```
//!
//! The scorer ignores its training rows. On rows of the
//! [`surface_fixture`](crate::data::synthetic::surface_fixture) it emits
//! scores such that recall equals `a` and the ratio of per-group false
//! positive rates equals `f` whenever the decision threshold falls inside the
//! negative band `(0.2, 0.8)`, which is where a global-FPR policy with a
//! target below one half puts it.

use crate::data::synthetic::{SIGNAL_COLUMN, SLOT_COLUMN};
use crate::data::Dataset;
use crate::space::Configuration;

use super::{LearnerError, Scorer, TrainInput};

pub const U1: &str = "u1";
pub const U2: &str = "u2";

pub fn accuracy_proxy(u1: f64, budget: f64, max_budget: f64) -> f64 {
    (1.0 - (-3.0 * budget / max_budget).exp()) * (1.0 - (u1 - 0.7).abs())
}

pub fn fairness_proxy(u2: f64) -> f64 {
    1.0 - (u2 - 0.3).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceScorer {
    pub accuracy: f64,
    pub fairness: f64,
}

fn unit_value(config: &Configuration, name: &str) -> Result<f64, LearnerError> {
    config
        .get_f64(name)
        .filter(|u| (0.0..=1.0).contains(u))
        .ok_or_else(|| LearnerError::Hyperparameter {
            name: name.to_string(),
            reason: "synthetic surface needs a value in [0, 1]".into(),
        })
}

impl SurfaceScorer {
    pub fn new(config: &Configuration, input: TrainInput<'_>) -> Result<Self, LearnerError> {
        let u1 = unit_value(config, U1)?;
        let u2 = unit_value(config, U2)?;
        if !(input.budget_units > 0.0 && input.budget_units <= input.max_budget * (1.0 + 1e-9)) {
            return Err(LearnerError::Hyperparameter {
                name: "budget_units".into(),
                reason: format!("{} outside (0, {}]", input.budget_units, input.max_budget),
            });
        }
        Ok(SurfaceScorer {
            accuracy: accuracy_proxy(u1, input.budget_units, input.max_budget),
            fairness: fairness_proxy(u2),
        })
    }
}

fn column(rows: &Dataset, name: &str) -> Result<Vec<f64>, LearnerError> {
    let idx = rows
        .feature_index(name)
        .ok_or_else(|| LearnerError::NonNumericFeature(name.to_string()))?;
    rows.numeric_column(idx)
        .iter()
        .map(|v| v.ok_or_else(|| LearnerError::NonNumericFeature(name.to_string())))
        .collect()
}

impl Scorer for SurfaceScorer {
    fn score_rows(&self, rows: &Dataset) -> Result<Vec<f64>, LearnerError> {
        let signal = column(rows, SIGNAL_COLUMN)?;
        let slot = column(rows, SLOT_COLUMN)?;
        // the first group (sorted) carries the larger false positive rate
        let first_group = rows.group_names().into_iter().next().unwrap_or_default();
        Ok((0..rows.len())
            .map(|r| {
                let s = slot[r].clamp(0.0, 1.0);
                if signal[r] >= 0.5 {
                    if s < self.accuracy { 0.9 + 0.1 * (1.0 - s) } else { 0.05 }
                } else if rows.groups()[r] == first_group {
                    0.2 + 0.6 * (1.0 - s)
                } else if s < self.fairness {
                    0.2 + 0.6 * (1.0 - s / self.fairness)
                } else {
                    0.1
                }
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic::surface_fixture;
    use crate::learners::{train, TrainerKind};
    use crate::metrics::{evaluate, AccuracyMetric, FairnessMetric, MetricSpec, ThresholdPolicy};
    use crate::space::Value;

    fn config(u1: f64, u2: f64) -> Configuration {
        Configuration::new(
            "synthetic".into(),
            [(U1.to_string(), Value::Real(u1)), (U2.to_string(), Value::Real(u2))]
                .into_iter()
                .collect(),
        )
    }

    #[test]
    fn closed_form() {
        let ds = surface_fixture(10).unwrap();
        let rows = [0usize];
        let input = TrainInput { train: &ds, rows: &rows, budget_units: 100.0 / 3.0, max_budget: 100.0, seed: 0 };
        let s = SurfaceScorer::new(&config(0.2, 0.9), input).unwrap();
        let a = (1.0 - (-1.0f64).exp()) * 0.5;
        approx::assert_abs_diff_eq!(s.accuracy, a, epsilon = 1e-15);
        approx::assert_abs_diff_eq!(s.fairness, 0.4, epsilon = 1e-15);
    }

    #[test]
    fn evaluate_recovers_surface() {
        let ds = surface_fixture(2000).unwrap();
        let spec = MetricSpec::new(
            AccuracyMetric::Recall,
            FairnessMetric::PredictiveEquality,
            ThresholdPolicy::global_fpr(0.1),
        );
        let rows: Vec<usize> = (0..ds.len()).collect();
        for (u1, u2, b) in [(0.7, 0.3, 100.0), (0.1, 0.9, 11.1), (0.45, 0.55, 1.23), (1.0, 0.0, 33.3)] {
            let input = TrainInput { train: &ds, rows: &rows, budget_units: b, max_budget: 100.0, seed: 1 };
            let model = train(&TrainerKind::SyntheticSurface, &config(u1, u2), input).unwrap();
            let e = evaluate(&model.score(&ds).unwrap(), &spec).unwrap();
            let (a, f) = (accuracy_proxy(u1, b, 100.0), fairness_proxy(u2));
            assert!((e.accuracy - a).abs() <= 1.0 / 2000.0 + 1e-12, "a {} vs {a}", e.accuracy);
            assert!((e.fairness - f).abs() < 0.02, "f {} vs {f}", e.fairness);
        }
    }

    #[test]
    fn missing_hyperparameter() {
        let ds = surface_fixture(5).unwrap();
        let rows = [0usize];
        let input = TrainInput { train: &ds, rows: &rows, budget_units: 1.0, max_budget: 1.0, seed: 0 };
        let c = Configuration::new("synthetic".into(), Default::default());
        assert!(SurfaceScorer::new(&c, input).is_err());
    }
}
