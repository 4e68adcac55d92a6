//! Turning a (configuration, budget) pair into validation metrics.

use serde::{Deserialize, Serialize};

use crate::data::{BudgetLadder, Dataset};
use crate::learners::{train, LearnerError, TrainInput, TrainerRegistry};
use crate::metrics::{evaluate, evaluate_at, Evaluation, MetricSpec};
use crate::space::Configuration;

/// Validation metrics of one trial, or the reason it failed.
pub type TrialResult = Result<Evaluation, String>;

pub trait TrialEvaluator: Send + Sync {
    fn evaluate(&self, config: &Configuration, budget_units: f64, seed: u64) -> TrialResult;
}

/// Metrics of the selected configuration retrained on the whole training
/// partition at the full budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefitOutcome {
    pub validation: Evaluation,
    /// Measured at the threshold calibrated on validation.
    pub test: Evaluation,
}

/// Trains on the budget slice of the training partition and scores the
/// validation partition.
pub struct PipelineEvaluator<'a> {
    pub train: &'a Dataset,
    pub validation: &'a Dataset,
    pub ladder: &'a BudgetLadder,
    pub registry: &'a TrainerRegistry,
    pub spec: &'a MetricSpec,
    pub max_budget: f64,
}

impl PipelineEvaluator<'_> {
    fn train_and_score(
        &self,
        config: &Configuration,
        budget_units: f64,
        seed: u64,
        rows: &[usize],
        target: &Dataset,
    ) -> Result<crate::metrics::ScoreSet, LearnerError> {
        let kind = self.registry.kind_for(&config.model_type)?;
        let input = TrainInput { train: self.train, rows, budget_units, max_budget: self.max_budget, seed };
        train(&kind, config, input)?.score(target)
    }

    /// Retrains `config` at the full budget on every training row, then
    /// evaluates on validation (calibrating) and on `test` (reusing the
    /// validation threshold).
    pub fn refit(&self, config: &Configuration, seed: u64, test: &Dataset) -> Result<RefitOutcome, String> {
        let rows: Vec<usize> = (0..self.train.len()).collect();
        let kind = self.registry.kind_for(&config.model_type).map_err(|e| e.to_string())?;
        let input = TrainInput {
            train: self.train,
            rows: &rows,
            budget_units: self.max_budget,
            max_budget: self.max_budget,
            seed,
        };
        let model = train(&kind, config, input).map_err(|e| e.to_string())?;
        let val_scores = model.score(self.validation).map_err(|e| e.to_string())?;
        let validation = evaluate(&val_scores, self.spec).map_err(|e| e.to_string())?;
        let test_scores = model.score(test).map_err(|e| e.to_string())?;
        let test = evaluate_at(&test_scores, self.spec, validation.threshold);
        Ok(RefitOutcome { validation, test })
    }
}

impl TrialEvaluator for PipelineEvaluator<'_> {
    fn evaluate(&self, config: &Configuration, budget_units: f64, seed: u64) -> TrialResult {
        let rows = self.ladder.slice_for_budget(budget_units).map_err(|e| e.to_string())?;
        let scores = self
            .train_and_score(config, budget_units, seed, rows, self.validation)
            .map_err(|e| e.to_string())?;
        evaluate(&scores, self.spec).map_err(|e| e.to_string())
    }
}
