//! Trainers that turn a [`Configuration`] plus a budget slice into a scorer.
//!
//! The model type of a configuration selects the trainer: `logistic` and
//! `tree` are built in, `synthetic` is the closed-form test surface, and any
//! other model type is delegated to an external worker process.

mod encoder;
pub mod logistic;
pub mod surface;
pub mod tree;
pub mod worker;

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::data::{undersample, DataError, Dataset};
use crate::metrics::{MetricError, ScoreSet};
use crate::space::Configuration;

pub use encoder::FeatureEncoder;
pub use worker::{WorkerCommand, WorkerRequest, WorkerResponse};

/// Shared dimension holding the undersampling target positive rate.
pub const UNDERSAMPLE_DIMENSION: &str = "undersample_pos_rate";

pub const LOGISTIC: &str = "logistic";
pub const TREE: &str = "tree";
pub const SYNTHETIC: &str = "synthetic";

pub const DEFAULT_WORKER_TIMEOUT: Duration = Duration::from_secs(600);

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("hyperparameter `{name}`: {reason}")]
    Hyperparameter { name: String, reason: String },
    #[error("training rows must contain both classes")]
    MissingClass,
    #[error("feature `{0}` must be numeric")]
    NonNumericFeature(String),
    #[error("schema mismatch: model trained on {expected:?}, rows have {got:?}")]
    SchemaMismatch { expected: Vec<String>, got: Vec<String> },
    #[error("no trainer for model type `{0}`")]
    UnknownModelType(String),
    #[error("model type `{config}` cannot be trained by {kind}")]
    KindMismatch { config: String, kind: String },
    #[error("worker could not be started: {0}")]
    WorkerSpawn(std::io::Error),
    #[error("worker timed out after {0:?}")]
    WorkerTimeout(Duration),
    #[error("worker exited with {status}: {stderr}")]
    WorkerExit { status: String, stderr: String },
    #[error("worker protocol violation: {0}")]
    Protocol(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainerKind {
    BuiltinLogistic,
    BuiltinTree,
    SyntheticSurface,
    ExternalWorker(WorkerCommand),
}

impl fmt::Display for TrainerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainerKind::BuiltinLogistic => f.write_str("builtin-logistic"),
            TrainerKind::BuiltinTree => f.write_str("builtin-tree"),
            TrainerKind::SyntheticSurface => f.write_str("synthetic-surface"),
            TrainerKind::ExternalWorker(cmd) => write!(f, "external-worker({})", cmd.program()),
        }
    }
}

/// Maps model types to trainers. Workers registered for a model type take
/// precedence over the built-ins of the same name.
#[derive(Debug, Clone, Default)]
pub struct TrainerRegistry {
    workers: BTreeMap<String, WorkerCommand>,
}

impl TrainerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_worker(mut self, model_type: impl Into<String>, command: WorkerCommand) -> Self {
        self.workers.insert(model_type.into(), command);
        self
    }

    pub fn kind_for(&self, model_type: &str) -> Result<TrainerKind, LearnerError> {
        if let Some(cmd) = self.workers.get(model_type) {
            return Ok(TrainerKind::ExternalWorker(cmd.clone()));
        }
        match model_type {
            LOGISTIC => Ok(TrainerKind::BuiltinLogistic),
            TREE => Ok(TrainerKind::BuiltinTree),
            SYNTHETIC => Ok(TrainerKind::SyntheticSurface),
            other => Err(LearnerError::UnknownModelType(other.to_string())),
        }
    }
}

/// What a trainer gets to see: the training partition, the rows of the
/// budget slice, and the budget itself.
#[derive(Debug, Clone, Copy)]
pub struct TrainInput<'a> {
    pub train: &'a Dataset,
    pub rows: &'a [usize],
    pub budget_units: f64,
    pub max_budget: f64,
    pub seed: u64,
}

pub trait Scorer: Send + Sync {
    /// One raw score per row of `rows`, in order.
    fn score_rows(&self, rows: &Dataset) -> Result<Vec<f64>, LearnerError>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub config_id: String,
    pub budget_units: f64,
    pub trainer: String,
}

pub struct TrainedModel {
    scorer: Box<dyn Scorer>,
    pub provenance: Provenance,
}

impl fmt::Debug for TrainedModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TrainedModel").field("provenance", &self.provenance).finish()
    }
}

impl TrainedModel {
    /// Scores every row of `rows`, clamped to `[0, 1]`.
    pub fn score(&self, rows: &Dataset) -> Result<ScoreSet, LearnerError> {
        let raw = self.scorer.score_rows(rows)?;
        if raw.len() != rows.len() {
            return Err(LearnerError::Protocol(format!(
                "expected {} scores, got {}",
                rows.len(),
                raw.len()
            )));
        }
        let clamped = raw.into_iter().map(|s| if s.is_nan() { 0.0 } else { s.clamp(0.0, 1.0) }).collect();
        Ok(ScoreSet::for_dataset(clamped, rows)?)
    }
}

pub(crate) fn hyper_f64(config: &Configuration, name: &str, default: f64) -> Result<f64, LearnerError> {
    match config.get(name) {
        None => Ok(default),
        Some(v) => v.as_f64().filter(|x| x.is_finite()).ok_or_else(|| LearnerError::Hyperparameter {
            name: name.to_string(),
            reason: format!("expected a number, got `{v}`"),
        }),
    }
}

pub(crate) fn hyper_usize(config: &Configuration, name: &str, default: usize) -> Result<usize, LearnerError> {
    let x = hyper_f64(config, name, default as f64)?;
    if x < 0.0 || x.fract() != 0.0 {
        return Err(LearnerError::Hyperparameter {
            name: name.to_string(),
            reason: format!("expected a non-negative integer, got {x}"),
        });
    }
    Ok(x as usize)
}

fn check_kind(kind: &TrainerKind, config: &Configuration) -> Result<(), LearnerError> {
    let ok = match kind {
        TrainerKind::BuiltinLogistic => config.model_type == LOGISTIC,
        TrainerKind::BuiltinTree => config.model_type == TREE,
        TrainerKind::SyntheticSurface => config.model_type == SYNTHETIC,
        TrainerKind::ExternalWorker(_) => true,
    };
    if ok {
        Ok(())
    } else {
        Err(LearnerError::KindMismatch { config: config.model_type.clone(), kind: kind.to_string() })
    }
}

/// Trains `config` on `input.rows`, after undersampling them when the
/// configuration carries [`UNDERSAMPLE_DIMENSION`].
pub fn train(kind: &TrainerKind, config: &Configuration, input: TrainInput<'_>) -> Result<TrainedModel, LearnerError> {
    check_kind(kind, config)?;
    let sampled;
    let rows = match config.get_f64(UNDERSAMPLE_DIMENSION) {
        Some(target) => {
            sampled = undersample(input.train.labels(), input.rows, target, input.seed);
            sampled.as_slice()
        }
        None => input.rows,
    };
    let input = TrainInput { rows, ..input };
    let needs_both_classes = !matches!(kind, TrainerKind::SyntheticSurface);
    if needs_both_classes {
        let pos = rows.iter().filter(|&&i| input.train.labels()[i] == 1).count();
        if pos == 0 || pos == rows.len() {
            return Err(LearnerError::MissingClass);
        }
    }
    let scorer: Box<dyn Scorer> = match kind {
        TrainerKind::BuiltinLogistic => Box::new(logistic::fit(config, input)?),
        TrainerKind::BuiltinTree => Box::new(tree::fit(config, input)?),
        TrainerKind::SyntheticSurface => Box::new(surface::SurfaceScorer::new(config, input)?),
        TrainerKind::ExternalWorker(cmd) => Box::new(worker::WorkerScorer::new(cmd.clone(), config, input)),
    };
    Ok(TrainedModel {
        scorer,
        provenance: Provenance {
            config_id: config.id.clone(),
            budget_units: input.budget_units,
            trainer: kind.to_string(),
        },
    })
}
