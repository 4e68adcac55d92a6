//! The run configuration document.
//!
//! ```toml
//! output_dir = "runs/fb-auto"
//!
//! [dataset]
//! path = "data/income.csv"      # or: generator = "group-noise" | "surface"
//! label_column = "label"
//! group_column = "sex"
//! split = [0.6, 0.2, 0.2]
//! seed = 0
//!
//! [space]
//! model_types = ["logistic", "tree"]
//! [space.models.tree.max_depth]
//! kind = "int-uniform"
//! low = 1
//! high = 12
//!
//! [engine]
//! strategy = "fb-auto"
//! r = 100
//! eta = 3
//! seed = 7
//!
//! [metrics]
//! accuracy = "recall"
//! fairness = "predictive-equality"
//! policy = "global-fpr"
//! target = 0.05
//!
//! [trainer.workers]
//! gbm = ["python3", "gbm_worker.py"]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use fairband::data::synthetic::GroupNoiseParams;
use fairband::engine::{AlphaMode, Strategy};
use fairband::learners::{TrainerRegistry, WorkerCommand, DEFAULT_WORKER_TIMEOUT};
use fairband::metrics::MetricSpec;
use fairband::space::{SpaceDocument, SpaceSpec};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetSection,
    pub space: SpaceDocument,
    #[serde(default)]
    pub engine: EngineSection,
    pub metrics: MetricSpec,
    #[serde(default)]
    pub trainer: TrainerSection,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("fairband-run")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Generator {
    /// Fixture for the closed-form surface trainer.
    Surface,
    /// Two groups with different label-noise rates.
    GroupNoise,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetSection {
    pub path: Option<PathBuf>,
    pub generator: Option<Generator>,
    /// Generator size: total rows for `group-noise`, rows per
    /// (group, label) cell for `surface`.
    pub rows: Option<usize>,
    #[serde(default = "default_label")]
    pub label_column: String,
    #[serde(default = "default_group")]
    pub group_column: String,
    #[serde(default)]
    pub group_as_feature: bool,
    #[serde(default = "default_split")]
    pub split: [f64; 3],
    #[serde(default)]
    pub seed: u64,
}

fn default_label() -> String {
    "label".into()
}

fn default_group() -> String {
    "group".into()
}

fn default_split() -> [f64; 3] {
    [0.6, 0.2, 0.2]
}

/// `alpha` accepts `"auto"` or a number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSetting {
    Value(f64),
    Named(AutoKeyword),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AutoKeyword {
    Auto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineSection {
    #[serde(default = "default_strategy")]
    pub strategy: Strategy,
    #[serde(default = "default_r")]
    pub r: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Only `fb-auto` may override its weight; every other strategy fixes it.
    pub alpha: Option<AlphaSetting>,
    /// Budget for the random-search strategies.
    #[serde(default = "default_total_budget")]
    pub total_budget: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_parallel")]
    pub max_parallel: usize,
}

fn default_strategy() -> Strategy {
    Strategy::FbAuto
}

fn default_r() -> f64 {
    100.0
}

fn default_eta() -> f64 {
    3.0
}

fn default_total_budget() -> f64 {
    2400.0
}

fn default_parallel() -> usize {
    1
}

impl Default for EngineSection {
    fn default() -> Self {
        EngineSection {
            strategy: default_strategy(),
            r: default_r(),
            eta: default_eta(),
            alpha: None,
            total_budget: default_total_budget(),
            seed: 0,
            max_parallel: default_parallel(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainerSection {
    /// Model type → worker argv.
    #[serde(default)]
    pub workers: BTreeMap<String, Vec<String>>,
    pub timeout_secs: Option<u64>,
}

/// Command-line values that take precedence over the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub strategy: Option<Strategy>,
    pub out: Option<PathBuf>,
    pub max_parallel: Option<usize>,
    pub r: Option<f64>,
    pub eta: Option<f64>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    /// Reads the document; relative paths inside it resolve against its
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut cfg = Self::from_toml_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(p) = &cfg.dataset.path {
            if p.is_relative() {
                cfg.dataset.path = Some(base.join(p));
            }
        }
        if cfg.output_dir.is_relative() {
            cfg.output_dir = base.join(&cfg.output_dir);
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.engine.seed = s;
        }
        if let Some(s) = o.strategy {
            self.engine.strategy = s;
            // a strategy switch resets any weight the document gave fb-auto
            if s != Strategy::FbAuto {
                self.engine.alpha = None;
            }
        }
        if let Some(out) = &o.out {
            self.output_dir = out.clone();
        }
        if let Some(p) = o.max_parallel {
            self.engine.max_parallel = p;
        }
        if let Some(r) = o.r {
            self.engine.r = r;
        }
        if let Some(eta) = o.eta {
            self.engine.eta = eta;
        }
    }

    pub fn alpha_mode(&self) -> Result<AlphaMode> {
        let fixed = self.engine.strategy.alpha();
        match (self.engine.alpha, self.engine.strategy) {
            (None, _) => Ok(fixed),
            (Some(AlphaSetting::Named(AutoKeyword::Auto)), Strategy::FbAuto) => Ok(AlphaMode::Auto),
            (Some(AlphaSetting::Value(a)), Strategy::FbAuto) => {
                ensure!((0.0..=1.0).contains(&a), "engine.alpha must lie in [0, 1], got {a}");
                Ok(AlphaMode::Static(a))
            }
            (Some(given), s) => {
                let given = match given {
                    AlphaSetting::Value(a) => AlphaMode::Static(a),
                    AlphaSetting::Named(_) => AlphaMode::Auto,
                };
                ensure!(given == fixed, "strategy {s} fixes alpha to {fixed}, but engine.alpha is {given}");
                Ok(fixed)
            }
        }
    }

    pub fn space_spec(&self) -> Result<SpaceSpec> {
        Ok(self.space.clone().into_spec()?)
    }

    pub fn registry(&self) -> Result<TrainerRegistry> {
        let timeout = self.trainer.timeout_secs.map(Duration::from_secs).unwrap_or(DEFAULT_WORKER_TIMEOUT);
        let mut registry = TrainerRegistry::new();
        for (model, argv) in &self.trainer.workers {
            let cmd = WorkerCommand::new(argv.clone())?.with_timeout(timeout);
            registry = registry.with_worker(model.clone(), cmd);
        }
        Ok(registry)
    }

    pub fn group_noise_params(&self) -> GroupNoiseParams {
        GroupNoiseParams {
            rows: self.dataset.rows.unwrap_or(GroupNoiseParams::default().rows),
            seed: self.dataset.seed,
            ..GroupNoiseParams::default()
        }
    }

    /// Checks everything that can be checked without loading data or
    /// training: referenced files, section consistency and parameter ranges.
    pub fn validate(&self) -> Result<()> {
        let d = &self.dataset;
        match (&d.path, d.generator) {
            (Some(_), Some(_)) => bail!("dataset: give either `path` or `generator`, not both"),
            (None, None) => bail!("dataset: one of `path` or `generator` is required"),
            (Some(p), None) => ensure!(p.is_file(), "dataset file {} does not exist", p.display()),
            (None, Some(_)) => {}
        }
        let sum: f64 = d.split.iter().sum();
        ensure!(
            d.split.iter().all(|&x| x > 0.0) && (sum - 1.0).abs() < 1e-9,
            "dataset.split must be three positive fractions summing to 1, got {:?}",
            d.split
        );
        let e = &self.engine;
        fairband::engine::validate_params(e.r, e.eta)?;
        ensure!(e.max_parallel >= 1, "engine.max_parallel must be at least 1");
        if e.strategy.is_random_search() {
            ensure!(e.total_budget >= e.r, "engine.total_budget ({}) must be at least R ({})", e.total_budget, e.r);
        }
        self.alpha_mode()?;
        self.metrics.policy.validate()?;
        self.space_spec()?;
        for (model, argv) in &self.trainer.workers {
            let program = argv.first().map(String::as_str).unwrap_or("");
            ensure!(!program.is_empty(), "trainer.workers.{model}: empty command");
            if program.contains('/') {
                ensure!(Path::new(program).exists(), "trainer.workers.{model}: {program} does not exist");
            }
        }
        self.registry()?;
        Ok(())
    }
}
