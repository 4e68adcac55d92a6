//! The Fairband scheduler.
//!
//! Each bracket is a successive-halving run: every surviving configuration is
//! trained at the rung budget, scored on the validation set for accuracy `a`
//! and fairness `f`, ranked by `o = α·a + (1 − α)·f`, and the best `⌊n_i/η⌋`
//! move on. With `α = auto` the weight is recomputed per rung as
//! `0.5·(mean f − mean a) + 0.5`. A static `α = 1` is plain Hyperband.

mod evaluator;
mod schedule;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::metrics::{Evaluation, MetricSpec};
use crate::space::{Configuration, SpaceError, SpaceSpec};

pub use evaluator::{PipelineEvaluator, RefitOutcome, TrialEvaluator, TrialResult};
pub use schedule::{bracket_schedule, max_bracket, validate_params, BracketPlan, Rung};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid engine parameters: {0}")]
    InvalidParams(String),
    #[error("objective inputs outside [0, 1]: a={a}, f={f}, alpha={alpha}")]
    Domain { a: f64, f: f64, alpha: f64 },
    #[error("dynamic alpha needs equally sized, non-empty accuracy and fairness lists")]
    EmptyAlphaInput,
    #[error("every trial of bracket {bracket} rung {rung} failed")]
    AllFailed { bracket: u32, rung: usize },
    #[error("no successful trial to select from")]
    NoOkTrials,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error("thread pool: {0}")]
    Pool(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaMode {
    Static(f64),
    Auto,
}

impl fmt::Display for AlphaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaMode::Static(a) => write!(f, "{a}"),
            AlphaMode::Auto => f.write_str("auto"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub max_budget: f64,
    pub eta: f64,
    pub alpha: AlphaMode,
    pub seed: u64,
}

impl EngineParams {
    pub fn new(max_budget: f64, eta: f64, alpha: AlphaMode, seed: u64) -> Result<Self, EngineError> {
        validate_params(max_budget, eta)?;
        if let AlphaMode::Static(a) = alpha {
            if !(0.0..=1.0).contains(&a) {
                return Err(EngineError::InvalidParams(format!("static alpha must lie in [0, 1], got {a}")));
            }
        }
        Ok(EngineParams { max_budget, eta, alpha, seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    FbAuto,
    FbBal,
    Hb,
    Rs,
    RsBal,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [Strategy::FbAuto, Strategy::FbBal, Strategy::Hb, Strategy::Rs, Strategy::RsBal];

    pub fn alpha(self) -> AlphaMode {
        match self {
            Strategy::FbAuto => AlphaMode::Auto,
            Strategy::FbBal | Strategy::RsBal => AlphaMode::Static(0.5),
            Strategy::Hb | Strategy::Rs => AlphaMode::Static(1.0),
        }
    }

    pub fn is_random_search(self) -> bool {
        matches!(self, Strategy::Rs | Strategy::RsBal)
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::FbAuto => "fb-auto",
            Strategy::FbBal => "fb-bal",
            Strategy::Hb => "hb",
            Strategy::Rs => "rs",
            Strategy::RsBal => "rs-bal",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| EngineError::UnknownStrategy(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrialStatus {
    Ok,
    Failed,
}

/// One (configuration, budget) evaluation. Failed trials carry zeros for
/// the metric fields and the error text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub config_id: String,
    pub bracket: u32,
    pub rung: usize,
    pub budget_units: f64,
    pub accuracy: f64,
    pub fairness: f64,
    pub alpha_used: f64,
    pub objective: f64,
    pub threshold: f64,
    pub status: TrialStatus,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn is_ok(&self) -> bool {
        self.status == TrialStatus::Ok
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaUse {
    Search,
    Selection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaEntry {
    pub bracket: Option<u32>,
    pub rung: Option<usize>,
    pub alpha: f64,
    pub used_for: AlphaUse,
}

/// The chosen configuration and how it was chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub config_id: String,
    /// Index into [`SearchState::trials`].
    pub trial: usize,
    pub selection_alpha: f64,
    /// `selection_alpha·a + (1 − selection_alpha)·f` of the winning trial.
    pub score: f64,
    /// Trial with the highest objective as recorded during search.
    pub best_recorded_trial: usize,
    /// Full-budget refit measured on validation and test.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refit: Option<RefitOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketAbort {
    pub bracket: u32,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchState {
    pub strategy: Strategy,
    pub params: EngineParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric_spec: Option<MetricSpec>,
    /// Fingerprint of the full dataset the run was split from.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_fingerprint: Option<String>,
    pub trials: Vec<TrialRecord>,
    pub alpha_history: Vec<AlphaEntry>,
    pub configurations: BTreeMap<String, Configuration>,
    #[serde(default)]
    pub aborted: Vec<BracketAbort>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<Selection>,
}

impl SearchState {
    pub fn new(strategy: Strategy, params: EngineParams) -> Self {
        SearchState {
            strategy,
            params,
            metric_spec: None,
            dataset_fingerprint: None,
            trials: Vec::new(),
            alpha_history: Vec::new(),
            configurations: BTreeMap::new(),
            aborted: Vec::new(),
            selection: None,
        }
    }

    pub fn ok_trials(&self) -> impl Iterator<Item = (usize, &TrialRecord)> {
        self.trials.iter().enumerate().filter(|(_, t)| t.is_ok())
    }

    /// Sum of rung budgets over every trial, failed ones included.
    pub fn consumed_budget(&self) -> f64 {
        self.trials.iter().map(|t| t.budget_units).sum()
    }

    pub fn selected_configuration(&self) -> Option<&Configuration> {
        self.selection.as_ref().and_then(|s| self.configurations.get(&s.config_id))
    }

    /// Configuration ids of a rung, in recorded order.
    pub fn rung_config_ids(&self, bracket: u32, rung: usize) -> Vec<&str> {
        self.trials
            .iter()
            .filter(|t| t.bracket == bracket && t.rung == rung)
            .map(|t| t.config_id.as_str())
            .collect()
    }
}

/// `α·a + (1 − α)·f`.
pub fn objective(a: f64, f: f64, alpha: f64) -> Result<f64, EngineError> {
    let unit = |x: f64| (0.0..=1.0).contains(&x);
    if !(unit(a) && unit(f) && unit(alpha)) {
        return Err(EngineError::Domain { a, f, alpha });
    }
    Ok(alpha * a + (1.0 - alpha) * f)
}

/// `0.5·(mean F − mean A) + 0.5`: leans toward whichever metric lags.
pub fn dynamic_alpha(accuracies: &[f64], fairness: &[f64]) -> Result<f64, EngineError> {
    if accuracies.is_empty() || accuracies.len() != fairness.len() {
        return Err(EngineError::EmptyAlphaInput);
    }
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    let delta = mean(fairness) - mean(accuracies);
    Ok((0.5 * delta + 0.5).clamp(0.0, 1.0))
}

/// Seed for one trial, independent of evaluation order.
pub fn trial_seed(master: u64, config_id: &str, rung: usize) -> u64 {
    let digest = Sha256::digest(format!("{master}/{config_id}/{rung}").as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}

/// Descending objective, failed trials last, then ascending config id.
fn rank_order(a: &TrialRecord, b: &TrialRecord) -> Ordering {
    match (a.is_ok(), b.is_ok()) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => b.objective.total_cmp(&a.objective).then_with(|| a.config_id.cmp(&b.config_id)),
        (false, false) => a.config_id.cmp(&b.config_id),
    }
}

/// Runs trials concurrently, bounded by `max_parallel`.
pub struct Executor {
    pool: rayon::ThreadPool,
}

impl Executor {
    pub fn new(max_parallel: usize) -> Result<Self, EngineError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(max_parallel.max(1))
            .build()
            .map_err(|e| EngineError::Pool(e.to_string()))?;
        Ok(Executor { pool })
    }

    fn evaluate_all(
        &self,
        evaluator: &dyn TrialEvaluator,
        configs: &[Configuration],
        budget: f64,
        seeds: &[u64],
    ) -> Vec<TrialResult> {
        self.pool.install(|| {
            configs
                .par_iter()
                .zip(seeds.par_iter())
                .map(|(c, &seed)| evaluator.evaluate(c, budget, seed))
                .collect()
        })
    }
}

impl Default for Executor {
    fn default() -> Self {
        Executor::new(1).expect("single-thread pool")
    }
}

fn record_from(
    config: &Configuration,
    bracket: u32,
    rung: usize,
    budget: f64,
    seed: u64,
    result: TrialResult,
) -> TrialRecord {
    let mut record = TrialRecord {
        config_id: config.id.clone(),
        bracket,
        rung,
        budget_units: budget,
        accuracy: 0.0,
        fairness: 0.0,
        alpha_used: 0.0,
        objective: 0.0,
        threshold: 0.0,
        status: TrialStatus::Failed,
        seed,
        error: None,
    };
    match result {
        Ok(Evaluation { accuracy, fairness, threshold })
            if (0.0..=1.0).contains(&accuracy) && (0.0..=1.0).contains(&fairness) =>
        {
            record.accuracy = accuracy;
            record.fairness = fairness;
            record.threshold = threshold;
            record.status = TrialStatus::Ok;
        }
        Ok(e) => record.error = Some(format!("metrics outside [0, 1]: {e:?}")),
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Trains and scores `survivors` at the rung budget, fixes α, ranks by the
/// objective and returns the `rung.keep` best, best first.
pub fn run_rung(
    rung: &Rung,
    bracket: u32,
    survivors: Vec<Configuration>,
    alpha_mode: AlphaMode,
    evaluator: &dyn TrialEvaluator,
    executor: &Executor,
    state: &mut SearchState,
) -> Result<Vec<Configuration>, EngineError> {
    let mut configs = survivors;
    configs.sort_by(|a, b| a.id.cmp(&b.id));
    let seeds: Vec<u64> = configs
        .iter()
        .map(|c| trial_seed(state.params.seed, &c.id, rung.index))
        .collect();
    let results = executor.evaluate_all(evaluator, &configs, rung.budget, &seeds);
    let mut records: Vec<TrialRecord> = configs
        .iter()
        .zip(seeds)
        .zip(results)
        .map(|((c, seed), result)| record_from(c, bracket, rung.index, rung.budget, seed, result))
        .collect();

    let ok: Vec<&TrialRecord> = records.iter().filter(|r| r.is_ok()).collect();
    if ok.is_empty() {
        state.trials.extend(records);
        return Err(EngineError::AllFailed { bracket, rung: rung.index });
    }
    let alpha = match alpha_mode {
        AlphaMode::Static(a) => a,
        AlphaMode::Auto => {
            let a: Vec<f64> = ok.iter().map(|r| r.accuracy).collect();
            let f: Vec<f64> = ok.iter().map(|r| r.fairness).collect();
            dynamic_alpha(&a, &f)?
        }
    };
    for r in records.iter_mut() {
        r.alpha_used = alpha;
        if r.is_ok() {
            r.objective = objective(r.accuracy, r.fairness, alpha)?;
        }
    }
    state.alpha_history.push(AlphaEntry {
        bracket: Some(bracket),
        rung: Some(rung.index),
        alpha,
        used_for: AlphaUse::Search,
    });

    let mut ranked: Vec<usize> = (0..records.len()).collect();
    ranked.sort_by(|&a, &b| rank_order(&records[a], &records[b]));
    let keep: Vec<Configuration> = ranked
        .iter()
        .take(rung.keep)
        .filter(|&&i| records[i].is_ok())
        .map(|&i| configs[i].clone())
        .collect();
    for c in configs {
        state.configurations.entry(c.id.clone()).or_insert(c);
    }
    state.trials.extend(records);
    Ok(keep)
}

/// Runs every bracket from `s_max` down to 0, each on freshly sampled
/// configurations, then selects the final configuration.
pub fn run_search(
    strategy: Strategy,
    params: EngineParams,
    space: &SpaceSpec,
    evaluator: &dyn TrialEvaluator,
    executor: &Executor,
) -> Result<SearchState, EngineError> {
    let mut state = SearchState::new(strategy, params);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut seen = HashSet::new();
    for plan in bracket_schedule(params.max_budget, params.eta)? {
        let mut survivors = match space.sample_unique_excluding(plan.n, &mut rng, &mut seen) {
            Ok(configs) => configs,
            Err(e) => {
                state.aborted.push(BracketAbort { bracket: plan.s, reason: e.to_string() });
                continue;
            }
        };
        for rung in &plan.rungs {
            match run_rung(rung, plan.s, survivors, params.alpha, evaluator, executor, &mut state) {
                Ok(next) => survivors = next,
                Err(e) => {
                    state.aborted.push(BracketAbort { bracket: plan.s, reason: e.to_string() });
                    break;
                }
            }
        }
    }
    select_final(&mut state, params.alpha)?;
    Ok(state)
}

fn argmax_trial(state: &SearchState, key: impl Fn(&TrialRecord) -> f64) -> Option<usize> {
    state
        .ok_trials()
        .max_by(|(ia, a), (ib, b)| {
            key(a)
                .total_cmp(&key(b))
                .then_with(|| b.config_id.cmp(&a.config_id))
                .then_with(|| a.budget_units.total_cmp(&b.budget_units))
                .then_with(|| ib.cmp(ia))
        })
        .map(|(i, _)| i)
}

/// Picks the final configuration over every successful trial of the run.
///
/// Static mode reuses the search α. Auto mode recomputes α from the mean
/// accuracy and fairness of all successful trials. Ties go to the smaller
/// config id, then the larger budget.
pub fn select_final(state: &mut SearchState, mode: AlphaMode) -> Result<&Selection, EngineError> {
    let alpha = match mode {
        AlphaMode::Static(a) => a,
        AlphaMode::Auto => {
            let (a, f): (Vec<f64>, Vec<f64>) = state.ok_trials().map(|(_, t)| (t.accuracy, t.fairness)).unzip();
            if a.is_empty() {
                return Err(EngineError::NoOkTrials);
            }
            dynamic_alpha(&a, &f)?
        }
    };
    let winner = argmax_trial(state, |t| alpha * t.accuracy + (1.0 - alpha) * t.fairness)
        .ok_or(EngineError::NoOkTrials)?;
    let best_recorded = argmax_trial(state, |t| t.objective).ok_or(EngineError::NoOkTrials)?;
    let trial = &state.trials[winner];
    state.alpha_history.push(AlphaEntry { bracket: None, rung: None, alpha, used_for: AlphaUse::Selection });
    state.selection = Some(Selection {
        config_id: trial.config_id.clone(),
        trial: winner,
        selection_alpha: alpha,
        score: objective(trial.accuracy, trial.fairness, alpha)?,
        best_recorded_trial: best_recorded,
        refit: None,
    });
    Ok(state.selection.as_ref().expect("just set"))
}

/// Random search: `⌊total_budget / R⌋` fresh configurations, each trained at
/// the full budget, selected with a static α.
pub fn run_random_search(
    strategy: Strategy,
    params: EngineParams,
    total_budget: f64,
    space: &SpaceSpec,
    evaluator: &dyn TrialEvaluator,
    executor: &Executor,
) -> Result<SearchState, EngineError> {
    let alpha = match params.alpha {
        AlphaMode::Static(a) => a,
        AlphaMode::Auto => {
            return Err(EngineError::InvalidParams("random search needs a static alpha".into()));
        }
    };
    if !(total_budget >= params.max_budget) {
        return Err(EngineError::InvalidParams(format!(
            "total budget {total_budget} is below R = {}",
            params.max_budget
        )));
    }
    let count = (total_budget / params.max_budget + 1e-9).floor() as usize;
    let mut state = SearchState::new(strategy, params);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let configs = space.sample_unique(count, &mut rng)?;
    let rung = Rung { index: 0, n: count, budget: params.max_budget, keep: count };
    if let Err(e) = run_rung(&rung, 0, configs, AlphaMode::Static(alpha), evaluator, executor, &mut state) {
        state.aborted.push(BracketAbort { bracket: 0, reason: e.to_string() });
    }
    select_final(&mut state, AlphaMode::Static(alpha))?;
    Ok(state)
}

/// Dispatches on the strategy: Hyperband-style brackets or random search.
pub fn run_strategy(
    strategy: Strategy,
    max_budget: f64,
    eta: f64,
    seed: u64,
    rs_total_budget: f64,
    space: &SpaceSpec,
    evaluator: &dyn TrialEvaluator,
    executor: &Executor,
) -> Result<SearchState, EngineError> {
    let params = EngineParams::new(max_budget, eta, strategy.alpha(), seed)?;
    if strategy.is_random_search() {
        run_random_search(strategy, params, rs_total_budget, space, evaluator, executor)
    } else {
        run_search(strategy, params, space, evaluator, executor)
    }
}
