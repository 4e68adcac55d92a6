//! load → split → ladder → search → select → refit and test → export.

use std::path::Path;

use anyhow::{Context, Result};

use fairband::analysis;
use fairband::data::synthetic::{group_noise_dataset, surface_fixture};
use fairband::data::{load_csv_with, split, BudgetLadder, Dataset, LoadOptions, SplitSet};
use fairband::engine::{
    run_random_search, run_search, trial_seed, EngineParams, Executor, PipelineEvaluator, SearchState,
};

use crate::config::{Generator, RunConfig};

const DEFAULT_SURFACE_ROWS_PER_CELL: usize = 500;

pub fn load_dataset(cfg: &RunConfig) -> Result<Dataset> {
    let d = &cfg.dataset;
    let ds = match (&d.path, d.generator) {
        (Some(path), _) => {
            let opts = LoadOptions { group_as_feature: d.group_as_feature };
            return load_csv_with(path, &d.label_column, &d.group_column, &opts)
                .with_context(|| format!("loading {}", path.display()));
        }
        (None, Some(Generator::Surface)) => surface_fixture(d.rows.unwrap_or(DEFAULT_SURFACE_ROWS_PER_CELL))?,
        (None, Some(Generator::GroupNoise)) => group_noise_dataset(&cfg.group_noise_params())?,
        (None, None) => anyhow::bail!("dataset: one of `path` or `generator` is required"),
    };
    Ok(if d.group_as_feature { ds.with_group_feature() } else { ds })
}

/// Everything the search needs, built from a validated config.
pub struct Prepared {
    pub fingerprint: String,
    pub parts: SplitSet,
    pub ladder: BudgetLadder,
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    let ds = load_dataset(cfg)?;
    let [ft, fv, fs] = cfg.dataset.split;
    let parts = split(&ds, (ft, fv, fs), cfg.dataset.seed)?;
    let ladder = BudgetLadder::build(&parts.train, cfg.engine.r, cfg.engine.eta, cfg.dataset.seed)?;
    Ok(Prepared { fingerprint: ds.fingerprint(), parts, ladder })
}

/// Runs the configured strategy and refits the winner; does not write.
pub fn execute(cfg: &RunConfig, prepared: &Prepared) -> Result<SearchState> {
    let e = &cfg.engine;
    let params = EngineParams::new(e.r, e.eta, cfg.alpha_mode()?, e.seed)?;
    let space = cfg.space_spec()?;
    let registry = cfg.registry()?;
    let evaluator = PipelineEvaluator {
        train: &prepared.parts.train,
        validation: &prepared.parts.validation,
        ladder: &prepared.ladder,
        registry: &registry,
        spec: &cfg.metrics,
        max_budget: e.r,
    };
    let executor = Executor::new(e.max_parallel)?;
    let mut state = if e.strategy.is_random_search() {
        run_random_search(e.strategy, params, e.total_budget, &space, &evaluator, &executor)?
    } else {
        run_search(e.strategy, params, &space, &evaluator, &executor)?
    };
    state.metric_spec = Some(cfg.metrics);
    state.dataset_fingerprint = Some(prepared.fingerprint.clone());

    let config = state.selected_configuration().cloned().context("search finished without a selection")?;
    // seed slot past every rung index
    let seed = trial_seed(e.seed, &config.id, usize::MAX);
    match evaluator.refit(&config, seed, &prepared.parts.test) {
        Ok(outcome) => state.selection.as_mut().expect("selection present").refit = Some(outcome),
        Err(reason) => eprintln!("warning: refit of {} failed: {reason}", config.id),
    }
    Ok(state)
}

/// The whole `run` command minus printing: validate, search, export.
pub fn run(cfg: &RunConfig) -> Result<SearchState> {
    cfg.validate()?;
    let prepared = prepare(cfg)?;
    let state = execute(cfg, &prepared)?;
    export_run(&state, &cfg.output_dir)?;
    Ok(state)
}

pub fn export_run(state: &SearchState, dir: &Path) -> Result<()> {
    analysis::export(state, dir).with_context(|| format!("writing run artifacts to {}", dir.display()))
}
