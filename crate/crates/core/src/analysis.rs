//! Pareto frontiers, per-rung frontier density, run comparison and run
//! persistence.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{SearchState, Strategy, TrialRecord, TrialStatus};

pub const SCHEMA_VERSION: u32 = 1;
pub const TRIALS_FILE: &str = "trials.jsonl";
pub const FRONTIER_FILE: &str = "frontier.csv";
pub const DENSITY_FILE: &str = "density.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const STATE_FILE: &str = "state.json";

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{file} line {line}: {reason}")]
    Corrupt { file: String, line: usize, reason: String },
    #[error("unsupported trial schema version {0}")]
    SchemaVersion(u32),
    #[error("need at least one run to compare")]
    NoRuns,
    #[error("run `{0}` has no selected configuration")]
    NoSelection(String),
    #[error("runs `{baseline}` and `{other}` use different {what}")]
    Incompatible { baseline: String, other: String, what: &'static str },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> AnalysisError + '_ {
    move |source| AnalysisError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub accuracy: f64,
    pub fairness: f64,
    pub config_id: String,
    pub budget_units: f64,
    pub bracket: u32,
    pub rung: usize,
}

impl TradeoffPoint {
    pub fn from_trial(t: &TrialRecord) -> Self {
        TradeoffPoint {
            accuracy: t.accuracy,
            fairness: t.fairness,
            config_id: t.config_id.clone(),
            budget_units: t.budget_units,
            bracket: t.bracket,
            rung: t.rung,
        }
    }

    /// At least as good on both axes and strictly better on one.
    pub fn dominates(&self, other: &TradeoffPoint) -> bool {
        self.accuracy >= other.accuracy
            && self.fairness >= other.fairness
            && (self.accuracy > other.accuracy || self.fairness > other.fairness)
    }
}

/// Indices of the non-dominated points, ordered by accuracy ascending (then
/// input index). Points with identical coordinates share their fate.
pub fn pareto_indices(points: &[TradeoffPoint]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    // accuracy descending, fairness descending
    order.sort_by(|&i, &j| {
        let (p, q) = (&points[i], &points[j]);
        q.accuracy.total_cmp(&p.accuracy).then(q.fairness.total_cmp(&p.fairness)).then(i.cmp(&j))
    });
    let mut keep = Vec::new();
    let mut best_f_above = f64::NEG_INFINITY;
    let mut start = 0;
    while start < order.len() {
        let a = points[order[start]].accuracy;
        let end = start + order[start..].iter().take_while(|&&k| points[k].accuracy == a).count();
        let group_f = points[order[start]].fairness;
        if group_f > best_f_above {
            keep.extend(order[start..end].iter().copied().filter(|&k| points[k].fairness == group_f));
        }
        best_f_above = best_f_above.max(group_f);
        start = end;
    }
    keep.sort_by(|&i, &j| points[i].accuracy.total_cmp(&points[j].accuracy).then(i.cmp(&j)));
    keep
}

/// The Pareto-optimal subset, sorted by accuracy ascending.
pub fn pareto_frontier(points: &[TradeoffPoint]) -> Vec<TradeoffPoint> {
    pareto_indices(points).into_iter().map(|i| points[i].clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RungDensity {
    pub trials: usize,
    pub on_frontier: usize,
}

impl RungDensity {
    pub fn density(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.on_frontier as f64 / self.trials as f64
        }
    }
}

fn ok_points(state: &SearchState) -> Vec<TradeoffPoint> {
    state.trials.iter().filter(|t| t.is_ok()).map(TradeoffPoint::from_trial).collect()
}

/// For every `(bracket, rung)`, how many of its successful trials lie on the
/// frontier of the whole run.
pub fn pareto_density_by_rung(state: &SearchState) -> BTreeMap<(u32, usize), RungDensity> {
    let points = ok_points(state);
    let mut on = vec![false; points.len()];
    for i in pareto_indices(&points) {
        on[i] = true;
    }
    let mut out: BTreeMap<(u32, usize), RungDensity> = BTreeMap::new();
    for (p, on_frontier) in points.iter().zip(on) {
        let e = out.entry((p.bracket, p.rung)).or_insert(RungDensity { trials: 0, on_frontier: 0 });
        e.trials += 1;
        e.on_frontier += usize::from(on_frontier);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontierReport {
    pub frontier: Vec<TradeoffPoint>,
    pub dominated_count: usize,
    pub density_by_rung: BTreeMap<(u32, usize), RungDensity>,
}

pub fn frontier_report(state: &SearchState) -> FrontierReport {
    let points = ok_points(state);
    let frontier = pareto_frontier(&points);
    FrontierReport {
        dominated_count: points.len() - frontier.len(),
        frontier,
        density_by_rung: pareto_density_by_rung(state),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricPair {
    pub accuracy: f64,
    pub fairness: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta {
    pub accuracy: f64,
    pub fairness: f64,
    /// Relative to the baseline value; `None` when that is zero.
    pub rel_accuracy: Option<f64>,
    pub rel_fairness: Option<f64>,
}

impl Delta {
    fn between(value: MetricPair, base: MetricPair) -> Self {
        let rel = |v: f64, b: f64| (b != 0.0).then(|| (v - b) / b);
        Delta {
            accuracy: value.accuracy - base.accuracy,
            fairness: value.fairness - base.fairness,
            rel_accuracy: rel(value.accuracy, base.accuracy),
            rel_fairness: rel(value.fairness, base.fairness),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub strategy: Strategy,
    pub config_id: String,
    pub validation: MetricPair,
    pub test: Option<MetricPair>,
    pub validation_delta: Delta,
    pub test_delta: Option<Delta>,
}

/// One row per run; the first run is the baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
}

/// Validation and test metrics of a run's selected model: the full-budget
/// refit when present, otherwise the winning trial itself.
pub fn selected_metrics(state: &SearchState) -> Option<(String, MetricPair, Option<MetricPair>)> {
    let sel = state.selection.as_ref()?;
    let pair = |a, f| MetricPair { accuracy: a, fairness: f };
    match &sel.refit {
        Some(r) => Some((
            sel.config_id.clone(),
            pair(r.validation.accuracy, r.validation.fairness),
            Some(pair(r.test.accuracy, r.test.fairness)),
        )),
        None => {
            let t = state.trials.get(sel.trial)?;
            Some((sel.config_id.clone(), pair(t.accuracy, t.fairness), None))
        }
    }
}

pub fn compare_runs(runs: &[(String, &SearchState)]) -> Result<Comparison, AnalysisError> {
    let (base_label, base_state) = runs.first().ok_or(AnalysisError::NoRuns)?;
    let (_, base_val, base_test) =
        selected_metrics(base_state).ok_or_else(|| AnalysisError::NoSelection(base_label.clone()))?;
    let mut rows = Vec::with_capacity(runs.len());
    for (label, state) in runs {
        let incompatible = |what| AnalysisError::Incompatible { baseline: base_label.clone(), other: label.clone(), what };
        if state.metric_spec != base_state.metric_spec {
            return Err(incompatible("metric specs"));
        }
        if state.dataset_fingerprint != base_state.dataset_fingerprint {
            return Err(incompatible("datasets"));
        }
        let (config_id, validation, test) =
            selected_metrics(state).ok_or_else(|| AnalysisError::NoSelection(label.clone()))?;
        let test_delta = match (test, base_test) {
            (Some(t), Some(b)) => Some(Delta::between(t, b)),
            _ => None,
        };
        rows.push(ComparisonRow {
            label: label.clone(),
            strategy: state.strategy,
            config_id,
            validation,
            test,
            validation_delta: Delta::between(validation, base_val),
            test_delta,
        });
    }
    Ok(Comparison { rows })
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.6}"))
}

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{:+.1}%", 100.0 * v))
}

impl Comparison {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), AnalysisError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "label", "strategy", "config_id",
            "val_accuracy", "val_fairness", "test_accuracy", "test_fairness",
            "val_delta_accuracy", "val_delta_fairness", "val_rel_accuracy", "val_rel_fairness",
            "test_delta_accuracy", "test_delta_fairness", "test_rel_accuracy", "test_rel_fairness",
        ])?;
        for r in &self.rows {
            let td = r.test_delta;
            w.write_record([
                r.label.clone(),
                r.strategy.to_string(),
                r.config_id.clone(),
                format!("{:.6}", r.validation.accuracy),
                format!("{:.6}", r.validation.fairness),
                opt(r.test.map(|t| t.accuracy)),
                opt(r.test.map(|t| t.fairness)),
                format!("{:.6}", r.validation_delta.accuracy),
                format!("{:.6}", r.validation_delta.fairness),
                opt(r.validation_delta.rel_accuracy),
                opt(r.validation_delta.rel_fairness),
                opt(td.map(|d| d.accuracy)),
                opt(td.map(|d| d.fairness)),
                opt(td.and_then(|d| d.rel_accuracy)),
                opt(td.and_then(|d| d.rel_fairness)),
            ])?;
        }
        w.flush().map_err(|source| AnalysisError::Io { path: "<csv>".into(), source })?;
        Ok(())
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<20} {:<8} {:>8} {:>8} {:>8} {:>8} {:>9} {:>9}",
            "run", "strategy", "val a", "val f", "test a", "test f", "rel Δa", "rel Δf"
        )?;
        for r in &self.rows {
            // test deltas when available, validation otherwise
            let d = r.test_delta.unwrap_or(r.validation_delta);
            let cell = |x: Option<f64>| x.map_or_else(|| "NA".to_string(), |v| format!("{v:.3}"));
            writeln!(
                f,
                "{:<20} {:<8} {:>8.3} {:>8.3} {:>8} {:>8} {:>9} {:>9}",
                r.label,
                r.strategy.name(),
                r.validation.accuracy,
                r.validation.fairness,
                cell(r.test.map(|t| t.accuracy)),
                cell(r.test.map(|t| t.fairness)),
                pct(d.rel_accuracy),
                pct(d.rel_fairness),
            )?;
        }
        Ok(())
    }
}

/// One line of the trial export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLine {
    pub schema_version: u32,
    pub strategy: Strategy,
    pub bracket: u32,
    pub rung: usize,
    pub config_id: String,
    pub budget_units: f64,
    pub alpha_used: f64,
    pub accuracy: f64,
    pub fairness: f64,
    pub objective: f64,
    pub threshold: f64,
    pub status: TrialStatus,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialLine {
    pub fn new(strategy: Strategy, t: &TrialRecord) -> Self {
        TrialLine {
            schema_version: SCHEMA_VERSION,
            strategy,
            bracket: t.bracket,
            rung: t.rung,
            config_id: t.config_id.clone(),
            budget_units: t.budget_units,
            alpha_used: t.alpha_used,
            accuracy: t.accuracy,
            fairness: t.fairness,
            objective: t.objective,
            threshold: t.threshold,
            status: t.status,
            seed: t.seed,
            error: t.error.clone(),
        }
    }

    pub fn into_record(self) -> TrialRecord {
        TrialRecord {
            config_id: self.config_id,
            bracket: self.bracket,
            rung: self.rung,
            budget_units: self.budget_units,
            accuracy: self.accuracy,
            fairness: self.fairness,
            alpha_used: self.alpha_used,
            objective: self.objective,
            threshold: self.threshold,
            status: self.status,
            seed: self.seed,
            error: self.error,
        }
    }
}

pub fn write_trials<W: Write>(state: &SearchState, mut out: W) -> Result<(), AnalysisError> {
    for t in &state.trials {
        serde_json::to_writer(&mut out, &TrialLine::new(state.strategy, t))?;
        out.write_all(b"\n").map_err(|source| AnalysisError::Io { path: TRIALS_FILE.into(), source })?;
    }
    Ok(())
}

pub fn read_trials<R: BufRead>(input: R) -> Result<Vec<TrialRecord>, AnalysisError> {
    let mut trials = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|source| AnalysisError::Io { path: TRIALS_FILE.into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: TrialLine = serde_json::from_str(&line).map_err(|e| AnalysisError::Corrupt {
            file: TRIALS_FILE.into(),
            line: i + 1,
            reason: e.to_string(),
        })?;
        if parsed.schema_version != SCHEMA_VERSION {
            return Err(AnalysisError::SchemaVersion(parsed.schema_version));
        }
        trials.push(parsed.into_record());
    }
    Ok(trials)
}

pub fn write_frontier_csv<W: Write>(frontier: &[TradeoffPoint], out: W) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["accuracy", "fairness", "config_id", "budget_units"])?;
    for p in frontier {
        w.write_record([
            p.accuracy.to_string(),
            p.fairness.to_string(),
            p.config_id.clone(),
            p.budget_units.to_string(),
        ])?;
    }
    w.flush().map_err(|source| AnalysisError::Io { path: FRONTIER_FILE.into(), source })?;
    Ok(())
}

pub fn write_density_csv<W: Write>(
    density: &BTreeMap<(u32, usize), RungDensity>,
    out: W,
) -> Result<(), AnalysisError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bracket", "rung", "trials", "on_frontier", "density"])?;
    for (&(s, i), d) in density {
        w.write_record([s.to_string(), i.to_string(), d.trials.to_string(), d.on_frontier.to_string(), d.density().to_string()])?;
    }
    w.flush().map_err(|source| AnalysisError::Io { path: DENSITY_FILE.into(), source })?;
    Ok(())
}

/// Human-readable run report.
pub fn summary(state: &SearchState) -> String {
    let mut s = String::new();
    let p = &state.params;
    let ok = state.trials.iter().filter(|t| t.is_ok()).count();
    let _ = writeln!(s, "strategy        {}", state.strategy);
    let _ = writeln!(s, "R / eta         {} / {}", p.max_budget, p.eta);
    let _ = writeln!(s, "alpha mode      {}", p.alpha);
    let _ = writeln!(s, "seed            {}", p.seed);
    let _ = writeln!(s, "trials          {} ({} ok, {} failed)", state.trials.len(), ok, state.trials.len() - ok);
    let _ = writeln!(s, "configurations  {}", state.configurations.len());
    let _ = writeln!(s, "budget consumed {:.2} units", state.consumed_budget());
    for a in &state.aborted {
        let _ = writeln!(s, "aborted bracket {}: {}", a.bracket, a.reason);
    }
    if let Some(sel) = &state.selection {
        let _ = writeln!(s, "selected        {} (selection alpha {:.4})", sel.config_id, sel.selection_alpha);
        if let Some(c) = state.configurations.get(&sel.config_id) {
            let _ = writeln!(s, "  model_type    {}", c.model_type);
            for (k, v) in &c.values {
                let _ = writeln!(s, "  {k:<13} {v}");
            }
        }
        if let Some(t) = state.trials.get(sel.trial) {
            let _ = writeln!(
                s,
                "  winning trial bracket {} rung {} budget {:.2}: a={:.4} f={:.4}",
                t.bracket, t.rung, t.budget_units, t.accuracy, t.fairness
            );
        }
        if sel.best_recorded_trial != sel.trial {
            if let Some(t) = state.trials.get(sel.best_recorded_trial) {
                let _ = writeln!(
                    s,
                    "  best recorded objective: {} (o={:.4}, a={:.4}, f={:.4})",
                    t.config_id, t.objective, t.accuracy, t.fairness
                );
            }
        }
        if let Some(r) = &sel.refit {
            let _ = writeln!(s, "  refit validation a={:.4} f={:.4}", r.validation.accuracy, r.validation.fairness);
            let _ = writeln!(s, "  refit test       a={:.4} f={:.4}", r.test.accuracy, r.test.fairness);
        }
    }
    s
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, AnalysisError> {
    fs::File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn finish(mut w: BufWriter<fs::File>, path: &Path) -> Result<(), AnalysisError> {
    w.flush().map_err(io_err(path))
}

/// Writes the trial stream, frontier, per-rung density, summary and the
/// remaining run state into `dir`.
pub fn export(state: &SearchState, dir: &Path) -> Result<(), AnalysisError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let path = dir.join(TRIALS_FILE);
    let mut w = create(&path)?;
    write_trials(state, &mut w)?;
    finish(w, &path)?;

    let report = frontier_report(state);
    let path = dir.join(FRONTIER_FILE);
    write_frontier_csv(&report.frontier, create(&path)?)?;
    let path = dir.join(DENSITY_FILE);
    write_density_csv(&report.density_by_rung, create(&path)?)?;

    let path = dir.join(SUMMARY_FILE);
    fs::write(&path, summary(state)).map_err(io_err(&path))?;

    // the trial list lives in trials.jsonl only
    let rest = SearchState { trials: Vec::new(), ..state.clone() };
    let path = dir.join(STATE_FILE);
    let mut w = create(&path)?;
    serde_json::to_writer_pretty(&mut w, &rest)?;
    w.write_all(b"\n").map_err(io_err(&path))?;
    finish(w, &path)
}

/// Reads back what [`export`] wrote.
pub fn import(dir: &Path) -> Result<SearchState, AnalysisError> {
    let path = dir.join(STATE_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let mut state: SearchState = serde_json::from_str(&text).map_err(|e| AnalysisError::Corrupt {
        file: STATE_FILE.into(),
        line: e.line(),
        reason: e.to_string(),
    })?;
    let path = dir.join(TRIALS_FILE);
    let file = fs::File::open(&path).map_err(io_err(&path))?;
    state.trials = read_trials(BufReader::new(file))?;
    Ok(state)
}
