use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use fairband::analysis::{self, compare_runs, frontier_report, write_density_csv, write_frontier_csv, Comparison};
use fairband::engine::{bracket_schedule, max_bracket, BracketPlan};

use crate::config::{Overrides, RunConfig};
use crate::pipeline;

pub fn schedule_table(r: f64, eta: f64) -> Result<String> {
    let plans = bracket_schedule(r, eta)?;
    let mut out = String::new();
    writeln!(out, "R = {r}, eta = {eta}, s_max = {}, B = {}", max_bracket(r, eta), (max_bracket(r, eta) + 1) as f64 * r)?;
    writeln!(out, "{:>3} {:>3} {:>6} {:>10} {:>6}", "s", "i", "n_i", "r_i", "keep")?;
    for plan in &plans {
        for rung in &plan.rungs {
            writeln!(out, "{:>3} {:>3} {:>6} {:>10.2} {:>6}", plan.s, rung.index, rung.n, rung.budget, rung.keep)?;
        }
    }
    let configs: usize = plans.iter().map(|p| p.n).sum();
    let models: usize = plans.iter().map(BracketPlan::models_trained).sum();
    let budget: f64 = plans.iter().map(BracketPlan::budget_consumed).sum();
    writeln!(out, "configurations {configs}, models {models}, budget {budget:.2} units")?;
    Ok(out)
}

pub fn run(config: &Path, overrides: &Overrides) -> Result<String> {
    let mut cfg = RunConfig::load(config)?;
    cfg.apply(overrides);
    let state = pipeline::run(&cfg)?;
    let mut out = analysis::summary(&state);
    writeln!(out, "artifacts       {}", cfg.output_dir.display())?;
    Ok(out)
}

fn load_runs(dirs: &[PathBuf]) -> Result<Vec<(String, fairband::engine::SearchState)>> {
    dirs.iter()
        .map(|d| {
            let state = analysis::import(d).with_context(|| format!("reading run {}", d.display()))?;
            Ok((d.display().to_string(), state))
        })
        .collect()
}

pub fn compare(dirs: &[PathBuf], out_dir: &Path) -> Result<Comparison> {
    anyhow::ensure!(dirs.len() >= 2, "compare needs at least two run directories");
    let runs = load_runs(dirs)?;
    let refs: Vec<(String, &fairband::engine::SearchState)> = runs.iter().map(|(l, s)| (l.clone(), s)).collect();
    let table = compare_runs(&refs)?;
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join("comparison.csv");
    table.write_csv(fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?)?;
    Ok(table)
}

/// Writes `frontier.csv` and `density.csv` into `out_dir` and returns the
/// density table as text.
pub fn pareto(run_dir: &Path, out_dir: &Path) -> Result<String> {
    let state = analysis::import(run_dir).with_context(|| format!("reading run {}", run_dir.display()))?;
    let report = frontier_report(&state);
    fs::create_dir_all(out_dir)?;
    let create = |name: &str| {
        let path = out_dir.join(name);
        fs::File::create(&path).with_context(|| format!("creating {}", path.display()))
    };
    write_frontier_csv(&report.frontier, create(analysis::FRONTIER_FILE)?)?;
    write_density_csv(&report.density_by_rung, create(analysis::DENSITY_FILE)?)?;
    let mut out = String::new();
    writeln!(out, "frontier: {} points, {} dominated", report.frontier.len(), report.dominated_count)?;
    writeln!(out, "{:>3} {:>3} {:>7} {:>9} {:>8}", "s", "i", "trials", "frontier", "density")?;
    for (&(s, i), d) in &report.density_by_rung {
        writeln!(out, "{s:>3} {i:>3} {:>7} {:>9} {:>8.3}", d.trials, d.on_frontier, d.density())?;
    }
    Ok(out)
}
