//! Hyperband bracket arithmetic.

use serde::{Deserialize, Serialize};

use super::EngineError;

// absorbs float noise in η^s products before floor/ceil
const ROUNDING_SLACK: f64 = 1e-9;

/// `⌊log_η R⌋`, computed without trusting `ln(R)/ln(η)` near integers.
pub fn max_bracket(max_budget: f64, eta: f64) -> u32 {
    let mut s = 0u32;
    while eta.powi(s as i32 + 1) <= max_budget * (1.0 + 1e-12) {
        s += 1;
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub index: usize,
    /// Configurations trained in this rung.
    pub n: usize,
    /// Budget units per configuration.
    pub budget: f64,
    /// Configurations promoted to the next rung.
    pub keep: usize,
}

/// One successive-halving run: `n` configurations starting at `r` units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketPlan {
    pub s: u32,
    pub n: usize,
    pub r: f64,
    pub rungs: Vec<Rung>,
}

impl BracketPlan {
    pub fn models_trained(&self) -> usize {
        self.rungs.iter().map(|r| r.n).sum()
    }

    pub fn budget_consumed(&self) -> f64 {
        self.rungs.iter().map(|r| r.n as f64 * r.budget).sum()
    }
}

pub fn validate_params(max_budget: f64, eta: f64) -> Result<(), EngineError> {
    if !(max_budget.is_finite() && max_budget >= 1.0) {
        return Err(EngineError::InvalidParams(format!("R must be >= 1, got {max_budget}")));
    }
    if !(eta.is_finite() && eta > 1.0) {
        return Err(EngineError::InvalidParams(format!("eta must be > 1, got {eta}")));
    }
    Ok(())
}

/// Brackets `s = s_max..=0` with
/// `n = ⌈(B/R)·η^s/(s+1)⌉`, `r = R·η^-s`, `n_i = ⌊n·η^-i⌋`, `r_i = r·η^i`
/// and `k_i = ⌊n_i/η⌋`, where `B = (s_max+1)·R`.
pub fn bracket_schedule(max_budget: f64, eta: f64) -> Result<Vec<BracketPlan>, EngineError> {
    validate_params(max_budget, eta)?;
    let s_max = max_bracket(max_budget, eta);
    let brackets_per_budget = (s_max + 1) as f64; // B / R
    Ok((0..=s_max)
        .rev()
        .map(|s| {
            let n = (brackets_per_budget * eta.powi(s as i32) / (s + 1) as f64 - ROUNDING_SLACK).ceil() as usize;
            let r = max_budget * eta.powi(-(s as i32));
            let rungs = (0..=s as usize)
                .map(|i| {
                    let n_i = (n as f64 * eta.powi(-(i as i32)) + ROUNDING_SLACK).floor() as usize;
                    Rung {
                        index: i,
                        n: n_i,
                        // r·η^i, written so the last rung lands exactly on R
                        budget: max_budget * eta.powi(i as i32 - s as i32),
                        keep: (n_i as f64 / eta + ROUNDING_SLACK).floor() as usize,
                    }
                })
                .collect();
            BracketPlan { s, n, r, rungs }
        })
        .collect())
}
