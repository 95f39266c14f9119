//! Empirical search for the largest Hoeffding constant an algorithm
//! tolerates without mistakes.
//!
//! A larger constant shrinks every sample size, so the grid is walked from
//! its smallest (safest) value upwards and the walk ends at the first value
//! producing a mistake. Every candidate reuses the same trial seeds.

use super::{run_trials, ExperimentConfig};
use crate::bounds::ConstantGrid;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationPoint {
    pub c: f64,
    pub mistakes: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationOutcome {
    /// Largest constant reached with zero mistakes; `None` when the grid
    /// minimum already fails.
    pub safe_c: Option<f64>,
    /// Every constant evaluated, ascending; only the last may have mistakes.
    pub trace: Vec<CalibrationPoint>,
}

pub fn calibrate_optimal_c(
    template: &ExperimentConfig,
    grid: ConstantGrid,
) -> Result<CalibrationOutcome> {
    let mut trace = Vec::new();
    let mut safe_c = None;
    for c in grid.values() {
        let mut cfg = template.clone();
        cfg.c = c;
        let table = run_trials(&cfg)?;
        let mistakes = table.trials.iter().filter(|t| t.mistake).count();
        trace.push(CalibrationPoint { c, mistakes });
        if mistakes > 0 {
            break;
        }
        safe_c = Some(c);
    }
    Ok(CalibrationOutcome { safe_c, trace })
}

/// Per-margin outcomes plus the constant safe at every margin.
pub type MarginCalibration = (Vec<(f64, CalibrationOutcome)>, Option<f64>);

/// Calibrates each best margin separately. The second value is the largest
/// constant that is safe at every margin, i.e. the minimum of the per-margin
/// results (`None` if any margin fails at the grid minimum).
pub fn calibrate_over_gamma0(
    template: &ExperimentConfig,
    gamma0_grid: &[f64],
    grid: ConstantGrid,
) -> Result<MarginCalibration> {
    let mut rows = Vec::new();
    for &gamma0 in gamma0_grid {
        let mut cfg = template.clone();
        cfg.gamma0 = Some(gamma0);
        rows.push((gamma0, calibrate_optimal_c(&cfg, grid)?));
    }
    let global = rows
        .iter()
        .map(|(_, o)| o.safe_c)
        .try_fold(f64::INFINITY, |acc, c| c.map(|c| acc.min(c)));
    Ok((rows, global))
}
