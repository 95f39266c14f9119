//! Parameter sweeps and the dec-mode / final-tolerance studies.

use super::{run_trials, AggregateResult, Algorithm, ExperimentConfig};
use crate::error::{Error, Result};
use crate::hypotheses::Distribution;
use crate::selectors::DecMode;

/// Inclusive arithmetic grid `from, from + step, ..., <= to`, with values
/// rounded to 12 decimals so that e.g. 0.04 + 16 * 0.004 prints as 0.104.
pub fn linear_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>> {
    if !(from.is_finite() && to.is_finite()) || to < from {
        return Err(Error::param(
            "to",
            format!("grid end {to} is before its start {from}"),
        ));
    }
    if from == to {
        return Ok(vec![from]);
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("step", format!("{step} is not positive")));
    }
    let count = ((to - from) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((from + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Best margin, with `gamma = gamma0` unless the template fixes gamma.
    Gamma0,
    /// Lower bound `gamma` at the template's fixed `gamma0`.
    Gamma,
}

impl std::fmt::Display for SweepParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SweepParam::Gamma0 => "gamma0",
            SweepParam::Gamma => "gamma",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub algorithm: Algorithm,
    pub aggregate: AggregateResult,
}

/// One row per (grid value, algorithm), ordered by grid value then by the
/// order of `algorithms`.
pub fn sweep(
    template: &ExperimentConfig,
    param: SweepParam,
    grid: &[f64],
    algorithms: &[Algorithm],
) -> Result<Vec<SweepRow>> {
    // Validate the whole grid before spending time on any trial.
    let configs: Vec<(f64, ExperimentConfig)> = grid
        .iter()
        .flat_map(|&value| algorithms.iter().map(move |&a| (value, a)))
        .map(|(value, algorithm)| {
            let mut cfg = template.clone();
            cfg.algorithm = algorithm;
            match param {
                SweepParam::Gamma0 => cfg.gamma0 = Some(value),
                SweepParam::Gamma => cfg.gamma = Some(value),
            }
            cfg.validate()?;
            Ok((value, cfg))
        })
        .collect::<Result<_>>()?;
    configs
        .into_iter()
        .map(|(param, cfg)| {
            Ok(SweepRow {
                param,
                algorithm: cfg.algorithm,
                aggregate: run_trials(&cfg)?.aggregate,
            })
        })
        .collect()
}

pub fn sweep_gamma0(template: &ExperimentConfig, grid: &[f64]) -> Result<Vec<SweepRow>> {
    sweep(template, SweepParam::Gamma0, grid, &[template.algorithm])
}

/// Sweeps the lower bound at fixed `gamma0`; every value must not exceed it.
pub fn sweep_gamma(
    template: &ExperimentConfig,
    grid: &[f64],
    algorithms: &[Algorithm],
) -> Result<Vec<SweepRow>> {
    sweep(template, SweepParam::Gamma, grid, algorithms)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecRatioRow {
    pub distribution: Distribution,
    pub gamma0: f64,
    pub dec_mode: DecMode,
    pub mean_steps: f64,
    /// Mean of `steps / (B / gamma0)`.
    pub mean_ratio: f64,
}

/// Constrained selection's step count relative to `B / gamma0`, for both
/// decrement modes, per accuracy distribution and best margin.
pub fn dec_ratio_study(
    template: &ExperimentConfig,
    gamma0_grid: &[f64],
    distributions: &[Distribution],
) -> Result<Vec<DecRatioRow>> {
    let mut rows = Vec::new();
    for &distribution in distributions {
        for &gamma0 in gamma0_grid {
            for dec_mode in [DecMode::Variable, DecMode::Fixed] {
                let mut cfg = template.clone();
                cfg.algorithm = Algorithm::Cs;
                cfg.distribution = distribution;
                cfg.gamma0 = Some(gamma0);
                cfg.dec_mode = dec_mode;
                let agg = run_trials(&cfg)?.aggregate;
                rows.push(DecRatioRow {
                    distribution,
                    gamma0,
                    dec_mode,
                    mean_steps: agg.mean_steps,
                    mean_ratio: agg.mean_ratio.expect("constrained runs report a ratio"),
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinalEpsRow {
    pub gamma0: f64,
    pub mean_steps: f64,
    pub mean_final_eps: f64,
    /// Mean of `gamma0 / final_eps`.
    pub mean_gamma0_over_eps: f64,
    pub error_rate: f64,
}

/// Adaptive selection's tolerance at stopping time across best margins.
pub fn final_eps_study(
    template: &ExperimentConfig,
    gamma0_grid: &[f64],
) -> Result<Vec<FinalEpsRow>> {
    let mut cfg = template.clone();
    cfg.algorithm = Algorithm::As;
    sweep_gamma0(&cfg, gamma0_grid)?
        .into_iter()
        .map(|row| {
            let a = row.aggregate;
            Ok(FinalEpsRow {
                gamma0: row.param,
                mean_steps: a.mean_steps,
                mean_final_eps: a.mean_final_eps.expect("adaptive runs report eps"),
                mean_gamma0_over_eps: a.mean_gamma0_over_eps.expect("adaptive runs report eps"),
                error_rate: a.error_rate,
            })
        })
        .collect()
}
