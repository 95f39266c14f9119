//! Seeded Monte Carlo trials over synthetic hypothesis classes.
//!
//! Trial `i` of an experiment is driven entirely by
//! `trial_seed(base_seed, i)`: the success patterns and the example indices
//! come from one ChaCha8 stream seeded with it. Trials are collected into
//! indexed slots, so the worker count never changes the output.

mod calibrate;
mod config;
mod studies;

pub use calibrate::{
    calibrate_optimal_c, calibrate_over_gamma0, CalibrationOutcome, CalibrationPoint,
    MarginCalibration,
};
pub use config::{Algorithm, ConfigFile, ExperimentConfig};
pub use studies::{
    dec_ratio_study, final_eps_study, linear_grid, sweep, sweep_gamma, sweep_gamma0, DecRatioRow,
    FinalEpsRow, SweepParam, SweepRow,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds;
use crate::error::{Error, Result};
use crate::hypotheses::{realize_class, HypothesisClass, PatternSource};
use crate::selectors::{as_run, bs_run, cs_run, AsParams, CsParams, SelectionResult};

/// Trial index reserved for the shared patterns of `fixed_patterns` runs.
const SHARED_PATTERN_STREAM: u64 = u64::MAX;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index`: `splitmix64(base ^ splitmix64(index))`.
pub fn trial_seed(base_seed: u64, index: u64) -> u64 {
    splitmix64(base_seed ^ splitmix64(index))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub trial_index: usize,
    pub seed: u64,
    pub chosen: usize,
    pub steps: u64,
    /// The chosen hypothesis's realized accuracy is below `1/2 + gamma0/2`.
    pub mistake: bool,
    pub final_eps: Option<f64>,
    /// `steps / (B / gamma0)` for constrained selection.
    pub ratio: Option<f64>,
    /// Realized best margin of the trial's class.
    pub gamma0: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub runs: usize,
    pub mean_steps: f64,
    /// Sample standard deviation; 0 for a single run.
    pub stddev_steps: f64,
    pub error_rate: f64,
    pub mean_final_eps: Option<f64>,
    /// Mean of `gamma0 / final_eps` over runs.
    pub mean_gamma0_over_eps: Option<f64>,
    pub mean_ratio: Option<f64>,
}

impl AggregateResult {
    pub fn from_trials(trials: &[TrialResult]) -> Self {
        let runs = trials.len();
        let nf = runs as f64;
        let mean_steps = trials.iter().map(|t| t.steps as f64).sum::<f64>() / nf;
        let stddev_steps = if runs > 1 {
            let ss: f64 = trials
                .iter()
                .map(|t| (t.steps as f64 - mean_steps).powi(2))
                .sum();
            (ss / (nf - 1.0)).sqrt()
        } else {
            0.0
        };
        let mistakes = trials.iter().filter(|t| t.mistake).count();
        let mean_of = |f: &dyn Fn(&TrialResult) -> Option<f64>| -> Option<f64> {
            let vals: Option<Vec<f64>> = trials.iter().map(f).collect();
            vals.filter(|v| !v.is_empty())
                .map(|v| v.iter().sum::<f64>() / v.len() as f64)
        };
        AggregateResult {
            runs,
            mean_steps,
            stddev_steps,
            error_rate: mistakes as f64 / nf,
            mean_final_eps: mean_of(&|t| t.final_eps),
            mean_gamma0_over_eps: mean_of(&|t| t.final_eps.map(|e| t.gamma0 / e)),
            mean_ratio: mean_of(&|t| t.ratio),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialTable {
    pub trials: Vec<TrialResult>,
    pub aggregate: AggregateResult,
}

/// Runs `config.runs` independent seeded trials.
pub fn run_trials(config: &ExperimentConfig) -> Result<TrialTable> {
    let class = config.validate()?;
    let shared = if config.fixed_patterns {
        let mut rng =
            ChaCha8Rng::seed_from_u64(trial_seed(config.base_seed, SHARED_PATTERN_STREAM));
        Some(realize_class(&class, &mut rng)?)
    } else {
        None
    };
    let one = |i: usize| run_trial(config, &class, shared.as_ref(), i);
    let trials: Vec<TrialResult> = if config.jobs == 1 {
        (0..config.runs).map(one).collect::<Result<_>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::param("jobs", e.to_string()))?;
        pool.install(|| {
            (0..config.runs)
                .into_par_iter()
                .map(one)
                .collect::<Result<_>>()
        })?
    };
    let aggregate = AggregateResult::from_trials(&trials);
    Ok(TrialTable { trials, aggregate })
}

fn run_trial(
    config: &ExperimentConfig,
    class: &HypothesisClass,
    shared: Option<&(HypothesisClass, Vec<crate::hypotheses::SuccessPattern>)>,
    index: usize,
) -> Result<TrialResult> {
    let seed = trial_seed(config.base_seed, index as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (effective, patterns) = match shared {
        Some((effective, patterns)) => (effective.clone(), patterns.clone()),
        None => realize_class(class, &mut rng)?,
    };
    let mut source = PatternSource::for_class(&effective, &patterns, rng)?;
    let gamma = config.effective_gamma(class);
    let n = class.n();
    let mut ratio = None;
    let result: SelectionResult = match config.algorithm {
        Algorithm::Bs => {
            let m = bounds::sample_size_bs(n, config.delta, gamma, config.c)?;
            bs_run(&mut source, m)?
        }
        Algorithm::Cs => {
            let params = CsParams {
                delta: config.delta,
                gamma,
                c: config.c,
                dec_mode: config.dec_mode,
                b_variant: config.b_variant,
            };
            let r = cs_run(&mut source, &params)?;
            let b = params.threshold(n)?;
            ratio = Some(r.steps as f64 / (b / effective.gamma0()));
            r
        }
        Algorithm::As => as_run(
            &mut source,
            &AsParams {
                delta: config.delta,
                c: config.c,
            },
        )?,
    };
    Ok(TrialResult {
        trial_index: index,
        seed,
        chosen: result.chosen,
        steps: result.steps,
        mistake: !effective.is_good(result.chosen),
        final_eps: result.final_eps,
        ratio,
        gamma0: effective.gamma0(),
    })
}
