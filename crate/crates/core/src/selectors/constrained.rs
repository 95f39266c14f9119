use serde::{Deserialize, Serialize};

use super::{argmax, check_len, SelectionResult, Step, StopReason};
use crate::bounds::{self, BVariant};
use crate::error::{Error, Result};
use crate::hypotheses::{ExampleSource, SuccessVector};

/// How much every weight is decremented per round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecMode {
    /// `n'/n`, the fraction of hypotheses correct this round.
    #[default]
    Variable,
    /// Constant 1/2, so that `w(h) = #_t(h) - t/2`.
    Fixed,
}

impl std::fmt::Display for DecMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecMode::Variable => "variable",
            DecMode::Fixed => "fixed",
        })
    }
}

/// Running state of constrained selection.
///
/// Weights are kept as integers `W(h) = scale * w(h)`: `scale = n` in
/// variable mode (each round adds `n - n'` to the `n'` correct hypotheses and
/// subtracts `n'` from the others) and `scale = 2` in fixed mode (each round
/// adds or subtracts 1). The threshold comparison happens once per step
/// against `scale * B`.
#[derive(Debug, Clone)]
pub struct CsState {
    t: u64,
    counts: Vec<u64>,
    scaled: Vec<i64>,
    scale: i64,
    threshold: f64,
    scaled_threshold: f64,
    dec_mode: DecMode,
}

impl CsState {
    pub fn new(n: usize, threshold: f64, dec_mode: DecMode) -> Result<Self> {
        bounds::check_n(n)?;
        if !(threshold > 0.0 && threshold.is_finite()) {
            return Err(Error::param(
                "threshold",
                format!("{threshold} is not positive"),
            ));
        }
        let scale = match dec_mode {
            DecMode::Variable => n as i64,
            DecMode::Fixed => 2,
        };
        Ok(CsState {
            t: 0,
            counts: vec![0; n],
            scaled: vec![0; n],
            scale,
            threshold,
            scaled_threshold: threshold * scale as f64,
            dec_mode,
        })
    }

    pub fn step(&mut self, v: &SuccessVector) -> Result<Step> {
        let n = self.counts.len();
        check_len(n, v)?;
        self.t += 1;
        let (gain, loss) = match self.dec_mode {
            DecMode::Variable => {
                let correct = v.successes() as i64;
                (n as i64 - correct, correct)
            }
            DecMode::Fixed => (1, 1),
        };
        for ((c, w), &ok) in self.counts.iter_mut().zip(&mut self.scaled).zip(v.bits()) {
            if ok {
                *c += 1;
                *w += gain;
            } else {
                *w -= loss;
            }
        }
        if self
            .scaled
            .iter()
            .any(|&w| w as f64 >= self.scaled_threshold)
        {
            Ok(Step::Done(self.leader()))
        } else {
            Ok(Step::Continue)
        }
    }

    /// Hypothesis with the largest weight, lowest id on ties.
    pub fn leader(&self) -> usize {
        argmax(&self.scaled)
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn scaled_weights(&self) -> &[i64] {
        &self.scaled
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn dec_mode(&self) -> DecMode {
        self.dec_mode
    }

    pub fn weight(&self, h: usize) -> f64 {
        self.scaled[h] as f64 / self.scale as f64
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.scaled.len()).map(|h| self.weight(h)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsParams {
    pub delta: f64,
    pub gamma: f64,
    pub c: f64,
    pub dec_mode: DecMode,
    pub b_variant: BVariant,
}

impl CsParams {
    pub fn threshold(&self, n: usize) -> Result<f64> {
        bounds::threshold_b(n, self.delta, self.gamma, self.c, self.b_variant)
    }
}

pub fn cs_run<S: ExampleSource + ?Sized>(
    source: &mut S,
    params: &CsParams,
) -> Result<SelectionResult> {
    let n = source.n();
    let mut state = CsState::new(n, params.threshold(n)?, params.dec_mode)?;
    let mut stop_reason = StopReason::Exhausted;
    while let Some(v) = source.next_vector() {
        if let Step::Done(_) = state.step(v)? {
            stop_reason = StopReason::Threshold;
            break;
        }
    }
    Ok(SelectionResult {
        chosen: state.leader(),
        steps: state.t(),
        final_eps: None,
        final_weights: Some(state.weights()),
        stop_reason,
    })
}
