use super::{argmax, check_len, SelectionResult, Step, StopReason};
use crate::bounds::{self, INITIAL_EPS};
use crate::error::Result;
use crate::hypotheses::{ExampleSource, SuccessVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsParams {
    pub delta: f64,
    pub c: f64,
}

/// Running state of adaptive selection. Only per-hypothesis success counts
/// of the collected sample are kept.
#[derive(Debug, Clone)]
pub struct AsState {
    t: u64,
    counts: Vec<u64>,
    eps: f64,
    warmup: u64,
    // 4 ln(3n/delta) / c, so that eps_t = sqrt(eps_scale / t)
    eps_scale: f64,
}

impl AsState {
    pub fn new(n: usize, params: &AsParams) -> Result<Self> {
        let warmup = bounds::as_warmup(n, params.delta, params.c)?;
        let eps_scale = 4.0 * (3.0 * n as f64 / params.delta).ln() / params.c;
        Ok(AsState {
            t: 0,
            counts: vec![0; n],
            eps: INITIAL_EPS,
            warmup,
            eps_scale,
        })
    }

    /// Adds one example. The stopping rule (some count above
    /// `t/2 + 5 t eps_t / 2`) cannot hold before the warm-up, where
    /// `eps_t > 1/5`, so it is only evaluated from then on.
    pub fn step(&mut self, v: &SuccessVector) -> Result<Step> {
        check_len(self.counts.len(), v)?;
        self.t += 1;
        for (c, &ok) in self.counts.iter_mut().zip(v.bits()) {
            *c += ok as u64;
        }
        let t = self.t as f64;
        self.eps = (self.eps_scale / t).sqrt();
        if self.t < self.warmup {
            return Ok(Step::Continue);
        }
        let bar = t / 2.0 + 5.0 * t * self.eps / 2.0;
        if self.counts.iter().any(|&c| c as f64 > bar) {
            Ok(Step::Done(self.leader()))
        } else {
            Ok(Step::Continue)
        }
    }

    pub fn leader(&self) -> usize {
        argmax(&self.counts)
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn warmup(&self) -> u64 {
        self.warmup
    }
}

pub fn as_run<S: ExampleSource + ?Sized>(
    source: &mut S,
    params: &AsParams,
) -> Result<SelectionResult> {
    let mut state = AsState::new(source.n(), params)?;
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
        final_eps: Some(state.eps()),
        final_weights: None,
        stop_reason,
    })
}
