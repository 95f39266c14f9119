//! Batch, constrained and adaptive selection.
//!
//! The two on-line algorithms are step-wise state machines fed one
//! [`SuccessVector`] at a time; the `*_run` drivers pull from an
//! [`ExampleSource`] until a stopping rule fires or the source runs dry.

mod adaptive;
mod batch;
mod constrained;

pub use adaptive::{as_run, AsParams, AsState};
pub use batch::bs_run;
pub use constrained::{cs_run, CsParams, CsState, DecMode};

use crate::error::{Error, Result};
use crate::hypotheses::SuccessVector;

/// Outcome of feeding one example to a selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Continue,
    Done(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// The algorithm's own stopping rule fired (or the batch was complete).
    Threshold,
    /// The source ended first.
    Exhausted,
}

impl std::fmt::Display for StopReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StopReason::Threshold => "threshold",
            StopReason::Exhausted => "exhausted",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub chosen: usize,
    /// Examples consumed.
    pub steps: u64,
    /// Adaptive selection's tolerance when it stopped.
    pub final_eps: Option<f64>,
    /// Constrained selection's weights when it stopped.
    pub final_weights: Option<Vec<f64>>,
    pub stop_reason: StopReason,
}

/// Index of the largest value; the lowest index wins ties.
pub fn argmax<T: PartialOrd + Copy>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

fn check_len(expected: usize, v: &SuccessVector) -> Result<()> {
    if v.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            got: v.len(),
        });
    }
    Ok(())
}
