//! Hypothesis classes, success patterns and example sources.
//!
//! A hypothesis is modeled only through its accuracy. The simulation realizes
//! each accuracy as a fixed 1000-bit success pattern; one uniformly drawn
//! index per round, shared by every hypothesis, plays the role of the example.

mod io;
mod source;

pub use io::{
    parse_class_file, parse_matrix_csv, read_class_file, read_matrix_csv, write_matrix_csv,
};
pub use source::{ExampleSource, Limited, MatrixSource, PatternSource};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Length of every success pattern.
pub const PATTERN_LEN: usize = 1000;

/// Slack used when comparing an accuracy against the partition threshold, so
/// that `0.5 + 0.2/2` and a quantized `0.6` land on the same side.
const BOUNDARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSpec {
    pub id: usize,
    pub accuracy: f64,
}

impl HypothesisSpec {
    /// Advantage over random guessing, `accuracy - 1/2`.
    pub fn margin(&self) -> f64 {
        self.accuracy - 0.5
    }
}

/// Shape of the accuracy distribution in the built-in 18-hypothesis classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Distribution {
    /// Two hypotheses at each of `±gamma0 * {0, 1/4, 1/2, 3/4, 1}`.
    #[default]
    Symmetric,
    /// Two hypotheses at each of `gamma0 * {0, 1/8, ..., 1}`.
    Positive,
    /// Two hypotheses at each of `-gamma0 * {1/8, ..., 1}`, plus two at `+gamma0`.
    Negative,
}

impl std::fmt::Display for Distribution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Distribution::Symmetric => "symmetric",
            Distribution::Positive => "positive",
            Distribution::Negative => "negative",
        })
    }
}

/// A finite set of hypotheses with a best hypothesis strictly better than
/// random guessing.
#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisClass {
    hypotheses: Vec<HypothesisSpec>,
    gamma0: f64,
}

impl HypothesisClass {
    /// Builds a class from accuracies listed in id order.
    pub fn from_accuracies(accuracies: &[f64]) -> Result<Self> {
        if accuracies.is_empty() {
            return Err(Error::param(
                "n",
                "a hypothesis class needs at least one hypothesis",
            ));
        }
        for (id, &a) in accuracies.iter().enumerate() {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::param(
                    "accuracy",
                    format!("hypothesis {id} has accuracy {a}, outside (0, 1)"),
                ));
            }
        }
        let best = accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let gamma0 = best - 0.5;
        if gamma0 <= 0.0 {
            return Err(Error::param("accuracy", "no hypothesis is better than 1/2"));
        }
        let hypotheses = accuracies
            .iter()
            .enumerate()
            .map(|(id, &accuracy)| HypothesisSpec { id, accuracy })
            .collect();
        Ok(HypothesisClass { hypotheses, gamma0 })
    }

    /// Replaces the best margin used for partitioning. The override may only
    /// shrink it, which keeps the best hypothesis in the good set.
    pub fn with_gamma0(mut self, gamma0: f64) -> Result<Self> {
        let actual = self.best_accuracy() - 0.5;
        if !(gamma0 > 0.0 && gamma0 <= actual + BOUNDARY_SLACK) {
            return Err(Error::param(
                "gamma0",
                format!("override {gamma0} must lie in (0, {actual}]"),
            ));
        }
        self.gamma0 = gamma0;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn hypotheses(&self) -> &[HypothesisSpec] {
        &self.hypotheses
    }

    pub fn accuracies(&self) -> Vec<f64> {
        self.hypotheses.iter().map(|h| h.accuracy).collect()
    }

    pub fn best_accuracy(&self) -> f64 {
        self.hypotheses
            .iter()
            .map(|h| h.accuracy)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Accuracy at or above which a hypothesis counts as a good choice.
    pub fn good_threshold(&self) -> f64 {
        0.5 + self.gamma0 / 2.0
    }

    pub fn is_good(&self, id: usize) -> bool {
        self.hypotheses[id].accuracy >= self.good_threshold() - BOUNDARY_SLACK
    }

    /// Splits ids into the good set (accuracy at least `1/2 + gamma0/2`) and
    /// the rest.
    pub fn partition(&self) -> (Vec<usize>, Vec<usize>) {
        (0..self.n()).partition(|&id| self.is_good(id))
    }
}

pub fn partition(class: &HypothesisClass) -> (Vec<usize>, Vec<usize>) {
    class.partition()
}

fn check_builtin_gamma0(gamma0: f64) -> Result<()> {
    if !(gamma0 > 0.0 && gamma0 <= 0.3 + 1e-12) {
        return Err(Error::param(
            "gamma0",
            format!("{gamma0} is not in (0, 0.3]"),
        ));
    }
    Ok(())
}

fn paired_class(offsets: impl IntoIterator<Item = f64>) -> Result<HypothesisClass> {
    let accuracies: Vec<f64> = offsets
        .into_iter()
        .flat_map(|o| [0.5 + o, 0.5 + o])
        .collect();
    HypothesisClass::from_accuracies(&accuracies)
}

/// 18 hypotheses, two at each offset `gamma0 * k/4` for `k = -4..=4`.
pub fn symmetric_class(gamma0: f64) -> Result<HypothesisClass> {
    check_builtin_gamma0(gamma0)?;
    paired_class((-4..=4).map(|k| gamma0 * k as f64 / 4.0))
}

/// 18 hypotheses skewed above (`Positive`) or below (`Negative`) 1/2 with
/// the best margin kept at `gamma0`.
pub fn biased_class(gamma0: f64, bias: Distribution) -> Result<HypothesisClass> {
    check_builtin_gamma0(gamma0)?;
    match bias {
        Distribution::Symmetric => symmetric_class(gamma0),
        Distribution::Positive => paired_class((0..=8).map(|k| gamma0 * k as f64 / 8.0)),
        Distribution::Negative => paired_class(
            (-8..=-1)
                .map(|k| gamma0 * k as f64 / 8.0)
                .chain(std::iter::once(gamma0)),
        ),
    }
}

pub fn builtin_class(gamma0: f64, distribution: Distribution) -> Result<HypothesisClass> {
    biased_class(gamma0, distribution)
}

/// A 0/1 string whose density is a hypothesis's (quantized) accuracy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuccessPattern {
    bits: Vec<bool>,
    ones: usize,
}

impl SuccessPattern {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let ones = bits.iter().filter(|&&b| b).count();
        SuccessPattern { bits, ones }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.ones
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Fraction of ones; the accuracy the simulation actually realizes.
    pub fn accuracy(&self) -> f64 {
        self.ones as f64 / self.bits.len() as f64
    }
}

/// Number of ones a pattern for `accuracy` carries. Kept within
/// `1..PATTERN_LEN` so the realized accuracy stays strictly inside (0, 1).
pub fn quantized_ones(accuracy: f64) -> usize {
    ((accuracy * PATTERN_LEN as f64).round() as usize).clamp(1, PATTERN_LEN - 1)
}

pub fn quantize(accuracy: f64) -> f64 {
    quantized_ones(accuracy) as f64 / PATTERN_LEN as f64
}

/// Exactly `round(1000 * accuracy)` ones at uniformly shuffled positions.
pub fn make_pattern<R: Rng + ?Sized>(accuracy: f64, rng: &mut R) -> SuccessPattern {
    let ones = quantized_ones(accuracy);
    let mut bits = vec![false; PATTERN_LEN];
    bits[..ones].iter_mut().for_each(|b| *b = true);
    bits.shuffle(rng);
    SuccessPattern { bits, ones }
}

/// Draws one pattern per hypothesis and returns them with the class
/// re-expressed in the accuracies the patterns realize.
pub fn realize_class<R: Rng + ?Sized>(
    class: &HypothesisClass,
    rng: &mut R,
) -> Result<(HypothesisClass, Vec<SuccessPattern>)> {
    let patterns: Vec<SuccessPattern> = class
        .hypotheses()
        .iter()
        .map(|h| make_pattern(h.accuracy, rng))
        .collect();
    let effective = effective_class(class, &patterns)?;
    Ok((effective, patterns))
}

/// The class with each accuracy replaced by its pattern's density. A
/// user-supplied best-margin override carries over, clipped to the realized
/// best margin.
pub fn effective_class(
    class: &HypothesisClass,
    patterns: &[SuccessPattern],
) -> Result<HypothesisClass> {
    if patterns.len() != class.n() {
        return Err(Error::LengthMismatch {
            expected: class.n(),
            got: patterns.len(),
        });
    }
    let accuracies: Vec<f64> = patterns.iter().map(SuccessPattern::accuracy).collect();
    let effective = HypothesisClass::from_accuracies(&accuracies)?;
    let natural = class.best_accuracy() - 0.5;
    if class.gamma0() < natural - BOUNDARY_SLACK {
        let realized = effective.gamma0();
        return effective.with_gamma0(class.gamma0().min(realized));
    }
    Ok(effective)
}

/// One round's outcome: entry `h` is true iff hypothesis `h` was correct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuccessVector(Vec<bool>);

impl SuccessVector {
    pub fn new(bits: Vec<bool>) -> Self {
        SuccessVector(bits)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn get(&self, h: usize) -> bool {
        self.0[h]
    }

    /// Number of hypotheses correct this round.
    pub fn successes(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }
}

impl From<Vec<bool>> for SuccessVector {
    fn from(bits: Vec<bool>) -> Self {
        SuccessVector(bits)
    }
}
