//! Tail bounds and sample-complexity formulas for the three selection
//! algorithms, plus numeric calibration of the Hoeffding constant.
//!
//! Everything here is a pure function of its arguments. Formulas that
//! describe a number of examples return `f64`; the ones that must yield a
//! count (batch sample size, adaptive warm-up) round up.

use std::f64::consts::E;

use crate::error::{Error, Result};

/// Constant used by the textbook form of the Hoeffding bound.
pub const BASE_CONSTANT: f64 = 2.0;

/// Observed ratio between the best margin and the adaptive tolerance at
/// which adaptive selection usually stops.
pub const EMPIRICAL_EPS_DIVISOR: f64 = 2.38;

/// Tolerance of the adaptive algorithm before any example was seen.
pub const INITIAL_EPS: f64 = 0.2;

/// Parameters shared by the sample-complexity formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams {
    /// Number of hypotheses.
    pub n: usize,
    /// Confidence parameter.
    pub delta: f64,
    /// Known lower bound on the best margin.
    pub gamma: f64,
    /// Margin of the best hypothesis, when known.
    pub gamma0: Option<f64>,
    /// Hoeffding constant.
    pub c: f64,
}

impl BoundParams {
    pub fn new(n: usize, delta: f64, gamma: f64, c: f64) -> Result<Self> {
        let params = BoundParams {
            n,
            delta,
            gamma,
            gamma0: None,
            c,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_gamma0(mut self, gamma0: f64) -> Result<Self> {
        self.gamma0 = Some(gamma0);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        check_delta(self.delta)?;
        check_unit("gamma", self.gamma)?;
        check_c(self.c)?;
        if let Some(gamma0) = self.gamma0 {
            check_gamma_pair(self.gamma, gamma0)?;
        }
        Ok(())
    }

    pub fn sample_size_bs(&self) -> Result<u64> {
        sample_size_bs(self.n, self.delta, self.gamma, self.c)
    }

    pub fn threshold_b(&self, variant: BVariant) -> Result<f64> {
        threshold_b(self.n, self.delta, self.gamma, self.c, variant)
    }
}

/// Which tail of the binomial distribution to measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `Pr[X > pt + eps*t]`
    Upper,
    /// `Pr[X < pt - eps*t]`
    Lower,
}

/// Formula used for the constrained-selection sample parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BVariant {
    /// Valid without any independence assumption between hypotheses.
    Full,
    /// `16 ln(2n/delta) / (c gamma^2)`, valid when hypotheses are roughly
    /// independent.
    #[default]
    Simple,
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::param("n", "must be at least 1"));
    }
    Ok(())
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    check_unit("delta", delta)
}

pub(crate) fn check_unit(name: &'static str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::param(name, format!("{x} is not in (0, 1)")));
    }
    Ok(())
}

pub(crate) fn check_c(c: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param("c", format!("{c} is not a positive number")));
    }
    Ok(())
}

pub(crate) fn check_gamma_pair(gamma: f64, gamma0: f64) -> Result<()> {
    check_unit("gamma", gamma)?;
    check_unit("gamma0", gamma0)?;
    if gamma > gamma0 {
        return Err(Error::param(
            "gamma",
            format!("{gamma} exceeds gamma0 = {gamma0}"),
        ));
    }
    Ok(())
}

/// `exp(-c eps^2 t)`, the Hoeffding bound on either binomial tail.
pub fn hoeffding_tail(eps: f64, t: u64, c: f64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", format!("{eps} is not positive")));
    }
    check_c(c)?;
    Ok((-c * eps * eps * t as f64).exp())
}

/// Exact binomial tail probability of `t` Bernoulli(`p`) trials deviating
/// from `pt` by more than `eps*t` on the given side (strict inequality).
pub fn exact_binomial_tail(p: f64, eps: f64, t: u64, side: Side) -> Result<f64> {
    Ok(ln_binomial_tail(p, eps, t, side)?.exp())
}

/// Natural log of [`exact_binomial_tail`]; `-inf` for an empty tail.
///
/// The pmf is evaluated relative to its mode through the ratio recurrence
/// `pmf(k+1)/pmf(k) = (t-k)/(k+1) * p/(1-p)` and normalized by the total
/// mass, so no binomial coefficient is ever formed and the result keeps full
/// relative precision deep into the tail.
pub fn ln_binomial_tail(p: f64, eps: f64, t: u64, side: Side) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", format!("{p} is not in [0, 1]")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::param("eps", format!("{eps} is not positive")));
    }
    if t == 0 {
        return Err(Error::param("t", "must be at least 1"));
    }
    let tf = t as f64;
    let range = match side {
        Side::Upper => {
            let lo = floor_snapped(p * tf + eps * tf) + 1.0;
            if lo > tf {
                return Ok(f64::NEG_INFINITY);
            }
            (lo.max(0.0) as u64, t)
        }
        Side::Lower => {
            let hi = ceil_snapped(p * tf - eps * tf) - 1.0;
            if hi < 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            (0, hi.min(tf) as u64)
        }
    };
    // Point masses at 0 or t never deviate.
    if p == 0.0 || p == 1.0 {
        return Ok(f64::NEG_INFINITY);
    }

    let log_w = log_weights_from_mode(p, t);
    let total = log_sum_exp(&log_w);
    let tail = log_sum_exp(&log_w[range.0 as usize..=range.1 as usize]);
    Ok((tail - total).min(0.0))
}

// Rounds away representation noise such as 60.000000000000007.
fn floor_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.floor()
    }
}

fn ceil_snapped(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x.ceil()
    }
}

/// `ln(pmf(k) / pmf(mode))` for k = 0..=t.
fn log_weights_from_mode(p: f64, t: u64) -> Vec<f64> {
    let tf = t as f64;
    let mode = (((tf + 1.0) * p).floor() as u64).min(t);
    let log_odds = p.ln() - (1.0 - p).ln();
    let mut w = vec![0.0; t as usize + 1];
    for k in mode..t {
        let kf = k as f64;
        w[k as usize + 1] = w[k as usize] + ((tf - kf) / (kf + 1.0)).ln() + log_odds;
    }
    for k in (1..=mode).rev() {
        let kf = k as f64;
        w[k as usize - 1] = w[k as usize] - ((tf - kf + 1.0) / kf).ln() - log_odds;
    }
    w
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    // Largest terms first.
    let mut sorted: Vec<f64> = xs.iter().map(|x| (x - max).exp()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    max + sorted.iter().sum::<f64>().ln()
}

/// Grid searched by [`calibrate_constant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantGrid {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Default for ConstantGrid {
    fn default() -> Self {
        ConstantGrid {
            min: BASE_CONSTANT,
            max: 16.0,
            step: 0.25,
        }
    }
}

impl ConstantGrid {
    /// Grid values in ascending order.
    pub fn values(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count)
            .map(|i| self.min + i as f64 * self.step)
            .collect()
    }
}

/// Largest constant on the default grid (`step` apart, from 2 up to 16) for
/// which `exp(-c eps^2 t)` dominates both exact binomial tails at every point
/// of the cross product `p_grid x eps_grid x t_grid`.
pub fn calibrate_constant(
    p_grid: &[f64],
    eps_grid: &[f64],
    t_grid: &[u64],
    c_step: f64,
) -> Result<f64> {
    let grid = ConstantGrid {
        step: c_step,
        ..ConstantGrid::default()
    };
    calibrate_constant_on(p_grid, eps_grid, t_grid, grid)
}

pub fn calibrate_constant_on(
    p_grid: &[f64],
    eps_grid: &[f64],
    t_grid: &[u64],
    grid: ConstantGrid,
) -> Result<f64> {
    if p_grid.is_empty() || eps_grid.is_empty() || t_grid.is_empty() {
        return Err(Error::param("grid", "calibration grids must be non-empty"));
    }
    if !(grid.step > 0.0 && grid.min > 0.0 && grid.max >= grid.min) {
        return Err(Error::param(
            "c_step",
            "constant grid must be increasing and positive",
        ));
    }
    // exp(-c x) >= tail  <=>  c <= -ln(tail) / x, so the admissible set is an
    // interval and only its supremum over all points matters.
    let mut sup = f64::INFINITY;
    for &p in p_grid {
        for &eps in eps_grid {
            for &t in t_grid {
                let exponent = eps * eps * t as f64;
                for side in [Side::Upper, Side::Lower] {
                    let ln_tail = ln_binomial_tail(p, eps, t, side)?;
                    if ln_tail == f64::NEG_INFINITY {
                        continue;
                    }
                    sup = sup.min(-ln_tail / exponent);
                }
            }
        }
    }
    let mut best = grid.min;
    for c in grid.values() {
        if c <= sup {
            best = c;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Batch-selection sample size `ceil(16 ln(2n/delta) / (c gamma^2))`.
pub fn sample_size_bs(n: usize, delta: f64, gamma: f64, c: f64) -> Result<u64> {
    check_n(n)?;
    check_delta(delta)?;
    check_unit("gamma", gamma)?;
    check_c(c)?;
    let m = 16.0 * (2.0 * n as f64 / delta).ln() / (c * gamma * gamma);
    Ok(m.ceil().max(1.0) as u64)
}

/// Constrained-selection sample parameter, before scaling into the
/// threshold `B`.
pub fn b_cs(n: usize, delta: f64, gamma: f64, c: f64, variant: BVariant) -> Result<f64> {
    check_n(n)?;
    check_delta(delta)?;
    check_unit("gamma", gamma)?;
    check_c(c)?;
    let nf = n as f64;
    let arg = match variant {
        BVariant::Full => 32.0 * E * nf / (c * (E - 1.0) * delta * gamma * gamma),
        BVariant::Simple => 2.0 * nf / delta,
    };
    if arg <= 1.0 {
        return Err(Error::param(
            "delta",
            format!("logarithm argument {arg} is not above 1"),
        ));
    }
    Ok(16.0 / (c * gamma * gamma) * arg.ln())
}

/// Stopping threshold `B = 3 gamma b_cs / 4` of constrained selection.
pub fn threshold_b(n: usize, delta: f64, gamma: f64, c: f64, variant: BVariant) -> Result<f64> {
    Ok(3.0 * gamma * b_cs(n, delta, gamma, c, variant)? / 4.0)
}

/// Average number of steps of constrained selection, `B / gamma0`.
pub fn t_cs_avg(n: usize, delta: f64, gamma: f64, gamma0: f64, c: f64) -> Result<f64> {
    check_gamma_pair(gamma, gamma0)?;
    Ok(threshold_b(n, delta, gamma, c, BVariant::Simple)? / gamma0)
}

fn ln_3n_over_delta(n: usize, delta: f64, c: f64) -> Result<f64> {
    check_n(n)?;
    check_delta(delta)?;
    check_c(c)?;
    Ok((3.0 * n as f64 / delta).ln())
}

/// Worst-case number of steps of adaptive selection, `64 ln(3n/delta) / (c gamma0^2)`.
pub fn t_as_worst(n: usize, delta: f64, gamma0: f64, c: f64) -> Result<f64> {
    check_unit("gamma0", gamma0)?;
    Ok(64.0 * ln_3n_over_delta(n, delta, c)? / (c * gamma0 * gamma0))
}

/// Step count predicted when adaptive selection stops at `eps = gamma0 / 2.38`.
pub fn t_as_empirical(n: usize, delta: f64, gamma0: f64, c: f64) -> Result<f64> {
    check_unit("gamma0", gamma0)?;
    let k = 4.0 * EMPIRICAL_EPS_DIVISOR * EMPIRICAL_EPS_DIVISOR;
    Ok(k * ln_3n_over_delta(n, delta, c)? / (c * gamma0 * gamma0))
}

/// Number of examples adaptive selection collects before its stopping rule
/// can possibly fire: `ceil(4 ln(3n/delta) / (c (1/5)^2))`.
pub fn as_warmup(n: usize, delta: f64, c: f64) -> Result<u64> {
    let steps = 4.0 * ln_3n_over_delta(n, delta, c)? / (c * INITIAL_EPS * INITIAL_EPS);
    Ok(steps.ceil() as u64)
}

/// Adaptive tolerance after `t >= 1` examples, `sqrt(4 ln(3n/delta) / (c t))`.
pub fn as_eps(n: usize, delta: f64, c: f64, t: u64) -> Result<f64> {
    if t == 0 {
        return Ok(INITIAL_EPS);
    }
    Ok((4.0 * ln_3n_over_delta(n, delta, c)? / (c * t as f64)).sqrt())
}
