//! Analytic makespan model for work stealing with latency.
//!
//! Without communication cost the expected makespan is `W/p + c*log2(W)`
//! (constant term dropped) with `c*p*log2(W)` expected steals. With a
//! latency `lambda`, the run behaves like the classic one on macro-steps of
//! length `2*lambda`:
//!
//! ```text
//! E[Cmax] = W/p + 2*lambda*c' * log2(W / (2*lambda)),   c' ~= 1.8
//! ```
//!
//! A run is "acceptable" when its makespan is within `accept_factor * W/p`.
//! All logarithms are base 2.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Fitted constant of the latency-aware expression.
pub const DEFAULT_C_PRIME: f64 = 1.8;
/// Makespans within 10% of `W/p` are acceptable.
pub const DEFAULT_ACCEPT_FACTOR: f64 = 1.1;
/// Empirical limit rule `W/p = 470 * lambda`.
pub const DEFAULT_RULE_SLOPE: f64 = 470.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub c: f64,
    pub c_prime: f64,
    pub accept_factor: f64,
    pub rule_slope: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            c_prime: DEFAULT_C_PRIME,
            accept_factor: DEFAULT_ACCEPT_FACTOR,
            rule_slope: DEFAULT_RULE_SLOPE,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        positive("c", self.c)?;
        positive("c_prime", self.c_prime)?;
        positive("rule_slope", self.rule_slope)?;
        if !(self.accept_factor > 1.0) {
            return Err(ModelError::AcceptFactor(self.accept_factor));
        }
        Ok(())
    }
}

fn positive(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}

fn at_least_one(name: &'static str, value: f64) -> Result<f64, ModelError> {
    if value >= 1.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(ModelError::NonPositive { name, value })
    }
}

/// `W/p + c*log2(W)`.
pub fn predict_makespan_classic(work: f64, procs: f64, c: f64) -> Result<f64, ModelError> {
    at_least_one("W", work)?;
    at_least_one("p", procs)?;
    positive("c", c)?;
    Ok(work / procs + c * work.log2())
}

/// `c*p*log2(W)`.
pub fn expected_steals_classic(work: f64, procs: f64, c: f64) -> Result<f64, ModelError> {
    at_least_one("W", work)?;
    at_least_one("p", procs)?;
    positive("c", c)?;
    Ok(c * procs * work.log2())
}

/// The communication term `2*lambda*log2(W/(2*lambda))` that multiplies `c'`.
pub fn latency_overhead_unit(work: f64, latency: f64) -> Result<f64, ModelError> {
    at_least_one("W", work)?;
    at_least_one("lambda", latency)?;
    if work <= 2.0 * latency {
        return Err(ModelError::OutOfDomain { work, latency });
    }
    Ok(2.0 * latency * (work / (2.0 * latency)).log2())
}

/// `W/p + 2*lambda*c'*log2(W/(2*lambda))`, defined for `W > 2*lambda`.
pub fn predict_makespan(work: f64, procs: f64, latency: f64, c_prime: f64) -> Result<f64, ModelError> {
    at_least_one("p", procs)?;
    positive("c_prime", c_prime)?;
    let unit = latency_overhead_unit(work, latency)?;
    Ok(work / procs + c_prime * unit)
}

/// Measured over predicted makespan.
pub fn accuracy_ratio(measured: f64, work: f64, procs: f64, latency: f64, c_prime: f64) -> Result<f64, ModelError> {
    Ok(measured / predict_makespan(work, procs, latency, c_prime)?)
}

/// Bisection on a sign change of `f` over `[lo, hi]`, stopping when the
/// bracket is narrower than `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Absolute tolerance on the limit latency.
pub const LIMIT_TOLERANCE: f64 = 1e-3;

/// Largest latency for which the model still predicts an acceptable makespan:
/// the root of `(accept_factor - 1) * W/p = 2*c'*lambda*log2(W/(2*lambda))`
/// on the branch where the right side increases, `lambda` in `[1, W/(2e)]`.
pub fn limit_latency(work: f64, procs: f64, c_prime: f64, accept_factor: f64) -> Result<f64, ModelError> {
    if !(work > 2.0) || !work.is_finite() {
        return Err(ModelError::NonPositive {
            name: "W - 2",
            value: work - 2.0,
        });
    }
    at_least_one("p", procs)?;
    positive("c_prime", c_prime)?;
    if !(accept_factor > 1.0) {
        return Err(ModelError::AcceptFactor(accept_factor));
    }
    let target = (accept_factor - 1.0) * work / procs;
    let gap = |lambda: f64| 2.0 * c_prime * lambda * (work / (2.0 * lambda)).log2() - target;
    let lo = 1.0;
    let hi = work / (2.0 * std::f64::consts::E);
    let no_solution = |reason| ModelError::NoSolution { work, procs, reason };
    if hi <= lo {
        return Err(no_solution("increasing branch is empty"));
    }
    if gap(lo) > 0.0 {
        return Err(no_solution("overhead exceeds the budget even at lambda = 1"));
    }
    if gap(hi) < 0.0 {
        return Err(no_solution("overhead never reaches the budget"));
    }
    bisect(gap, lo, hi, LIMIT_TOLERANCE).ok_or_else(|| no_solution("no sign change in bracket"))
}

/// `max(1, floor(W / (rule_slope * lambda)))`.
pub fn max_processors(work: u64, latency: u64, rule_slope: f64) -> u64 {
    let p = (work as f64 / (rule_slope * latency as f64)).floor();
    (p as u64).max(1)
}

/// One observation for fitting `c'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub work: f64,
    pub procs: f64,
    pub latency: f64,
    pub mean_makespan: f64,
}

/// Least-squares `c'` through the origin: `(measured - W/p) = c' * x` with
/// `x = 2*lambda*log2(W/(2*lambda))`.
pub fn fit_cprime(rows: &[FitRow]) -> Result<f64, ModelError> {
    if rows.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for row in rows {
        let x = latency_overhead_unit(row.work, row.latency)?;
        let y = row.mean_makespan - row.work / row.procs;
        sxy += x * y;
        sxx += x * x;
    }
    if sxx == 0.0 {
        return Err(ModelError::DegenerateFit);
    }
    Ok(sxy / sxx)
}
