//! Interval estimates and run summaries.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::model::RunStats;

/// Wilson score interval for `successes` out of `trials` at two-sided
/// `confidence`.
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> Result<(f64, f64)> {
    if trials == 0 || successes > trials {
        return Err(Error::Domain(format!(
            "Wilson interval needs 0 ≤ successes ≤ trials and trials ≥ 1, got {successes}/{trials}"
        )));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain(format!(
            "confidence {confidence} outside (0, 1)"
        )));
    }
    let z = Normal::standard().inverse_cdf(0.5 + confidence / 2.0);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let lo = if successes == 0 {
        0.0
    } else {
        (centre - half).max(0.0)
    };
    let hi = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    Ok((lo, hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    Exact,
    MonteCarlo,
}

/// An acceptance probability, computed or estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptanceEstimate {
    pub mode: EstimateMode,
    pub value: f64,
    /// The exact rational, when known.
    pub exact: Option<String>,
    pub ci: Option<(f64, f64)>,
    pub trials: u64,
}

impl AcceptanceEstimate {
    pub fn exact(value: f64, exact: Option<String>) -> Self {
        Self {
            mode: EstimateMode::Exact,
            value,
            exact,
            ci: None,
            trials: 0,
        }
    }

    pub fn monte_carlo(successes: u64, trials: u64, confidence: f64) -> Result<Self> {
        Ok(Self {
            mode: EstimateMode::MonteCarlo,
            value: successes as f64 / trials as f64,
            exact: None,
            ci: Some(wilson_interval(successes, trials, confidence)?),
            trials,
        })
    }

    /// Whether `p` lies in the interval (or equals the exact value).
    pub fn covers(&self, p: f64) -> bool {
        match self.ci {
            Some((lo, hi)) => lo <= p && p <= hi,
            None => (self.value - p).abs() <= f64::EPSILON,
        }
    }
}

/// Maxima and medians of the per-trial accounting.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsSummary {
    #[serde(with = "crate::model::stats::big_string")]
    pub steps_max: BigUint,
    #[serde(with = "crate::model::stats::big_string")]
    pub steps_median: BigUint,
    pub space_work_max: u64,
    #[serde(with = "crate::model::stats::big_string")]
    pub space_counter_max: BigUint,
    pub passes_max: u64,
    pub passes_median: u64,
    #[serde(with = "crate::model::stats::big_string")]
    pub left_moves_max: BigUint,
    pub inner_reversals_max: u64,
}

impl StatsSummary {
    pub fn of(runs: &[RunStats]) -> Self {
        if runs.is_empty() {
            return Self::default();
        }
        let mut steps: Vec<&BigUint> = runs.iter().map(|r| &r.steps).collect();
        steps.sort();
        let mut passes: Vec<u64> = runs.iter().map(|r| r.passes).collect();
        passes.sort_unstable();
        let mid = runs.len() / 2;
        Self {
            steps_max: steps[steps.len() - 1].clone(),
            steps_median: steps[mid].clone(),
            space_work_max: runs.iter().map(|r| r.space_work).max().unwrap_or(0),
            space_counter_max: runs
                .iter()
                .map(|r| &r.space_counter)
                .max()
                .cloned()
                .unwrap_or_default(),
            passes_max: passes[passes.len() - 1],
            passes_median: passes[mid],
            left_moves_max: runs
                .iter()
                .map(|r| &r.left_moves)
                .max()
                .cloned()
                .unwrap_or_default(),
            inner_reversals_max: runs.iter().map(|r| r.inner_reversals).max().unwrap_or(0),
        }
    }
}
