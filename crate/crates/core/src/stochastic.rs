//! Parametric bootstrap of efficiency scores.
//!
//! Each replicate draws every metric of every setup from an independent
//! Gaussian `N(mean, stddev)`, re-solves the efficiency LPs on the drawn
//! points, and records each setup's θ. Draws come from counter-based streams
//! keyed by `(seed, replicate, setup, metric)`, so the output does not depend
//! on how replicates are scheduled across threads.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::efficiency::{point_efficiencies, EfficiencyError, FrontierForm};
use crate::measurements::{Direction, SetupSummary};
use crate::pareto::Point;
use crate::rng::StreamKey;
use crate::Execution;

pub const DEFAULT_POSITIVITY_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Number of replicates `B`.
    pub replicates: usize,
    pub seed: u64,
    pub form: FrontierForm,
    /// Input draws below this value are clamped up to it.
    pub positivity_floor: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            replicates: 1000,
            seed: 0,
            form: FrontierForm::Convex,
            positivity_floor: DEFAULT_POSITIVITY_FLOOR,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxplotStats {
    pub min: f64,
    pub whisker_low: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub whisker_high: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapDistribution {
    pub setup: String,
    /// θ per replicate, in replicate order.
    pub samples: Vec<f64>,
    pub stats: BoxplotStats,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StochasticError {
    #[error("empty sample")]
    EmptySample,
    #[error("no setups to bootstrap")]
    NoSetups,
    #[error("invalid bootstrap configuration: {0}")]
    InvalidConfig(String),
    #[error("replicate {replicate}: {source}")]
    SolverFailure {
        /// 1-based replicate index.
        replicate: usize,
        #[source]
        source: EfficiencyError,
    },
}

impl StochasticError {
    pub fn setup(&self) -> Option<&str> {
        match self {
            StochasticError::SolverFailure {
                source: EfficiencyError::SolverFailure { setup, .. },
                ..
            } => Some(setup),
            _ => None,
        }
    }
}

/// Draws one point for `summary` from its per-metric Gaussians.
///
/// Metric `m` uses the child stream `stream.child(m)`. Zero-spread metrics
/// return their mean exactly.
pub fn sample_setup(summary: &SetupSummary, stream: StreamKey, positivity_floor: f64) -> Point {
    let mut inputs = Vec::new();
    let mut outputs = Vec::new();
    for (m, metric) in summary.metrics.iter().enumerate() {
        let value = if metric.stddev == 0.0 {
            metric.mean
        } else {
            metric.mean + metric.stddev * stream.child(m as u64).standard_normal()
        };
        match metric.direction {
            Direction::Input => inputs.push(value.max(positivity_floor)),
            Direction::Output => outputs.push(value),
        }
    }
    Point {
        setup: summary.setup.clone(),
        inputs,
        outputs,
    }
}

/// Stream for setup `setup` in replicate `replicate` (0-based).
pub fn setup_stream(seed: u64, replicate: usize, setup: usize) -> StreamKey {
    StreamKey::new(seed)
        .child(replicate as u64)
        .child(setup as u64)
}

pub fn bootstrap_efficiencies(
    summaries: &[SetupSummary],
    config: &BootstrapConfig,
) -> Result<Vec<BootstrapDistribution>, StochasticError> {
    bootstrap_efficiencies_with(summaries, config, Execution::default())
}

/// Runs `config.replicates` replicates with the given execution strategy.
pub fn bootstrap_efficiencies_with(
    summaries: &[SetupSummary],
    config: &BootstrapConfig,
    execution: Execution,
) -> Result<Vec<BootstrapDistribution>, StochasticError> {
    if summaries.is_empty() {
        return Err(StochasticError::NoSetups);
    }
    if config.replicates == 0 {
        return Err(StochasticError::InvalidConfig(
            "replicates must be >= 1".into(),
        ));
    }
    if !(config.positivity_floor > 0.0 && config.positivity_floor.is_finite()) {
        return Err(StochasticError::InvalidConfig(
            "positivity floor must be positive".into(),
        ));
    }

    let replicates = execution.map_indexed(config.replicates, |b| {
        let points: Vec<Point> = summaries
            .iter()
            .enumerate()
            .map(|(i, s)| sample_setup(s, setup_stream(config.seed, b, i), config.positivity_floor))
            .collect();
        point_efficiencies(&points, config.form, Execution::Sequential)
            .map(|results| results.into_iter().map(|r| r.theta).collect::<Vec<f64>>())
            .map_err(|source| StochasticError::SolverFailure {
                replicate: b + 1,
                source,
            })
    })?;

    summaries
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let samples: Vec<f64> = replicates.iter().map(|thetas| thetas[i]).collect();
            let stats = boxplot_stats(&samples)?;
            Ok(BootstrapDistribution {
                setup: s.setup.clone(),
                samples,
                stats,
            })
        })
        .collect()
}

/// Linear interpolation between closest order statistics of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = h - lo as f64;
    if frac == 0.0 || sorted[lo] == sorted[hi] {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Quartiles by linear interpolation and Tukey 1.5·IQR whiskers.
///
/// When no sample lies between a fence and its quartile the whisker sits on
/// the quartile, so the fields are always ordered.
pub fn boxplot_stats(samples: &[f64]) -> Result<BoxplotStats, StochasticError> {
    if samples.is_empty() {
        return Err(StochasticError::EmptySample);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile_sorted(&sorted, 0.25);
    let median = quantile_sorted(&sorted, 0.5);
    let q3 = quantile_sorted(&sorted, 0.75);
    let iqr = q3 - q1;
    let low_fence = q1 - 1.5 * iqr;
    let high_fence = q3 + 1.5 * iqr;
    let whisker_low = sorted
        .iter()
        .copied()
        .find(|&v| v >= low_fence)
        .map_or(q1, |v| v.min(q1));
    let whisker_high = sorted
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= high_fence)
        .map_or(q3, |v| v.max(q3));
    Ok(BoxplotStats {
        min: sorted[0],
        whisker_low,
        q1,
        median,
        q3,
        whisker_high,
        max: sorted[sorted.len() - 1],
    })
}
