//! Ranking of competing system setups by stochastic multi-dimensional
//! relative efficiency.
//!
//! The pipeline is:
//!
//! 1. [`measurements`]: parse repeated measurements and estimate per-metric
//!    mean and standard deviation for every setup.
//! 2. [`efficiency`]: solve one envelopment LP per setup (via [`simplex`]) to
//!    get its relative efficiency θ in (0, 1].
//! 3. [`stochastic`]: resample every setup from independent Gaussians and
//!    recompute θ per replicate, giving an efficiency distribution per setup.
//! 4. [`ranking`]: compare distributions by empirical first-order stochastic
//!    dominance and build the (transitively reduced) dominance graph.
//!
//! [`pareto`] provides plain Pareto dominance and frontier extraction.
//!
//! Per-setup LPs and bootstrap replicates run on rayon when the `parallel`
//! feature is enabled (the default). Results are identical either way.

pub mod efficiency;
pub mod measurements;
pub mod pareto;
pub mod ranking;
pub mod rng;
pub mod simplex;
pub mod stochastic;

pub use efficiency::{
    build_dea_lp, efficiency_scores, point_efficiencies, EfficiencyError, EfficiencyResult,
    FrontierForm,
};
pub use measurements::{
    parse_dataset, parse_dataset_json, summarize, Dataset, Direction, MeasurementError,
    MeasurementRecord, MetricSpec, MetricSummary, SetupSummary,
};
pub use pareto::{dominates, pareto_frontier, ParetoError, Point};
pub use ranking::{
    dominance_graph, rank_report, stochastic_dominance, DominanceGraph, DominanceRelation,
    RankRecord, RankingError,
};
pub use simplex::{solve_lp, LinearProgram, LpError, LpSolution, LpStatus, Relation, VarBound};
pub use stochastic::{
    bootstrap_efficiencies, boxplot_stats, sample_setup, BootstrapConfig, BootstrapDistribution,
    BoxplotStats, StochasticError,
};

/// How independent work items (per-setup LPs, bootstrap replicates) are run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// rayon thread pool; sequential when built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Evaluates `f(0..n)` and returns results in index order. On failure the
    /// error of the lowest failing index is returned, independent of schedule.
    pub fn map_indexed<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                let results: Vec<Result<T, E>> = (0..n).into_par_iter().map(f).collect();
                results.into_iter().collect()
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel => (0..n).map(f).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_preserves_order_and_first_error() {
        for exec in [Execution::Sequential, Execution::Parallel] {
            let ok: Result<Vec<usize>, ()> = exec.map_indexed(100, |i| Ok(i * 2));
            assert_eq!(ok.unwrap(), (0..100).map(|i| i * 2).collect::<Vec<_>>());
            let err: Result<Vec<usize>, usize> =
                exec.map_indexed(100, |i| if i % 30 == 29 { Err(i) } else { Ok(i) });
            assert_eq!(err, Err(29));
        }
    }
}
