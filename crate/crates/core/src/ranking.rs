//! Stochastic-dominance ordering of bootstrap distributions.
//!
//! Two distributions of equal size are compared rank by rank after sorting:
//! `a` dominates `b` when every order statistic of `a` is at least the
//! matching one of `b` (up to `tolerance`) and at least one exceeds it by
//! more than `tolerance`. This is empirical first-order stochastic dominance.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::efficiency::EfficiencyResult;
use crate::stochastic::{BootstrapDistribution, BoxplotStats};
use crate::Execution;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DominanceRelation {
    FirstDominates,
    SecondDominates,
    Incomparable,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RankingError {
    #[error("sample counts differ: `{first}` has {first_len}, `{second}` has {second_len}")]
    UnequalSampleCounts {
        first: String,
        first_len: usize,
        second: String,
        second_len: usize,
    },
    #[error("inconsistent setups: {0}")]
    InconsistentSetups(String),
    #[error("dominance relation has a cycle through `{0}`; lower the tolerance")]
    Cyclic(String),
}

/// Rank comparison of two ascending-sorted samples of equal length.
pub fn dominance_sorted(a: &[f64], b: &[f64], tolerance: f64) -> DominanceRelation {
    debug_assert_eq!(a.len(), b.len());
    let mut a_ge = true;
    let mut a_gt = false;
    let mut b_ge = true;
    let mut b_gt = false;
    for (&x, &y) in a.iter().zip(b) {
        a_ge &= x >= y - tolerance;
        a_gt |= x > y + tolerance;
        b_ge &= y >= x - tolerance;
        b_gt |= y > x + tolerance;
    }
    if a_ge && a_gt {
        DominanceRelation::FirstDominates
    } else if b_ge && b_gt {
        DominanceRelation::SecondDominates
    } else {
        DominanceRelation::Incomparable
    }
}

fn sorted_samples(d: &BootstrapDistribution) -> Vec<f64> {
    let mut s = d.samples.clone();
    s.sort_by(f64::total_cmp);
    s
}

fn check_lengths(a: &BootstrapDistribution, b: &BootstrapDistribution) -> Result<(), RankingError> {
    if a.samples.len() != b.samples.len() {
        return Err(RankingError::UnequalSampleCounts {
            first: a.setup.clone(),
            first_len: a.samples.len(),
            second: b.setup.clone(),
            second_len: b.samples.len(),
        });
    }
    Ok(())
}

pub fn stochastic_dominance(
    a: &BootstrapDistribution,
    b: &BootstrapDistribution,
    tolerance: f64,
) -> Result<DominanceRelation, RankingError> {
    check_lengths(a, b)?;
    Ok(dominance_sorted(
        &sorted_samples(a),
        &sorted_samples(b),
        tolerance,
    ))
}

/// Dominance diagram. Nodes and edges are in lexicographic order; an edge
/// `(winner, loser)` points from the dominating setup to the dominated one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DominanceGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub reduced_edges: Vec<(String, String)>,
}

impl DominanceGraph {
    /// Builds the graph from an explicit edge list, checking acyclicity and
    /// computing the transitive reduction.
    pub fn from_edges(
        nodes: impl IntoIterator<Item = String>,
        edges: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, RankingError> {
        let nodes: Vec<String> = nodes
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let edges: Vec<(String, String)> = edges
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: HashMap<&str, usize> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let mut succ = vec![Vec::new(); nodes.len()];
        for (w, l) in &edges {
            let (Some(&wi), Some(&li)) = (index.get(w.as_str()), index.get(l.as_str())) else {
                return Err(RankingError::InconsistentSetups(format!(
                    "edge `{w}` -> `{l}` references an unknown node"
                )));
            };
            succ[wi].push(li);
        }

        let order = topological_order(&succ).map_err(|i| RankingError::Cyclic(nodes[i].clone()))?;
        let reach = reachability(&succ, &order);

        let reduced_edges = edges
            .iter()
            .filter(|(w, l)| {
                let (wi, li) = (index[w.as_str()], index[l.as_str()]);
                !succ[wi].iter().any(|&m| m != li && reach[m][li])
            })
            .cloned()
            .collect();

        Ok(Self {
            nodes,
            edges,
            reduced_edges,
        })
    }

    pub fn dominates(&self, setup: &str) -> Vec<String> {
        self.edges
            .iter()
            .filter(|(w, _)| w == setup)
            .map(|(_, l)| l.clone())
            .collect()
    }

    pub fn dominated_by(&self, setup: &str) -> Vec<String> {
        self.edges
            .iter()
            .filter(|(_, l)| l == setup)
            .map(|(w, _)| w.clone())
            .collect()
    }
}

/// Kahn's algorithm; `Err(node)` names a node on a cycle.
fn topological_order(succ: &[Vec<usize>]) -> Result<Vec<usize>, usize> {
    let n = succ.len();
    let mut indegree = vec![0usize; n];
    for targets in succ {
        for &t in targets {
            indegree[t] += 1;
        }
    }
    let mut stack: Vec<usize> = (0..n).rev().filter(|&i| indegree[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = stack.pop() {
        order.push(v);
        for &t in &succ[v] {
            indegree[t] -= 1;
            if indegree[t] == 0 {
                stack.push(t);
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).find(|&i| indegree[i] > 0).expect("cycle node"))
    }
}

/// `reach[u][v]`: v reachable from u by a path of length >= 1.
fn reachability(succ: &[Vec<usize>], topo: &[usize]) -> Vec<Vec<bool>> {
    let n = succ.len();
    let mut reach = vec![vec![false; n]; n];
    for &u in topo.iter().rev() {
        let mut row = vec![false; n];
        for &v in &succ[u] {
            row[v] = true;
            for (r, &x) in row.iter_mut().zip(&reach[v]) {
                *r |= x;
            }
        }
        reach[u] = row;
    }
    reach
}

pub fn dominance_graph(
    dists: &[BootstrapDistribution],
    tolerance: f64,
) -> Result<DominanceGraph, RankingError> {
    dominance_graph_with(dists, tolerance, Execution::default())
}

pub fn dominance_graph_with(
    dists: &[BootstrapDistribution],
    tolerance: f64,
    execution: Execution,
) -> Result<DominanceGraph, RankingError> {
    if let Some(first) = dists.first() {
        for d in dists {
            check_lengths(first, d)?;
        }
    }
    let mut names = HashSet::new();
    for d in dists {
        if !names.insert(d.setup.as_str()) {
            return Err(RankingError::InconsistentSetups(format!(
                "duplicate setup `{}`",
                d.setup
            )));
        }
    }
    let sorted: Vec<Vec<f64>> = dists.iter().map(sorted_samples).collect();
    let pairs: Vec<(usize, usize)> = (0..dists.len())
        .flat_map(|i| (i + 1..dists.len()).map(move |j| (i, j)))
        .collect();
    let relations = execution.map_indexed(pairs.len(), |p| {
        let (i, j) = pairs[p];
        Ok::<_, RankingError>(dominance_sorted(&sorted[i], &sorted[j], tolerance))
    })?;
    let edges = pairs
        .iter()
        .zip(relations)
        .filter_map(|(&(i, j), rel)| match rel {
            DominanceRelation::FirstDominates => {
                Some((dists[i].setup.clone(), dists[j].setup.clone()))
            }
            DominanceRelation::SecondDominates => {
                Some((dists[j].setup.clone(), dists[i].setup.clone()))
            }
            DominanceRelation::Incomparable => None,
        });
    DominanceGraph::from_edges(dists.iter().map(|d| d.setup.clone()), edges)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRecord {
    pub setup: String,
    /// Deterministic θ at the metric means.
    pub theta: f64,
    pub frontier: bool,
    pub stats: BoxplotStats,
    pub dominates: Vec<String>,
    pub dominated_by: Vec<String>,
}

/// One record per setup, ordered by bootstrap median descending, then name.
pub fn rank_report(
    results: &[EfficiencyResult],
    dists: &[BootstrapDistribution],
    graph: &DominanceGraph,
    frontier: &[String],
) -> Result<Vec<RankRecord>, RankingError> {
    let result_names: BTreeSet<&str> = results.iter().map(|r| r.setup.as_str()).collect();
    let dist_names: BTreeSet<&str> = dists.iter().map(|d| d.setup.as_str()).collect();
    let node_names: BTreeSet<&str> = graph.nodes.iter().map(String::as_str).collect();
    if result_names.len() != results.len()
        || result_names != dist_names
        || result_names != node_names
        || dist_names.len() != dists.len()
    {
        return Err(RankingError::InconsistentSetups(
            "efficiency results, distributions and graph must cover the same setups".into(),
        ));
    }
    if let Some(f) = frontier.iter().find(|f| !result_names.contains(f.as_str())) {
        return Err(RankingError::InconsistentSetups(format!(
            "frontier setup `{f}` is unknown"
        )));
    }
    let theta: HashMap<&str, f64> = results
        .iter()
        .map(|r| (r.setup.as_str(), r.theta))
        .collect();
    let mut records: Vec<RankRecord> = dists
        .iter()
        .map(|d| RankRecord {
            setup: d.setup.clone(),
            theta: theta[d.setup.as_str()],
            frontier: frontier.contains(&d.setup),
            stats: d.stats,
            dominates: graph.dominates(&d.setup),
            dominated_by: graph.dominated_by(&d.setup),
        })
        .collect();
    records.sort_by(|a, b| {
        b.stats
            .median
            .total_cmp(&a.stats.median)
            .then_with(|| a.setup.cmp(&b.setup))
    });
    Ok(records)
}
