//! Input-oriented envelopment LPs for relative efficiency.
//!
//! For a target setup `i` the program is over `(θ, λ_1..λ_n)`:
//!
//! ```text
//! minimize θ
//!   Σ_k λ_k x_kl ≤ θ x_il     for every input l
//!   Σ_k λ_k y_kj ≥ y_ij       for every output j
//!   λ ≥ 0, θ free
//!   Σ_k λ_k = 1               (convex frontier only)
//! ```
//!
//! One weight vector λ is shared by the input and output rows. Dropping the
//! convexity row gives the affine (constant returns to scale) frontier, which
//! for one input and one output reduces to `(y_i/x_i) / max_k (y_k/x_k)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measurements::SetupSummary;
use crate::pareto::Point;
use crate::simplex::{solve_lp, LinearProgram, LpError, LpSolution, LpStatus, Relation, VarBound};
use crate::Execution;

/// θ within this distance of 1 is reported as exactly 1 (pivoting round-off).
pub const UNIT_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrontierForm {
    /// Keeps `Σλ = 1` (variable returns to scale).
    #[default]
    Convex,
    /// Drops `Σλ = 1` (constant returns to scale).
    Affine,
}

impl fmt::Display for FrontierForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FrontierForm::Convex => "convex",
            FrontierForm::Affine => "affine",
        })
    }
}

impl FromStr for FrontierForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "convex" | "vrs" => Ok(FrontierForm::Convex),
            "affine" | "crs" => Ok(FrontierForm::Affine),
            other => Err(format!(
                "unknown frontier form `{other}` (expected convex or affine)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyResult {
    pub setup: String,
    pub theta: f64,
    /// λ per peer setup, in input order.
    pub peer_weights: Vec<(String, f64)>,
    pub form: FrontierForm,
    pub status: LpStatus,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EfficiencyError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("no setups to score")]
    Empty,
    #[error("setup `{setup}`: input {index} must be positive, got {value}")]
    NonPositiveInput {
        setup: String,
        index: usize,
        value: f64,
    },
    #[error("solver failed for setup `{setup}`: {reason}")]
    SolverFailure {
        setup: String,
        reason: String,
        lp: Box<LinearProgram>,
    },
}

impl EfficiencyError {
    /// The offending instance, when the failure came from the solver.
    pub fn instance(&self) -> Option<&LinearProgram> {
        match self {
            EfficiencyError::SolverFailure { lp, .. } => Some(lp),
            _ => None,
        }
    }
}

fn validate_points(points: &[Point]) -> Result<(), EfficiencyError> {
    let first = points.first().ok_or(EfficiencyError::Empty)?;
    let (l, j) = (first.inputs.len(), first.outputs.len());
    if l == 0 || j == 0 {
        return Err(EfficiencyError::DimensionMismatch(
            "at least one input and one output are required".into(),
        ));
    }
    for p in points {
        if p.inputs.len() != l || p.outputs.len() != j {
            return Err(EfficiencyError::DimensionMismatch(format!(
                "setup `{}` has {} inputs / {} outputs, expected {l} / {j}",
                p.setup,
                p.inputs.len(),
                p.outputs.len()
            )));
        }
        if let Some((index, &value)) = p
            .inputs
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v > 0.0 && v.is_finite()))
        {
            return Err(EfficiencyError::NonPositiveInput {
                setup: p.setup.clone(),
                index,
                value,
            });
        }
    }
    Ok(())
}

/// Envelopment LP for `target`. Variable 0 is θ, variable `1 + k` is λ_k.
pub fn build_dea_lp(
    points: &[Point],
    target: usize,
    form: FrontierForm,
) -> Result<LinearProgram, EfficiencyError> {
    validate_points(points)?;
    let n = points.len();
    let Some(t) = points.get(target) else {
        return Err(EfficiencyError::DimensionMismatch(format!(
            "target index {target} out of range for {n} setups"
        )));
    };

    let mut objective = vec![0.0; n + 1];
    objective[0] = 1.0;
    let mut lp = LinearProgram::new(objective);
    lp.set_bound(0, VarBound::Free);

    for (l, &x_target) in t.inputs.iter().enumerate() {
        let mut row = Vec::with_capacity(n + 1);
        row.push(-x_target);
        row.extend(points.iter().map(|p| p.inputs[l]));
        lp.add_constraint(row, Relation::Le, 0.0);
    }
    for (j, &y_target) in t.outputs.iter().enumerate() {
        let mut row = Vec::with_capacity(n + 1);
        row.push(0.0);
        row.extend(points.iter().map(|p| p.outputs[j]));
        lp.add_constraint(row, Relation::Ge, y_target);
    }
    if form == FrontierForm::Convex {
        let mut row = vec![1.0; n + 1];
        row[0] = 0.0;
        lp.add_constraint(row, Relation::Eq, 1.0);
    }
    Ok(lp)
}

fn score_one(
    points: &[Point],
    target: usize,
    form: FrontierForm,
) -> Result<EfficiencyResult, EfficiencyError> {
    let setup = &points[target].setup;
    if points.len() == 1 {
        return Ok(EfficiencyResult {
            setup: setup.clone(),
            theta: 1.0,
            peer_weights: vec![(setup.clone(), 1.0)],
            form,
            status: LpStatus::Optimal,
        });
    }
    let lp = build_dea_lp(points, target, form)?;
    let failure = |reason: String| EfficiencyError::SolverFailure {
        setup: setup.clone(),
        reason,
        lp: Box::new(lp.clone()),
    };
    match solve_lp(&lp) {
        Ok(LpSolution::Optimal { variables, .. }) => {
            let theta = variables[0];
            // θ = 1 with λ on the target itself is always feasible.
            if theta.is_nan() || theta <= 0.0 {
                return Err(failure(format!(
                    "non-positive efficiency {theta}; outputs must admit a positive envelopment"
                )));
            }
            let peer_weights = points
                .iter()
                .zip(&variables[1..])
                .map(|(p, &w)| (p.setup.clone(), w.max(0.0)))
                .collect();
            Ok(EfficiencyResult {
                setup: setup.clone(),
                theta: if theta >= 1.0 - UNIT_SNAP { 1.0 } else { theta },
                peer_weights,
                form,
                status: LpStatus::Optimal,
            })
        }
        Ok(other) => Err(failure(format!("solver returned {:?}", other.status()))),
        Err(LpError::NumericalFailure(reason)) => Err(failure(reason)),
        Err(e) => Err(failure(e.to_string())),
    }
}

/// θ for every point, in input order.
pub fn point_efficiencies(
    points: &[Point],
    form: FrontierForm,
    execution: Execution,
) -> Result<Vec<EfficiencyResult>, EfficiencyError> {
    validate_points(points)?;
    execution.map_indexed(points.len(), |i| score_one(points, i, form))
}

/// θ for every setup using the metric means as coordinates, in input order.
pub fn efficiency_scores(
    summaries: &[SetupSummary],
    form: FrontierForm,
) -> Result<Vec<EfficiencyResult>, EfficiencyError> {
    let points: Vec<Point> = summaries.iter().map(SetupSummary::mean_point).collect();
    point_efficiencies(&points, form, Execution::default())
}
