//! Strong Pareto dominance and frontier extraction (inputs minimized,
//! outputs maximized).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub setup: String,
    pub inputs: Vec<f64>,
    pub outputs: Vec<f64>,
}

impl Point {
    pub fn new(setup: impl Into<String>, inputs: Vec<f64>, outputs: Vec<f64>) -> Self {
        Self {
            setup: setup.into(),
            inputs,
            outputs,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParetoError {
    #[error("point `{setup}` has {found_inputs} inputs / {found_outputs} outputs, expected {inputs} / {outputs}")]
    DimensionMismatch {
        setup: String,
        inputs: usize,
        outputs: usize,
        found_inputs: usize,
        found_outputs: usize,
    },
    #[error("frontier of an empty point set")]
    Empty,
}

fn check_dims(reference: &Point, p: &Point) -> Result<(), ParetoError> {
    if p.inputs.len() != reference.inputs.len() || p.outputs.len() != reference.outputs.len() {
        return Err(ParetoError::DimensionMismatch {
            setup: p.setup.clone(),
            inputs: reference.inputs.len(),
            outputs: reference.outputs.len(),
            found_inputs: p.inputs.len(),
            found_outputs: p.outputs.len(),
        });
    }
    Ok(())
}

fn dominates_unchecked(a: &Point, b: &Point) -> bool {
    let mut strict = false;
    for (x, y) in a.inputs.iter().zip(&b.inputs) {
        if x > y {
            return false;
        }
        strict |= x < y;
    }
    for (x, y) in a.outputs.iter().zip(&b.outputs) {
        if x < y {
            return false;
        }
        strict |= x > y;
    }
    strict
}

/// `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &Point, b: &Point) -> Result<bool, ParetoError> {
    check_dims(a, b)?;
    Ok(dominates_unchecked(a, b))
}

/// Indices of the non-dominated points, in input order.
pub fn frontier_indices(points: &[Point]) -> Result<Vec<usize>, ParetoError> {
    let first = points.first().ok_or(ParetoError::Empty)?;
    for p in points {
        check_dims(first, p)?;
    }
    Ok((0..points.len())
        .filter(|&i| {
            !points
                .iter()
                .enumerate()
                .any(|(j, q)| j != i && dominates_unchecked(q, &points[i]))
        })
        .collect())
}

/// Setup names of the non-dominated points, in input order. Exact duplicates
/// of a frontier point are all kept.
pub fn pareto_frontier(points: &[Point]) -> Result<Vec<String>, ParetoError> {
    Ok(frontier_indices(points)?
        .into_iter()
        .map(|i| points[i].setup.clone())
        .collect())
}
