//! Dense two-phase primal simplex.
//!
//! Solves `minimize c·z` subject to `≤`, `≥` and `=` rows over nonnegative or
//! free variables. Free variables are split into positive and negative parts,
//! every row is scaled to unit max-abs coefficient and flipped to a
//! nonnegative right-hand side, and equality / `≥` rows get phase-one
//! artificials. Pivoting follows Dantzig's rule until a run of degenerate
//! pivots is observed, after which Bland's rule takes over for the remainder
//! of the phase.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum VarBound {
    #[default]
    NonNegative,
    Free,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub coefficients: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(coefficients: Vec<f64>, relation: Relation, rhs: f64) -> Self {
        Self {
            coefficients,
            relation,
            rhs,
        }
    }

    /// Signed amount by which `point` violates this row (0 when satisfied).
    pub fn violation(&self, point: &[f64]) -> f64 {
        let lhs: f64 = self
            .coefficients
            .iter()
            .zip(point)
            .map(|(a, z)| a * z)
            .sum();
        match self.relation {
            Relation::Le => (lhs - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - lhs).max(0.0),
            Relation::Eq => (lhs - self.rhs).abs(),
        }
    }

    /// Violation after dividing the row by its largest coefficient magnitude.
    pub fn scaled_violation(&self, point: &[f64]) -> f64 {
        let scale = max_abs(&self.coefficients);
        if scale == 0.0 {
            self.violation(point)
        } else {
            self.violation(point) / scale
        }
    }
}

/// `minimize objective·z` subject to `constraints`, with per-variable bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    pub bounds: Vec<VarBound>,
}

impl LinearProgram {
    /// A program over `objective.len()` nonnegative variables with no rows.
    pub fn new(objective: Vec<f64>) -> Self {
        let bounds = vec![VarBound::NonNegative; objective.len()];
        Self {
            objective,
            constraints: Vec::new(),
            bounds,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn set_bound(&mut self, var: usize, bound: VarBound) -> &mut Self {
        self.bounds[var] = bound;
        self
    }

    pub fn add_constraint(
        &mut self,
        coefficients: Vec<f64>,
        relation: Relation,
        rhs: f64,
    ) -> &mut Self {
        self.constraints
            .push(Constraint::new(coefficients, relation, rhs));
        self
    }

    pub fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if self.bounds.len() != n {
            return Err(LpError::DimensionMismatch {
                what: "variable bounds".into(),
                expected: n,
                found: self.bounds.len(),
            });
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::NonFinite("objective".into()));
        }
        for (i, row) in self.constraints.iter().enumerate() {
            if row.coefficients.len() != n {
                return Err(LpError::DimensionMismatch {
                    what: format!("constraint c{i}"),
                    expected: n,
                    found: row.coefficients.len(),
                });
            }
            if !row.rhs.is_finite() || row.coefficients.iter().any(|a| !a.is_finite()) {
                return Err(LpError::NonFinite(format!("constraint c{i}")));
            }
        }
        Ok(())
    }

    pub fn objective_at(&self, point: &[f64]) -> f64 {
        self.objective.iter().zip(point).map(|(c, z)| c * z).sum()
    }

    /// Largest row-scaled violation at `point`, including bound violations.
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        let rows = self
            .constraints
            .iter()
            .map(|row| row.scaled_violation(point));
        let bounds = self
            .bounds
            .iter()
            .zip(point)
            .map(|(bound, &z)| match bound {
                VarBound::NonNegative => (-z).max(0.0),
                VarBound::Free => 0.0,
            });
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

fn write_linear(f: &mut fmt::Formatter<'_>, coefficients: &[f64]) -> fmt::Result {
    let mut first = true;
    for (j, &a) in coefficients.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        if first {
            write!(f, "{a:?} x{j}")?;
            first = false;
        } else if a < 0.0 {
            write!(f, " - {:?} x{j}", -a)?;
        } else {
            write!(f, " + {a:?} x{j}")?;
        }
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

/// Plain-text `minimize / subject to` dump, used for bug reports.
impl fmt::Display for LinearProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "minimize")?;
        write!(f, "  obj: ")?;
        write_linear(f, &self.objective)?;
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for (i, row) in self.constraints.iter().enumerate() {
            write!(f, "  c{i}: ")?;
            write_linear(f, &row.coefficients)?;
            writeln!(f, " {} {:?}", row.relation.symbol(), row.rhs)?;
        }
        writeln!(f, "bounds")?;
        for (j, bound) in self.bounds.iter().enumerate() {
            match bound {
                VarBound::NonNegative => writeln!(f, "  x{j} >= 0")?,
                VarBound::Free => writeln!(f, "  x{j} free")?,
            }
        }
        write!(f, "end")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal {
        objective_value: f64,
        variables: Vec<f64>,
    },
    Infeasible,
    Unbounded,
}

impl LpSolution {
    pub fn status(&self) -> LpStatus {
        match self {
            LpSolution::Optimal { .. } => LpStatus::Optimal,
            LpSolution::Infeasible => LpStatus::Infeasible,
            LpSolution::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn objective_value(&self) -> Option<f64> {
        match self {
            LpSolution::Optimal {
                objective_value, ..
            } => Some(*objective_value),
            _ => None,
        }
    }

    pub fn variables(&self) -> Option<&[f64]> {
        match self {
            LpSolution::Optimal { variables, .. } => Some(variables),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("{what}: expected {expected} entries, found {found}")]
    DimensionMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("non-finite entry in {0}")]
    NonFinite(String),
    #[error("numerical failure: {0}; the instance may need rescaling")]
    NumericalFailure(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Feasibility tolerance, absolute after row scaling.
    pub feasibility_tol: f64,
    /// Smallest admissible pivot magnitude.
    pub pivot_tol: f64,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_pivot_limit: usize,
    pub max_iterations: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-9,
            pivot_tol: 1e-10,
            degenerate_pivot_limit: 50,
            max_iterations: 100_000,
        }
    }
}

pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_lp_with(lp, &SolverOptions::default())
}

pub fn solve_lp_with(lp: &LinearProgram, options: &SolverOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let mut form = match StandardForm::build(lp, options) {
        Some(form) => form,
        None => return Ok(LpSolution::Infeasible),
    };

    if form.num_artificial > 0 {
        let mut phase_one = vec![0.0; form.num_cols];
        phase_one[form.artificial_start..].fill(1.0);
        let outcome = form.tableau.optimize(&phase_one, form.num_cols, options)?;
        debug_assert_eq!(outcome, PhaseOutcome::Optimal);
        let residual: f64 = form.tableau.objective_value(&phase_one);
        if residual > options.feasibility_tol * (1.0 + form.rhs_scale) {
            return Ok(LpSolution::Infeasible);
        }
        form.tableau
            .expel_artificials(form.artificial_start, options);
    }

    let mut cost = vec![0.0; form.num_cols];
    for (j, &(pos, neg)) in form.columns.iter().enumerate() {
        cost[pos] = lp.objective[j];
        if let Some(neg) = neg {
            cost[neg] = -lp.objective[j];
        }
    }
    match form
        .tableau
        .optimize(&cost, form.artificial_start, options)?
    {
        PhaseOutcome::Unbounded => Ok(LpSolution::Unbounded),
        PhaseOutcome::Optimal => {
            let values = form.tableau.primal_values(form.num_cols);
            let variables: Vec<f64> = form
                .columns
                .iter()
                .map(|&(pos, neg)| values[pos] - neg.map_or(0.0, |neg| values[neg]))
                .collect();
            let violation = lp.max_violation(&variables);
            if violation > options.feasibility_tol.sqrt() * (1.0 + form.rhs_scale) {
                return Err(LpError::NumericalFailure(format!(
                    "optimal basis violates a constraint by {violation:e}"
                )));
            }
            Ok(LpSolution::Optimal {
                objective_value: lp.objective_at(&variables),
                variables,
            })
        }
    }
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

struct StandardForm {
    tableau: Tableau,
    /// Per original variable: positive-part column and optional negative-part column.
    columns: Vec<(usize, Option<usize>)>,
    num_cols: usize,
    artificial_start: usize,
    num_artificial: usize,
    rhs_scale: f64,
}

impl StandardForm {
    /// Returns `None` when a zero row is trivially infeasible.
    fn build(lp: &LinearProgram, options: &SolverOptions) -> Option<Self> {
        let mut columns = Vec::with_capacity(lp.num_vars());
        let mut next = 0;
        for bound in &lp.bounds {
            match bound {
                VarBound::NonNegative => {
                    columns.push((next, None));
                    next += 1;
                }
                VarBound::Free => {
                    columns.push((next, Some(next + 1)));
                    next += 2;
                }
            }
        }
        let num_structural = next;

        let mut rows: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(lp.constraints.len());
        for row in &lp.constraints {
            let mut coefficients = vec![0.0; num_structural];
            for (j, &(pos, neg)) in columns.iter().enumerate() {
                coefficients[pos] = row.coefficients[j];
                if let Some(neg) = neg {
                    coefficients[neg] = -row.coefficients[j];
                }
            }
            let scale = max_abs(&coefficients);
            if scale == 0.0 {
                let ok = match row.relation {
                    Relation::Le => row.rhs >= -options.feasibility_tol,
                    Relation::Ge => row.rhs <= options.feasibility_tol,
                    Relation::Eq => row.rhs.abs() <= options.feasibility_tol,
                };
                if !ok {
                    return None;
                }
                continue;
            }
            let mut rhs = row.rhs / scale;
            let mut relation = row.relation;
            coefficients.iter_mut().for_each(|a| *a /= scale);
            if rhs < 0.0 {
                rhs = -rhs;
                relation = relation.flipped();
                coefficients.iter_mut().for_each(|a| *a = -*a);
            }
            rows.push((coefficients, relation, rhs));
        }

        let num_slack = rows
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Eq)
            .count();
        let num_artificial = rows
            .iter()
            .filter(|(_, rel, _)| *rel != Relation::Le)
            .count();
        let artificial_start = num_structural + num_slack;
        let num_cols = artificial_start + num_artificial;

        let mut tableau = Tableau::new(rows.len(), num_cols);
        let mut slack = num_structural;
        let mut artificial = artificial_start;
        let mut rhs_scale: f64 = 0.0;
        for (i, (coefficients, relation, rhs)) in rows.into_iter().enumerate() {
            let r = tableau.row_mut(i);
            r[..num_structural].copy_from_slice(&coefficients);
            r[num_cols] = rhs;
            rhs_scale = rhs_scale.max(rhs);
            match relation {
                Relation::Le => {
                    r[slack] = 1.0;
                    tableau.basis[i] = slack;
                    slack += 1;
                }
                Relation::Ge => {
                    r[slack] = -1.0;
                    r[artificial] = 1.0;
                    tableau.basis[i] = artificial;
                    slack += 1;
                    artificial += 1;
                }
                Relation::Eq => {
                    r[artificial] = 1.0;
                    tableau.basis[i] = artificial;
                    artificial += 1;
                }
            }
        }

        Some(Self {
            tableau,
            columns,
            num_cols,
            artificial_start,
            num_artificial,
            rhs_scale,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhaseOutcome {
    Optimal,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PivotRule {
    Dantzig,
    Bland,
}

/// Row-major dense tableau `[A | b]` with an explicit basis.
struct Tableau {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
}

impl Tableau {
    fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * (cols + 1)],
            basis: vec![usize::MAX; rows],
        }
    }

    fn width(&self) -> usize {
        self.cols + 1
    }

    fn row(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.data[i * w..(i + 1) * w]
    }

    fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.width();
        &mut self.data[i * w..(i + 1) * w]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.row(i)[self.cols]
    }

    fn objective_value(&self, cost: &[f64]) -> f64 {
        (0..self.rows)
            .map(|i| cost[self.basis[i]] * self.rhs(i))
            .sum()
    }

    fn primal_values(&self, num_cols: usize) -> Vec<f64> {
        let mut values = vec![0.0; num_cols];
        for i in 0..self.rows {
            values[self.basis[i]] = self.rhs(i).max(0.0);
        }
        values
    }

    /// Reduced costs `c_j - c_B B^-1 A_j`, with `-z` stored in the last slot.
    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut reduced = cost.to_vec();
        reduced.push(0.0);
        for i in 0..self.rows {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                for (r, a) in reduced.iter_mut().zip(self.row(i)) {
                    *r -= cb * a;
                }
            }
        }
        reduced
    }

    fn pivot(&mut self, pivot_row: usize, pivot_col: usize, reduced: &mut [f64]) {
        let w = self.width();
        let inv = 1.0 / self.data[pivot_row * w + pivot_col];
        for a in self.row_mut(pivot_row) {
            *a *= inv;
        }
        self.data[pivot_row * w + pivot_col] = 1.0;
        let pivot_vals: Vec<f64> = self.row(pivot_row).to_vec();
        for i in 0..self.rows {
            if i == pivot_row {
                continue;
            }
            let factor = self.data[i * w + pivot_col];
            if factor == 0.0 {
                continue;
            }
            let row = self.row_mut(i);
            for (a, p) in row.iter_mut().zip(&pivot_vals) {
                *a -= factor * p;
            }
            row[pivot_col] = 0.0;
            let rhs = &mut row[w - 1];
            if *rhs < 0.0 && *rhs > -1e-13 {
                *rhs = 0.0;
            }
        }
        let factor = reduced[pivot_col];
        if factor != 0.0 {
            for (r, p) in reduced.iter_mut().zip(&pivot_vals) {
                *r -= factor * p;
            }
            reduced[pivot_col] = 0.0;
        }
        self.basis[pivot_row] = pivot_col;
    }

    /// Minimizes `cost` using only columns `< allowed_cols` as entering candidates.
    fn optimize(
        &mut self,
        cost: &[f64],
        allowed_cols: usize,
        options: &SolverOptions,
    ) -> Result<PhaseOutcome, LpError> {
        let mut reduced = self.reduced_costs(cost);
        let mut rule = PivotRule::Dantzig;
        let mut degenerate_run = 0;
        let mut is_basic = vec![false; self.cols];
        for &b in &self.basis {
            is_basic[b] = true;
        }

        for _ in 0..options.max_iterations {
            let entering = match rule {
                PivotRule::Dantzig => {
                    let mut best: Option<(usize, f64)> = None;
                    for (j, &r) in reduced[..allowed_cols].iter().enumerate() {
                        if !is_basic[j]
                            && r < -options.feasibility_tol
                            && best.is_none_or(|(_, b)| r < b)
                        {
                            best = Some((j, r));
                        }
                    }
                    best.map(|(j, _)| j)
                }
                PivotRule::Bland => (0..allowed_cols)
                    .find(|&j| !is_basic[j] && reduced[j] < -options.feasibility_tol),
            };
            let Some(entering) = entering else {
                return Ok(PhaseOutcome::Optimal);
            };

            let w = self.width();
            let mut leaving: Option<(usize, f64)> = None;
            for i in 0..self.rows {
                let a = self.data[i * w + entering];
                if a <= options.pivot_tol {
                    continue;
                }
                let ratio = self.rhs(i).max(0.0) / a;
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((l, best)) => {
                        let tie = (ratio - best).abs() <= 1e-12 * (1.0 + best);
                        let better = if tie {
                            match rule {
                                PivotRule::Bland => self.basis[i] < self.basis[l],
                                PivotRule::Dantzig => {
                                    let al = self.data[l * w + entering];
                                    a > al || (a == al && self.basis[i] < self.basis[l])
                                }
                            }
                        } else {
                            ratio < best
                        };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((l, best))
                        }
                    }
                };
            }
            let Some((leaving, ratio)) = leaving else {
                return Ok(PhaseOutcome::Unbounded);
            };

            if ratio <= options.feasibility_tol {
                degenerate_run += 1;
                if degenerate_run > options.degenerate_pivot_limit {
                    rule = PivotRule::Bland;
                }
            } else {
                degenerate_run = 0;
            }

            is_basic[self.basis[leaving]] = false;
            is_basic[entering] = true;
            self.pivot(leaving, entering, &mut reduced);
            if !reduced.iter().all(|r| r.is_finite()) {
                return Err(LpError::NumericalFailure("tableau overflow".into()));
            }
        }
        Err(LpError::NumericalFailure(format!(
            "no convergence within {} pivots",
            options.max_iterations
        )))
    }

    /// Pivots zero-valued artificials out of the basis; rows where no
    /// structural or slack column can replace them are redundant and dropped.
    fn expel_artificials(&mut self, artificial_start: usize, options: &SolverOptions) {
        let mut i = 0;
        while i < self.rows {
            if self.basis[i] < artificial_start {
                i += 1;
                continue;
            }
            let row = self.row(i);
            let replacement = (0..artificial_start)
                .filter(|&j| row[j].abs() > options.pivot_tol)
                .max_by(|&a, &b| row[a].abs().total_cmp(&row[b].abs()).then(b.cmp(&a)));
            match replacement {
                Some(j) => {
                    let mut scratch = vec![0.0; self.cols + 1];
                    self.pivot(i, j, &mut scratch);
                    i += 1;
                }
                None => self.remove_row(i),
            }
        }
    }

    fn remove_row(&mut self, i: usize) {
        let w = self.width();
        self.data.drain(i * w..(i + 1) * w);
        self.basis.remove(i);
        self.rows -= 1;
    }
}
