//! Brute-force reference solvers used only by tests.
#![allow(dead_code)]

use effrank_core::{LinearProgram, LpStatus, Relation, VarBound};

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub status: LpStatus,
    pub objective: f64,
}

/// Dense Gaussian elimination with partial pivoting; `None` if (near) singular.
pub fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot_row = a[col].clone();
        for r in 0..n {
            if r != col {
                let f = a[r][col] / pivot_row[col];
                if f != 0.0 {
                    for (dst, src) in a[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *dst -= f * src;
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

struct Row {
    coefficients: Vec<f64>,
    relation: Relation,
    rhs: f64,
}

fn feasible(rows: &[Row], z: &[f64], tol: f64) -> bool {
    rows.iter().all(|r| {
        let lhs: f64 = r.coefficients.iter().zip(z).map(|(a, v)| a * v).sum();
        let scale = 1.0 + r.coefficients.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        match r.relation {
            Relation::Le => lhs <= r.rhs + tol * scale,
            Relation::Ge => lhs >= r.rhs - tol * scale,
            Relation::Eq => (lhs - r.rhs).abs() <= tol * scale,
        }
    })
}

/// Minimum of `objective` over the vertices of `{rows}`; `None` if no vertex exists.
fn best_vertex(objective: &[f64], rows: &[Row]) -> Option<(f64, Vec<f64>)> {
    subsets(rows.len(), objective.len())
        .into_iter()
        .filter_map(|active| vertex(objective, rows, &active))
        .min_by(|a, b| a.0.total_cmp(&b.0))
}

fn vertex(objective: &[f64], rows: &[Row], active: &[usize]) -> Option<(f64, Vec<f64>)> {
    let a = active
        .iter()
        .map(|&i| rows[i].coefficients.clone())
        .collect();
    let b = active.iter().map(|&i| rows[i].rhs).collect();
    let z = solve_square(a, b)?;
    feasible(rows, &z, 1e-9).then(|| (objective.iter().zip(&z).map(|(c, v)| c * v).sum(), z))
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// Vertex-enumeration oracle for programs whose variables are all nonnegative.
///
/// A nonempty polyhedron inside the nonnegative orthant always has a vertex, so
/// "no feasible vertex" means infeasible. Unboundedness is decided on the
/// recession cone normalized by `Σd = 1`: the program is unbounded iff some
/// extreme ray has negative cost.
pub fn vertex_oracle(lp: &LinearProgram) -> OracleResult {
    assert!(lp.bounds.iter().all(|b| *b == VarBound::NonNegative));
    let n = lp.num_vars();
    let mut rows: Vec<Row> = lp
        .constraints
        .iter()
        .map(|c| Row {
            coefficients: c.coefficients.clone(),
            relation: c.relation,
            rhs: c.rhs,
        })
        .collect();
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        rows.push(Row {
            coefficients: e,
            relation: Relation::Ge,
            rhs: 0.0,
        });
    }
    let Some((objective, _)) = best_vertex(&lp.objective, &rows) else {
        return OracleResult {
            status: LpStatus::Infeasible,
            objective: f64::NAN,
        };
    };

    let mut cone: Vec<Row> = rows
        .iter()
        .map(|r| Row {
            coefficients: r.coefficients.clone(),
            relation: r.relation,
            rhs: 0.0,
        })
        .collect();
    cone.push(Row {
        coefficients: vec![1.0; n],
        relation: Relation::Eq,
        rhs: 1.0,
    });
    if let Some((ray_cost, _)) = best_vertex(&lp.objective, &cone) {
        if ray_cost < -1e-9 {
            return OracleResult {
                status: LpStatus::Unbounded,
                objective: f64::NEG_INFINITY,
            };
        }
    }
    OracleResult {
        status: LpStatus::Optimal,
        objective,
    }
}

/// Classical single-input single-output efficiency: `(y_i/x_i) / max_k (y_k/x_k)`.
pub fn ratio_efficiency(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let ratios: Vec<f64> = xs.iter().zip(ys).map(|(x, y)| y / x).collect();
    let best = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    ratios.iter().map(|r| r / best).collect()
}

/// Small deterministic generator for test instances (SplitMix64).
pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        let u = (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
        lo + (hi - lo) * u
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        lo + (self.next_u64() % (hi - lo + 1) as u64) as i64
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}

/// Random LP over nonnegative variables with small integer data.
pub fn random_lp(rng: &mut TestRng, max_vars: usize, max_rows: usize) -> LinearProgram {
    let n = 1 + rng.below(max_vars);
    let m = 1 + rng.below(max_rows);
    let objective = (0..n).map(|_| rng.int(-5, 5) as f64).collect();
    let mut lp = LinearProgram::new(objective);
    for _ in 0..m {
        let coefficients = (0..n).map(|_| rng.int(-4, 6) as f64).collect();
        let relation = match rng.below(6) {
            0 => Relation::Eq,
            1 | 2 => Relation::Ge,
            _ => Relation::Le,
        };
        let rhs = rng.int(-3, 10) as f64;
        lp.add_constraint(coefficients, relation, rhs);
    }
    lp
}
