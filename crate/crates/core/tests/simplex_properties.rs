#[path = "common/oracle.rs"]
mod oracle;

use effrank_core::simplex::solve_lp;
use effrank_core::{LinearProgram, LpSolution, LpStatus, Relation, VarBound};
use oracle::{random_lp, vertex_oracle, TestRng};

#[test]
fn agrees_with_vertex_enumeration() {
    let mut rng = TestRng::new(0x5EED_0001);
    let mut seen = [0usize; 3];
    for case in 0..400 {
        let lp = random_lp(&mut rng, 5, 7);
        let expected = vertex_oracle(&lp);
        let got = solve_lp(&lp).unwrap_or_else(|e| panic!("case {case}: {e}\n{lp}"));
        assert_eq!(got.status(), expected.status, "case {case}\n{lp}");
        seen[expected.status as usize] += 1;
        if let LpSolution::Optimal {
            objective_value,
            variables,
        } = got
        {
            assert!(
                (objective_value - expected.objective).abs()
                    <= 1e-7 * (1.0 + expected.objective.abs()),
                "case {case}: {objective_value} vs {}\n{lp}",
                expected.objective
            );
            assert!(lp.max_violation(&variables) <= 1e-9, "case {case}\n{lp}");
        }
    }
    // the generator must exercise every status
    assert!(seen.iter().all(|&c| c > 20), "{seen:?}");
}

#[test]
fn optimum_below_feasible_grid_points() {
    let mut rng = TestRng::new(77);
    let mut checked = 0;
    for _ in 0..200 {
        let lp = random_lp(&mut rng, 3, 4);
        let Ok(LpSolution::Optimal {
            objective_value, ..
        }) = solve_lp(&lp)
        else {
            continue;
        };
        let n = lp.num_vars();
        let steps = 9usize;
        for idx in 0..steps.pow(n as u32) {
            let point: Vec<f64> = (0..n)
                .map(|j| ((idx / steps.pow(j as u32)) % steps) as f64 * 0.5)
                .collect();
            if lp.max_violation(&point) == 0.0 {
                assert!(
                    objective_value <= lp.objective_at(&point) + 1e-7,
                    "{lp}\n{point:?}"
                );
                checked += 1;
            }
        }
    }
    assert!(checked > 100);
}

#[test]
fn constant_shift_through_fixed_variable() {
    let mut rng = TestRng::new(99);
    for _ in 0..200 {
        let lp = random_lp(&mut rng, 4, 5);
        let Ok(base) = solve_lp(&lp) else { continue };
        let Some(base_obj) = base.objective_value() else {
            continue;
        };
        let shift = rng.int(-20, 20) as f64 + 0.25;
        let mut shifted = lp.clone();
        shifted.objective.push(shift);
        shifted.bounds.push(VarBound::NonNegative);
        for row in &mut shifted.constraints {
            row.coefficients.push(0.0);
        }
        let mut fix = vec![0.0; lp.num_vars()];
        fix.push(1.0);
        shifted.add_constraint(fix, Relation::Eq, 1.0);
        let obj = solve_lp(&shifted).unwrap().objective_value().unwrap();
        assert!(
            (obj - (base_obj + shift)).abs() < 1e-9,
            "{obj} vs {base_obj} + {shift}"
        );
    }
}

#[test]
fn permuting_variables_permutes_solution() {
    let mut rng = TestRng::new(4242);
    let mut compared = 0;
    for _ in 0..300 {
        // continuous data makes the optimum unique with probability one
        let n = 2 + rng.below(4);
        let mut lp = LinearProgram::new((0..n).map(|_| rng.uniform(-1.0, 1.0)).collect());
        for _ in 0..1 + rng.below(5) {
            let coefficients = (0..n).map(|_| rng.uniform(0.1, 2.0)).collect();
            lp.add_constraint(coefficients, Relation::Le, rng.uniform(1.0, 5.0));
        }
        let perm: Vec<usize> = {
            let mut p: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                p.swap(i, rng.below(i + 1));
            }
            p
        };
        let mut permuted = LinearProgram::new(perm.iter().map(|&j| lp.objective[j]).collect());
        for row in &lp.constraints {
            permuted.add_constraint(
                perm.iter().map(|&j| row.coefficients[j]).collect(),
                row.relation,
                row.rhs,
            );
        }
        let a = solve_lp(&lp).unwrap();
        let b = solve_lp(&permuted).unwrap();
        assert_eq!(a.status(), LpStatus::Optimal);
        let (za, zb) = (a.variables().unwrap(), b.variables().unwrap());
        assert!((a.objective_value().unwrap() - b.objective_value().unwrap()).abs() < 1e-12);
        for (k, &j) in perm.iter().enumerate() {
            assert!((zb[k] - za[j]).abs() < 1e-9);
        }
        compared += 1;
    }
    assert_eq!(compared, 300);
}

#[test]
fn free_variables_against_split_reformulation() {
    let mut rng = TestRng::new(31337);
    for _ in 0..200 {
        let mut lp = random_lp(&mut rng, 3, 5);
        let free = rng.below(lp.num_vars());
        lp.set_bound(free, VarBound::Free);
        // equivalent program with the free variable written as p - q, p, q >= 0
        let mut split = LinearProgram::new(
            lp.objective
                .iter()
                .copied()
                .chain(std::iter::once(-lp.objective[free]))
                .collect(),
        );
        for row in &lp.constraints {
            let mut c = row.coefficients.clone();
            c.push(-row.coefficients[free]);
            split.add_constraint(c, row.relation, row.rhs);
        }
        let expected = vertex_oracle(&split);
        let got = solve_lp(&lp).unwrap();
        assert_eq!(got.status(), expected.status, "{lp}");
        if let Some(obj) = got.objective_value() {
            assert!((obj - expected.objective).abs() <= 1e-7 * (1.0 + obj.abs()));
        }
    }
}
