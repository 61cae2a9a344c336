//! The simplex solver against vertex enumeration: every basis of a
//! full-row-rank system is solved by Cramer's rule, and the best feasible
//! vertex must match the solver's optimum.

mod common;

use common::*;
use nctest_core::lp::{solve_lp, LinearProgram, LpOutcome};
use nctest_core::numerics::{rank, vec_mul, Matrix, Rational, Scalar};
use nctest_core::Error;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::Rng;

/// Basic feasible solutions of `Ax = b, x ≥ 0` (A of full row rank).
fn vertices(a: &Matrix<Rational>, b: &[Rational]) -> Vec<Vec<Rational>> {
    let (m, n) = a.shape();
    let mut out = Vec::new();
    for s in subsets(n, m) {
        let cols: Vec<Vec<Rational>> = (0..m).map(|r| s.iter().map(|&j| a[(r, j)].clone()).collect()).collect();
        let base = det(&cols);
        if base.is_zero() {
            continue;
        }
        let mut x = vec![Rational::zero(); n];
        for (k, &j) in s.iter().enumerate() {
            let replaced: Vec<Vec<Rational>> = cols
                .iter()
                .enumerate()
                .map(|(r, row)| {
                    let mut row = row.clone();
                    row[k] = b[r].clone();
                    row
                })
                .collect();
            x[j] = det(&replaced) / base.clone();
        }
        if x.iter().all(|v| !v.is_negative()) && !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |s, (x, y)| s + x.clone() * y.clone())
}

fn random_system(rng: &mut Rng8) -> (Matrix<Rational>, Vec<Rational>) {
    loop {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(m..=6);
        let a = random_matrix(rng, m, n, -3, 3, 1);
        if rank(&a, exact()) == m {
            let b = (0..m).map(|_| q(rng.gen_range(-4..=6), 1)).collect();
            return (a, b);
        }
    }
}

fn check_against_vertices(a: Matrix<Rational>, b: Vec<Rational>, c: Vec<Rational>) {
    let verts = vertices(&a, &b);
    let lp = LinearProgram::new(c.clone(), a.clone(), b.clone()).unwrap();
    match solve_lp(&lp, exact()) {
        Ok(LpOutcome::Optimal { x, objective, .. }) => {
            assert!(x.iter().all(|v| !v.is_negative()));
            assert_eq!(a.mul_vec(&x).unwrap(), b);
            assert_eq!(objective, dot(&c, &x));
            assert!(!verts.is_empty(), "solver found a point the enumeration missed");
            let best = verts.iter().map(|v| dot(&c, v)).min().unwrap();
            assert_eq!(objective, best, "A = {a:?}, b = {b:?}, c = {c:?}");
            assert!(verts.contains(&x), "solution is not a vertex");
        }
        Ok(LpOutcome::Infeasible { certificate: y, gap }) => {
            assert!(verts.is_empty(), "solver says infeasible but {:?} is feasible", verts[0]);
            let ya = vec_mul(&y, &a).unwrap();
            assert!(ya.iter().all(|v| !v.is_positive()), "yA = {ya:?}");
            assert!(dot(&y, &b).is_positive());
            assert!(gap.is_positive());
        }
        Err(Error::Unbounded) => {
            assert!(!verts.is_empty());
            assert!(c.iter().any(|v| v.is_negative()));
        }
        Err(e) => panic!("{e}"),
    }
}

#[test]
fn nonnegative_costs_match_vertex_enumeration() {
    let mut rng = rng(21);
    for _ in 0..400 {
        let (a, b) = random_system(&mut rng);
        let c = (0..a.ncols()).map(|_| q(rng.gen_range(0..=5), 1)).collect();
        check_against_vertices(a, b, c);
    }
}

#[test]
fn signed_costs_match_or_report_unbounded() {
    let mut rng = rng(22);
    for _ in 0..400 {
        let (a, b) = random_system(&mut rng);
        let c = (0..a.ncols()).map(|_| q(rng.gen_range(-3..=5), 1)).collect();
        check_against_vertices(a, b, c);
    }
}

#[test]
fn redundant_rows_are_tolerated() {
    let mut rng = rng(23);
    for _ in 0..200 {
        let (a, b) = random_system(&mut rng);
        let c: Vec<Rational> = (0..a.ncols()).map(|_| q(rng.gen_range(0..=5), 1)).collect();
        // Append the sum of all rows as a duplicate constraint.
        let mut rows = a.to_rows();
        let sum_row: Vec<Rational> = (0..a.ncols()).map(|j| a.column(j).into_iter().fold(Rational::zero(), |s, v| s + v)).collect();
        rows.push(sum_row);
        let mut b2 = b.clone();
        b2.push(b.iter().cloned().fold(Rational::zero(), |s, v| s + v));
        let lp_a = LinearProgram::new(c.clone(), a.clone(), b.clone()).unwrap();
        let lp_b = LinearProgram::new(c, Matrix::from_rows(rows, a.ncols()).unwrap(), b2).unwrap();
        let objective = |o: LpOutcome<Rational>| match o {
            LpOutcome::Optimal { objective, .. } => Some(objective),
            LpOutcome::Infeasible { .. } => None,
        };
        assert_eq!(
            objective(solve_lp(&lp_a, exact()).unwrap()),
            objective(solve_lp(&lp_b, exact()).unwrap())
        );
    }
}

#[test]
fn upper_bound_matches_explicit_slack() {
    let mut rng = rng(24);
    for _ in 0..200 {
        let (a, b) = random_system(&mut rng);
        let n = a.ncols();
        let c: Vec<Rational> = (0..n).map(|_| q(rng.gen_range(-2..=5), 1)).collect();
        let u = q(rng.gen_range(0..=4), 2);
        // x₀ + s = u as an explicit row with its own slack column.
        let mut rows: Vec<Vec<Rational>> = a.to_rows().into_iter().map(|mut r| {
            r.push(Rational::zero());
            r
        }).collect();
        let mut bound = vec![Rational::zero(); n + 1];
        bound[0] = Rational::from_i64(1);
        bound[n] = Rational::from_i64(1);
        rows.push(bound);
        let mut b2 = b.clone();
        b2.push(u.clone());
        let mut c2 = c.clone();
        c2.push(Rational::zero());
        let bounded = LinearProgram::new(c, a, b).unwrap().with_upper_bound(0, u).unwrap();
        let explicit = LinearProgram::new(c2, Matrix::from_rows(rows, n + 1).unwrap(), b2).unwrap();
        let summary = |r: Result<LpOutcome<Rational>, Error>| match r {
            Ok(LpOutcome::Optimal { objective, .. }) => Ok(Some(objective)),
            Ok(LpOutcome::Infeasible { .. }) => Ok(None),
            Err(Error::Unbounded) => Err(()),
            Err(e) => panic!("{e}"),
        };
        assert_eq!(summary(solve_lp(&bounded, exact())), summary(solve_lp(&explicit, exact())));
    }
}

proptest! {
    #[test]
    fn float_solver_tracks_exact(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let (a, b) = random_system(&mut rng);
        let c: Vec<Rational> = (0..a.ncols()).map(|_| q(rng.gen_range(0..=5), 1)).collect();
        let exact_lp = LinearProgram::new(c.clone(), a.clone(), b.clone()).unwrap();
        let float_lp = LinearProgram::new(
            c.iter().map(Scalar::to_f64).collect(),
            a.to_f64(),
            b.iter().map(Scalar::to_f64).collect(),
        ).unwrap();
        match (solve_lp(&exact_lp, exact()).unwrap(), solve_lp(&float_lp, exact()).unwrap()) {
            (LpOutcome::Optimal { objective: e, .. }, LpOutcome::Optimal { objective: f, x, .. }) => {
                prop_assert!((e.to_f64() - f).abs() <= 1e-9 * (1.0 + f.abs()));
                let ax = float_lp.constraints.mul_vec(&x).unwrap();
                for (l, r) in ax.iter().zip(&float_lp.rhs) {
                    prop_assert!((l - r).abs() <= 1e-9);
                }
            }
            (LpOutcome::Infeasible { .. }, LpOutcome::Infeasible { .. }) => {}
            (e, f) => prop_assert!(false, "exact {e:?} vs float {f:?}"),
        }
    }
}
