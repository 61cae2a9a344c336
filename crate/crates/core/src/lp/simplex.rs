//! Two-phase primal simplex on a dense tableau with Bland's rule.
//!
//! Generic over [`Scalar`], so the same code runs over exact rationals
//! (terminating, with exact Farkas certificates) and floats with ε pivots.

use crate::error::{Error, Result};
use crate::numerics::{dot, echelon, solve, vec_mul, Matrix, Mode, Scalar, Tolerance};

/// `minimise c·x  subject to  A·x = b,  0 ≤ x ≤ upper`.
#[derive(Clone, Debug)]
pub struct LinearProgram<T> {
    pub objective: Vec<T>,
    pub constraints: Matrix<T>,
    pub rhs: Vec<T>,
    /// Optional finite upper bound per variable.
    pub upper: Vec<Option<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(objective: Vec<T>, constraints: Matrix<T>, rhs: Vec<T>) -> Result<Self> {
        let lp = LinearProgram {
            upper: vec![None; objective.len()],
            objective,
            constraints,
            rhs,
        };
        lp.check_shapes()?;
        Ok(lp)
    }

    pub fn with_upper_bound(mut self, var: usize, bound: T) -> Result<Self> {
        if var >= self.upper.len() {
            return Err(Error::Dimension(format!(
                "variable {var} out of range for {} variables",
                self.upper.len()
            )));
        }
        self.upper[var] = Some(bound);
        Ok(self)
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    fn check_shapes(&self) -> Result<()> {
        let (rows, cols) = self.constraints.shape();
        if cols != self.objective.len() || rows != self.rhs.len() || self.upper.len() != cols {
            return Err(Error::Dimension(format!(
                "linear program with {} variables has a {rows}x{cols} constraint matrix and {} right-hand sides",
                self.objective.len(),
                self.rhs.len()
            )));
        }
        Ok(())
    }

    /// Equality form with one slack column per upper bound, appended after the
    /// original variables; bound rows follow the original rows.
    fn standard_form(&self) -> (Matrix<T>, Vec<T>, Vec<T>) {
        let n = self.num_vars();
        let bounded: Vec<(usize, &T)> = self
            .upper
            .iter()
            .enumerate()
            .filter_map(|(i, u)| u.as_ref().map(|u| (i, u)))
            .collect();
        let k = bounded.len();
        let rows = self.constraints.nrows();
        let mut a = Matrix::zeros(rows + k, n + k);
        for i in 0..rows {
            for j in 0..n {
                a[(i, j)] = self.constraints[(i, j)].clone();
            }
        }
        let mut b = self.rhs.clone();
        for (s, &(var, u)) in bounded.iter().enumerate() {
            a[(rows + s, var)] = T::one();
            a[(rows + s, n + s)] = T::one();
            b.push(u.clone());
        }
        let mut c = self.objective.clone();
        c.extend(std::iter::repeat_n(T::zero(), k));
        (a, b, c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome<T> {
    /// An optimal basic feasible solution.
    Optimal {
        x: Vec<T>,
        objective: T,
        /// Variables in the final basis (original indices; bound slacks omitted).
        basis: Vec<usize>,
    },
    /// No feasible point. `certificate` ranges over the original rows followed
    /// by one row per upper bound (`x_i ≤ u_i`); it satisfies `yᵀA ≤ 0` on
    /// every column and `yᵀb > 0` — exactly in exact mode. `gap` is `yᵀb`.
    Infeasible { certificate: Vec<T>, gap: T },
}

pub fn solve_lp<T: Scalar>(lp: &LinearProgram<T>, tol: Tolerance) -> Result<LpOutcome<T>> {
    lp.check_shapes()?;
    let (a, b, c) = lp.standard_form();
    let n_orig = lp.num_vars();
    let total_vars = a.ncols();

    // Redundant rows go first: reduce [A | b] while tracking row combinations.
    let mut aug = Matrix::zeros(a.nrows(), total_vars + 1);
    for i in 0..a.nrows() {
        for j in 0..total_vars {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, total_vars)] = b[i].clone();
    }
    let ech = echelon(&aug, tol);
    if let Some(pos) = ech.pivots.iter().position(|&p| p == total_vars) {
        let y = ech.combination.row(pos).to_vec();
        let gap = dot(&y, &b);
        return Ok(LpOutcome::Infeasible {
            certificate: y,
            gap,
        });
    }
    let comb = ech.combination;
    let rows = comb.nrows();
    let reduced_a = comb.matmul(&a)?;
    let reduced_b = comb.mul_vec(&b)?;

    let mut tab = Tableau::phase_one(&reduced_a, &reduced_b, tol);
    tab.run(None)?;
    let infeas = tab.value();
    let infeasible = match T::MODE {
        Mode::Exact => !infeas.is_zero(),
        Mode::Approximate => infeas.is_positive_tol(tol),
    };
    if infeasible {
        // y = c_Bᵀ B⁻¹ read off the artificial columns: d_art = 1 − y.
        let y_flipped: Vec<T> = (0..rows)
            .map(|i| T::one() - tab.reduced_cost(total_vars + i))
            .collect();
        let y_reduced: Vec<T> = y_flipped
            .into_iter()
            .zip(&tab.flipped)
            .map(|(y, &f)| if f { -y } else { y })
            .collect();
        let y = vec_mul(&y_reduced, &comb)?;
        if T::MODE == Mode::Exact {
            let ya = vec_mul(&y, &a)?;
            if ya.iter().any(|v| v.is_positive()) || !dot(&y, &b).is_positive() {
                return Err(Error::Internal("Farkas certificate failed verification".into()));
            }
        }
        return Ok(LpOutcome::Infeasible {
            certificate: y,
            gap: infeas,
        });
    }

    tab.drive_out_artificials();
    tab.set_costs(&c);
    tab.run(Some(total_vars))?;

    let mut x = vec![T::zero(); total_vars];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < total_vars {
            x[bv] = tab.rhs(i);
        }
    }
    if T::MODE == Mode::Approximate {
        polish(&a, &b, &comb, &reduced_a, &reduced_b, &tab.basis, &mut x, tol)?;
    }
    let basis: Vec<usize> = tab.basis.iter().copied().filter(|&v| v < n_orig).collect();
    x.truncate(n_orig);
    let objective = dot(&lp.objective, &x);
    Ok(LpOutcome::Optimal {
        x,
        objective,
        basis,
    })
}

/// Recomputes a float basic solution from the original data (one direct
/// solve plus one refinement step), so pivoting round-off does not
/// accumulate in the certificate. Kept only when it lowers the residual.
#[allow(clippy::too_many_arguments)]
fn polish<T: Scalar>(
    a: &Matrix<T>,
    b: &[T],
    comb: &Matrix<T>,
    reduced_a: &Matrix<T>,
    reduced_b: &[T],
    basis: &[usize],
    x: &mut [T],
    tol: Tolerance,
) -> Result<()> {
    if basis.iter().any(|&v| v >= x.len()) {
        return Ok(());
    }
    let square = Matrix::from_rows(
        reduced_a.rows_iter().map(|r| basis.iter().map(|&j| r[j].clone()).collect()).collect(),
        basis.len(),
    )?;
    let residual = |x: &[T]| -> Result<(Vec<T>, T)> {
        let ax = a.mul_vec(x)?;
        let r: Vec<T> = b.iter().zip(&ax).map(|(bi, ai)| bi.clone() - ai.clone()).collect();
        let worst = r.iter().fold(T::zero(), |m, v| if v.abs() > m { v.abs() } else { m });
        Ok((r, worst))
    };
    let Some(xb) = solve(&square, reduced_b, tol)? else {
        return Ok(());
    };
    let mut candidate = vec![T::zero(); x.len()];
    for (&j, v) in basis.iter().zip(xb) {
        candidate[j] = v;
    }
    let (r, _) = residual(&candidate)?;
    if let Some(dx) = solve(&square, &comb.mul_vec(&r)?, tol)? {
        for (&j, d) in basis.iter().zip(dx) {
            candidate[j] = candidate[j].clone() + d;
        }
    }
    let (_, before) = residual(x)?;
    let (_, after) = residual(&candidate)?;
    if after < before && candidate.iter().all(|v| !v.is_negative_tol(tol)) {
        x.clone_from_slice(&candidate);
    }
    Ok(())
}

/// Dense tableau `[A | I_art | b]` with a separate reduced-cost row.
struct Tableau<T> {
    rows: Vec<Vec<T>>,
    /// Reduced costs per column followed by `−objective value` in the last slot.
    cost: Vec<T>,
    basis: Vec<usize>,
    /// Columns allowed to enter.
    allowed: Vec<bool>,
    /// Which reduced rows were negated to make `b ≥ 0`.
    flipped: Vec<bool>,
    n_struct: usize,
    tol: Tolerance,
}

impl<T: Scalar> Tableau<T> {
    fn phase_one(a: &Matrix<T>, b: &[T], tol: Tolerance) -> Self {
        let (m, n) = a.shape();
        let width = n + m + 1;
        let mut rows = Vec::with_capacity(m);
        let mut flipped = Vec::with_capacity(m);
        for i in 0..m {
            let flip = b[i].is_negative();
            let mut row = vec![T::zero(); width];
            for j in 0..n {
                row[j] = if flip { -a[(i, j)].clone() } else { a[(i, j)].clone() };
            }
            row[n + i] = T::one();
            row[width - 1] = if flip { -b[i].clone() } else { b[i].clone() };
            rows.push(row);
            flipped.push(flip);
        }
        // Phase-one costs: 1 on artificials; price out the artificial basis.
        let mut cost = vec![T::zero(); width];
        for i in 0..m {
            cost[n + i] = T::one();
        }
        for row in &rows {
            for (cj, rj) in cost.iter_mut().zip(row) {
                *cj = cj.clone() - rj.clone();
            }
        }
        for i in 0..m {
            cost[n + i] = T::zero();
        }
        let mut allowed = vec![true; n + m];
        for slot in allowed.iter_mut().skip(n) {
            *slot = false;
        }
        Tableau {
            rows,
            cost,
            basis: (n..n + m).collect(),
            allowed,
            flipped,
            n_struct: n,
            tol,
        }
    }

    fn width(&self) -> usize {
        self.cost.len()
    }

    fn rhs(&self, i: usize) -> T {
        self.rows[i][self.width() - 1].clone()
    }

    fn value(&self) -> T {
        -self.cost[self.width() - 1].clone()
    }

    fn reduced_cost(&self, j: usize) -> T {
        self.cost[j].clone()
    }

    fn set_costs(&mut self, c: &[T]) {
        let w = self.width();
        let mut cost = vec![T::zero(); w];
        cost[..c.len()].clone_from_slice(c);
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = if bv < c.len() { c[bv].clone() } else { T::zero() };
            if cb.is_zero() {
                continue;
            }
            for (cj, rj) in cost.iter_mut().zip(&self.rows[i]) {
                *cj = cj.clone() - cb.clone() * rj.clone();
            }
        }
        self.cost = cost;
    }

    /// Bland's rule until optimal. `bounded_cols` marks the columns whose
    /// unboundedness should be reported (phase two); phase one is always bounded.
    fn run(&mut self, bounded_cols: Option<usize>) -> Result<()> {
        let tol = self.tol;
        loop {
            let entering = (0..self.width() - 1)
                .find(|&j| self.allowed[j] && self.cost[j].is_negative_tol(tol));
            let Some(q) = entering else {
                return Ok(());
            };
            let candidates: Vec<(usize, T)> = (0..self.rows.len())
                .filter(|&i| self.rows[i][q].is_positive_tol(tol))
                .map(|i| (i, self.rhs(i) / self.rows[i][q].clone()))
                .collect();
            let min_ratio = candidates
                .iter()
                .map(|(_, r)| r.clone())
                .reduce(|a, b| if b < a { b } else { a });
            // Bland: among the minimising rows, the smallest basic variable leaves.
            let leave = min_ratio.and_then(|min| {
                candidates
                    .into_iter()
                    .filter(|(_, r)| (r.clone() - min.clone()).is_zero_tol(tol))
                    .min_by_key(|&(i, _)| self.basis[i])
            });
            let Some((p, _)) = leave else {
                if bounded_cols.is_some() {
                    return Err(Error::Unbounded);
                }
                return Err(Error::Internal("phase-one objective unbounded".into()));
            };
            self.pivot(p, q);
        }
    }

    fn pivot(&mut self, p: usize, q: usize) {
        let inv = T::one() / self.rows[p][q].clone();
        for v in self.rows[p].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        self.rows[p][q] = T::one();
        let pivot_row = self.rows[p].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == p {
                continue;
            }
            let f = row[q].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            row[q] = T::zero();
        }
        let f = self.cost[q].clone();
        if !f.is_zero() {
            for (v, pv) in self.cost.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v = v.clone() - f.clone() * pv.clone();
                }
            }
            self.cost[q] = T::zero();
        }
        self.basis[p] = q;
    }

    /// Pivots zero-level artificials out of the basis; rows that cannot be
    /// pivoted (only possible through rounding) are dropped.
    fn drive_out_artificials(&mut self) {
        let tol = self.tol;
        let mut i = 0;
        while i < self.rows.len() {
            if self.basis[i] >= self.n_struct {
                let col = (0..self.n_struct).find(|&j| !self.rows[i][j].is_zero_tol(tol));
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                    }
                    None => {
                        self.rows.remove(i);
                        self.basis.remove(i);
                        self.flipped.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }
}
