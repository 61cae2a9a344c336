use super::matrix::Matrix;
use super::scalar::{Mode, Scalar, Tolerance};
use crate::error::{Error, Result};

/// Reduced row-echelon form of a matrix.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    /// Nonzero rows of the reduced form; pivot columns hold the identity.
    pub basis: Matrix<T>,
    /// Pivot column of each basis row, ascending.
    pub pivots: Vec<usize>,
    /// `combination · input = basis`, tracked for certificate extraction.
    pub combination: Matrix<T>,
    /// Input rows that reduced to zero, expressed as combinations of the input.
    pub null_combinations: Matrix<T>,
}

impl<T: Scalar> Echelon<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss-Jordan elimination.
///
/// Exact mode pivots on the first nonzero entry of each column (in row order);
/// approximate mode pivots on the largest magnitude and treats entries within
/// `tol` as zero.
pub fn echelon<T: Scalar>(m: &Matrix<T>, tol: Tolerance) -> Echelon<T> {
    let (rows, cols) = m.shape();
    let mut a = m.clone();
    let mut comb = Matrix::<T>::identity(rows);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let pick = match T::MODE {
            Mode::Exact => (r..rows).find(|&i| !a[(i, c)].is_zero()),
            Mode::Approximate => (r..rows)
                .filter(|&i| !a[(i, c)].is_zero_tol(tol))
                .max_by(|&i, &j| {
                    a[(i, c)]
                        .abs()
                        .partial_cmp(&a[(j, c)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                        // prefer the earlier row on ties
                        .then(j.cmp(&i))
                }),
        };
        let Some(p) = pick else {
            if T::MODE == Mode::Approximate {
                for i in r..rows {
                    a[(i, c)] = T::zero();
                }
            }
            continue;
        };
        a.swap_rows(r, p);
        comb.swap_rows(r, p);
        let inv = T::one() / a[(r, c)].clone();
        scale_row(&mut a, r, &inv);
        scale_row(&mut comb, r, &inv);
        a[(r, c)] = T::one();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[(i, c)].clone();
            if f.is_zero() {
                continue;
            }
            axpy_row(&mut a, i, r, &f);
            axpy_row(&mut comb, i, r, &f);
            a[(i, c)] = T::zero();
        }
        pivots.push(c);
        r += 1;
    }
    let rank = pivots.len();
    let basis = a.select_rows(&(0..rank).collect::<Vec<_>>());
    let combination = comb.select_rows(&(0..rank).collect::<Vec<_>>());
    let null_combinations = comb.select_rows(&(rank..rows).collect::<Vec<_>>());
    Echelon {
        basis,
        pivots,
        combination,
        null_combinations,
    }
}

fn scale_row<T: Scalar>(m: &mut Matrix<T>, r: usize, f: &T) {
    for v in m.row_mut(r) {
        *v = v.clone() * f.clone();
    }
}

/// row[i] -= f * row[src]
fn axpy_row<T: Scalar>(m: &mut Matrix<T>, i: usize, src: usize, f: &T) {
    let src_row = m.row(src).to_vec();
    for (v, s) in m.row_mut(i).iter_mut().zip(src_row) {
        *v = v.clone() - f.clone() * s;
    }
}

pub fn rank<T: Scalar>(m: &Matrix<T>, tol: Tolerance) -> usize {
    echelon(m, tol).rank()
}

/// A full-row-rank matrix with the same row space as `v` (its reduced echelon rows).
pub fn row_space_basis<T: Scalar>(v: &Matrix<T>, tol: Tolerance) -> Matrix<T> {
    echelon(v, tol).basis
}

/// Splitting of the idempotent onto the row space of `v`.
///
/// With `R` the echelon basis (k×D), the inclusion is `Rᵀ` (D×k) and the
/// projection reads off the pivot coordinates (k×D), so `P·I = id(k)` exactly
/// and `I·P` fixes every vector of the span.
#[derive(Clone, Debug)]
pub struct Splitting<T> {
    pub inclusion: Matrix<T>,
    pub projection: Matrix<T>,
    pub pivots: Vec<usize>,
}

pub fn split_idempotent<T: Scalar>(
    v: &Matrix<T>,
    ambient_dim: usize,
    tol: Tolerance,
) -> Result<Splitting<T>> {
    if v.ncols() != ambient_dim {
        return Err(Error::Dimension(format!(
            "vectors have length {}, ambient dimension is {ambient_dim}",
            v.ncols()
        )));
    }
    let ech = echelon(v, tol);
    let k = ech.rank();
    let mut projection = Matrix::zeros(k, ambient_dim);
    for (i, &p) in ech.pivots.iter().enumerate() {
        projection[(i, p)] = T::one();
    }
    Ok(Splitting {
        inclusion: ech.basis.transpose(),
        projection,
        pivots: ech.pivots,
    })
}

/// Solves `a · x = b`; returns one solution (free variables zero) or `None` if inconsistent.
pub fn solve<T: Scalar>(a: &Matrix<T>, b: &[T], tol: Tolerance) -> Result<Option<Vec<T>>> {
    if a.nrows() != b.len() {
        return Err(Error::Dimension(format!(
            "system has {} rows but right-hand side has length {}",
            a.nrows(),
            b.len()
        )));
    }
    let n = a.ncols();
    let mut aug = Matrix::zeros(a.nrows(), n + 1);
    for i in 0..a.nrows() {
        for j in 0..n {
            aug[(i, j)] = a[(i, j)].clone();
        }
        aug[(i, n)] = b[i].clone();
    }
    let ech = echelon(&aug, tol);
    if ech.pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![T::zero(); n];
    for (i, &p) in ech.pivots.iter().enumerate() {
        x[p] = ech.basis[(i, n)].clone();
    }
    Ok(Some(x))
}

pub fn inverse<T: Scalar>(m: &Matrix<T>, tol: Tolerance) -> Option<Matrix<T>> {
    if m.nrows() != m.ncols() {
        return None;
    }
    let ech = echelon(m, tol);
    (ech.rank() == m.nrows()).then_some(ech.combination)
}

/// Whether `v` lies in the row space of `basis` (a full-row-rank echelon basis).
pub fn in_row_space<T: Scalar>(basis: &Matrix<T>, v: &[T], tol: Tolerance) -> Result<bool> {
    Ok(solve(&basis.transpose(), v, tol)?.is_some_and(|c| {
        let back = super::matrix::vec_mul(&c, basis).expect("shape checked by solve");
        back.iter()
            .zip(v)
            .all(|(a, b)| (a.clone() - b.clone()).is_zero_tol(tol))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn identity_is_its_own_basis() {
        let id = Matrix::<Rational>::identity(3);
        assert_eq!(row_space_basis(&id, Tolerance::default()), id);
    }

    #[test]
    fn zero_matrix_has_empty_basis() {
        let z = Matrix::<Rational>::zeros(3, 4);
        let b = row_space_basis(&z, Tolerance::default());
        assert_eq!(b.shape(), (0, 4));
        let s = split_idempotent(&z, 4, Tolerance::default()).unwrap();
        assert_eq!(s.inclusion.shape(), (4, 0));
        assert_eq!(s.projection.shape(), (0, 4));
    }

    #[test]
    fn example_two_effects_span_three_dimensions() {
        // The six diagonal effects, written in the computational diagonal basis.
        let e = Matrix::<Rational>::from_i64_rows(&[
            &[1, 1, 0, 0],
            &[0, 1, 1, 0],
            &[0, 0, 1, 1],
            &[1, 0, 0, 1],
            &[1, 1, 1, 1],
            &[0, 0, 0, 0],
        ]);
        let tol = Tolerance::default();
        let b = row_space_basis(&e, tol);
        assert_eq!(b.nrows(), 3);
        for r in e.rows_iter() {
            assert!(in_row_space(&b, r, tol).unwrap());
        }
    }

    #[test]
    fn splitting_identities_hold_exactly() {
        let v = Matrix::<Rational>::from_i64_rows(&[&[1, 2, 0, 1], &[2, 4, 1, 1], &[3, 6, 1, 2]]);
        let s = split_idempotent(&v, 4, Tolerance::default()).unwrap();
        let pi = s.projection.matmul(&s.inclusion).unwrap();
        assert_eq!(pi, Matrix::identity(2));
        let ip = s.inclusion.matmul(&s.projection).unwrap();
        assert_eq!(ip.matmul(&ip).unwrap(), ip);
        for r in v.rows_iter() {
            assert_eq!(ip.mul_vec(r).unwrap(), r.to_vec());
        }
    }

    #[test]
    fn solve_and_inverse() {
        let a = Matrix::<Rational>::from_i64_rows(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[q(3, 1), q(5, 1)], Tolerance::default())
            .unwrap()
            .unwrap();
        assert_eq!(x, vec![q(4, 5), q(7, 5)]);
        let inv = inverse(&a, Tolerance::default()).unwrap();
        assert_eq!(a.matmul(&inv).unwrap(), Matrix::identity(2));
        let sing = Matrix::<Rational>::from_i64_rows(&[&[1, 2], &[2, 4]]);
        assert!(inverse(&sing, Tolerance::default()).is_none());
        assert!(solve(&sing, &[q(1, 1), q(1, 1)], Tolerance::default())
            .unwrap()
            .is_none());
    }

    #[test]
    fn boxworld_state_rank() {
        let s = Matrix::<Rational>::from_i64_rows(&[&[1, 1, 0], &[1, 0, 1], &[1, -1, 0], &[1, 0, -1]]);
        assert_eq!(rank(&s, Tolerance::default()), 3);
    }

    #[test]
    fn float_pivoting_thresholds_noise() {
        let v = Matrix::<f64>::from_rows(
            vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0 + 1e-12]],
            3,
        )
        .unwrap();
        assert_eq!(rank(&v, Tolerance::default()), 1);
        assert_eq!(rank(&v, Tolerance { eps: 1e-14 }), 2);
    }
}
