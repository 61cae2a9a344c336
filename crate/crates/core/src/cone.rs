//! Polyhedral cones from finite generator sets and the extreme rays of their
//! duals, computed by the double description method.
//!
//! For generators `g_1..g_N` spanning `R^k`, the dual cone
//! `{h : h·g_i ≥ 0 for all i}` is pointed, and its extreme rays are exactly the
//! facet normals of the primal cone. Stacked as rows they form the facet
//! matrix `H`, with `H·v ≥ 0` iff `v` is in the primal cone.

use std::cmp::Ordering;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::{dot, echelon, Matrix, Mode, Rational, Scalar, Tolerance};

/// Generators of a cone, each row one generator, within their own span.
#[derive(Clone, Debug)]
pub struct ConeGenerators<T> {
    generators: Matrix<T>,
}

impl<T: Scalar> ConeGenerators<T> {
    /// Normalises each row and drops zero rows and duplicate directions.
    pub fn new(rows: &Matrix<T>, tol: Tolerance) -> Result<Self> {
        let k = rows.ncols();
        let mut kept: Vec<Vec<T>> = Vec::new();
        for r in rows.rows_iter() {
            if let Some(n) = normalize_ray(r, tol) {
                if !kept.iter().any(|g| same_vector(g, &n, tol)) {
                    kept.push(n);
                }
            }
        }
        if kept.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        kept.sort_by(|a, b| lex_cmp(a, b));
        let generators = Matrix::from_rows(kept, k)?;
        let rank = echelon(&generators, tol).rank();
        if rank != k {
            return Err(Error::GeneratorsNotSpanning { rank, dim: k });
        }
        Ok(ConeGenerators { generators })
    }

    pub fn dim(&self) -> usize {
        self.generators.ncols()
    }

    pub fn generators(&self) -> &Matrix<T> {
        &self.generators
    }
}

/// Rows are the extreme rays of a dual cone, one normalised representative each.
#[derive(Clone, Debug, PartialEq)]
pub struct FacetMatrix<T> {
    rows: Matrix<T>,
}

impl<T: Scalar> FacetMatrix<T> {
    pub fn from_matrix(rows: Matrix<T>) -> Self {
        FacetMatrix { rows }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.rows
    }

    pub fn into_matrix(self) -> Matrix<T> {
        self.rows
    }

    pub fn facet_count(&self) -> usize {
        self.rows.nrows()
    }

    pub fn dim(&self) -> usize {
        self.rows.ncols()
    }
}

/// Membership test `H·v ≥ 0` (up to `-ε` in approximate mode).
///
/// A zero-row facet matrix describes the whole space and accepts every vector.
pub fn cone_contains<T: Scalar>(h: &FacetMatrix<T>, v: &[T], tol: Tolerance) -> Result<bool> {
    Ok(h
        .matrix()
        .mul_vec(v)?
        .iter()
        .all(|x| !x.is_negative_tol(tol)))
}

/// Extreme rays of `{h : h·g ≥ 0 for every generator g}`.
pub fn dual_rays<T: Scalar>(gens: &ConeGenerators<T>, tol: Tolerance) -> Result<FacetMatrix<T>> {
    let k = gens.dim();
    let a = gens.generators();
    let total = a.nrows();

    // Initial simplicial cone: the first k independent generators in sorted order.
    let mut basis_rows: Vec<usize> = Vec::with_capacity(k);
    let mut probe = Matrix::zeros(0, k);
    for i in 0..total {
        probe.push_row(a.row(i))?;
        if echelon(&probe, tol).rank() == basis_rows.len() + 1 {
            basis_rows.push(i);
        } else {
            probe = probe.select_rows(&(0..basis_rows.len()).collect::<Vec<_>>());
        }
        if basis_rows.len() == k {
            break;
        }
    }
    if basis_rows.len() != k {
        return Err(Error::GeneratorsNotSpanning {
            rank: basis_rows.len(),
            dim: k,
        });
    }
    let initial = a.select_rows(&basis_rows);
    let inv = crate::numerics::inverse(&initial, tol)
        .ok_or_else(|| Error::Internal("initial generator block is singular".into()))?;

    // Constraint order: the basis block first, then the rest in sorted order.
    let mut order = basis_rows.clone();
    order.extend((0..total).filter(|i| !basis_rows.contains(i)));

    let mut rays: Vec<Ray<T>> = (0..k)
        .map(|j| {
            let mut zero = ZeroSet::new(total);
            for (pos, _) in basis_rows.iter().enumerate().filter(|&(pos, _)| pos != j) {
                zero.insert(pos);
            }
            let v = inv.column(j);
            Ray {
                v: normalize_ray(&v, tol).expect("inverse columns are nonzero"),
                zero,
            }
        })
        .collect();

    for (step, &ci) in order.iter().enumerate().skip(k) {
        let c = a.row(ci);
        let values: Vec<T> = rays.iter().map(|r| dot(c, &r.v)).collect();
        let pos: Vec<usize> = (0..rays.len())
            .filter(|&i| values[i].is_positive_tol(tol))
            .collect();
        let neg: Vec<usize> = (0..rays.len())
            .filter(|&i| values[i].is_negative_tol(tol))
            .collect();

        let mut next: Vec<Ray<T>> = Vec::with_capacity(rays.len());
        for (i, r) in rays.iter().enumerate() {
            if values[i].is_negative_tol(tol) {
                continue;
            }
            let mut r = r.clone();
            if values[i].is_zero_tol(tol) {
                r.zero.insert(step);
            }
            next.push(r);
        }

        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zero.intersection(&rays[n].zero);
                if !adjacent(&rays, p, n, &common, k) {
                    continue;
                }
                if T::MODE == Mode::Exact {
                    debug_assert_eq!(
                        face_rank(a, &order, &common, tol),
                        k - 2,
                        "combinatorial and algebraic adjacency disagree"
                    );
                }
                // vp·n − vn·p vanishes on the new constraint with positive weights
                let vp = values[p].clone();
                let vn = values[n].clone();
                let combined: Vec<T> = rays[n]
                    .v
                    .iter()
                    .zip(&rays[p].v)
                    .map(|(xn, xp)| vp.clone() * xn.clone() - vn.clone() * xp.clone())
                    .collect();
                let Some(v) = normalize_ray(&combined, tol) else {
                    continue;
                };
                let mut zero = common;
                zero.insert(step);
                next.push(Ray { v, zero });
            }
        }
        rays = next;
    }

    let mut out: Vec<Vec<T>> = rays.into_iter().map(|r| r.v).collect();
    out.sort_by(|x, y| lex_cmp(y, x));
    out.dedup_by(|x, y| same_vector(x, y, tol));
    Ok(FacetMatrix {
        rows: Matrix::from_rows(out, k)?,
    })
}

#[derive(Clone, Debug)]
struct Ray<T> {
    v: Vec<T>,
    zero: ZeroSet,
}

/// Combinatorial adjacency: the common zero set is large enough and no third
/// ray is tight on all of it.
fn adjacent<T>(rays: &[Ray<T>], p: usize, n: usize, common: &ZeroSet, k: usize) -> bool {
    if common.len() + 2 < k {
        return false;
    }
    !rays
        .iter()
        .enumerate()
        .any(|(i, r)| i != p && i != n && common.is_subset(&r.zero))
}

fn face_rank<T: Scalar>(a: &Matrix<T>, order: &[usize], zero: &ZeroSet, tol: Tolerance) -> usize {
    let rows: Vec<usize> = zero.iter().map(|step| order[step]).collect();
    echelon(&a.select_rows(&rows), tol).rank()
}

/// Bitset over constraint insertion steps.
#[derive(Clone, Debug, PartialEq, Eq)]
struct ZeroSet {
    words: Vec<u64>,
}

impl ZeroSet {
    fn new(capacity: usize) -> Self {
        ZeroSet {
            words: vec![0; capacity.div_ceil(64).max(1)],
        }
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn intersection(&self, other: &Self) -> Self {
        ZeroSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter(move |b| w >> b & 1 == 1).map(move |b| wi * 64 + b)
        })
    }
}

/// Positive rescaling to a canonical representative; `None` for a zero vector.
///
/// Exact vectors become primitive integer vectors (scaled by the lcm of the
/// denominators and divided by the gcd of the numerators); float vectors get
/// unit Euclidean norm. Direction is never flipped.
pub fn normalize_ray<T: Scalar>(v: &[T], tol: Tolerance) -> Option<Vec<T>> {
    if v.iter().all(|x| x.is_zero_tol(tol)) {
        return None;
    }
    match T::MODE {
        Mode::Exact => {
            let q: Vec<Rational> = v
                .iter()
                .map(|x| x.to_rational().expect("exact scalars carry rationals"))
                .collect();
            Some(primitive_integer_ray(&q).iter().map(T::from_rational).collect())
        }
        Mode::Approximate => {
            let norm = v.iter().map(|x| x.to_f64() * x.to_f64()).sum::<f64>().sqrt();
            let inv = T::from_f64(1.0 / norm).expect("finite norm");
            Some(
                v.iter()
                    .map(|x| {
                        let y = x.clone() * inv.clone();
                        if y.is_zero_tol(tol) {
                            T::zero()
                        } else {
                            y
                        }
                    })
                    .collect(),
            )
        }
    }
}

fn primitive_integer_ray(v: &[Rational]) -> Vec<Rational> {
    let lcm = v
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<num_bigint::BigInt> = v
        .iter()
        .map(|x| (x * Rational::from_integer(lcm.clone())).to_integer())
        .collect();
    let gcd = ints
        .iter()
        .fold(num_bigint::BigInt::zero(), |acc, x| acc.gcd(x))
        .abs();
    ints.into_iter()
        .map(|x| Rational::from_integer(x / gcd.clone()))
        .collect()
}

fn lex_cmp<T: Scalar>(a: &[T], b: &[T]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn same_vector<T: Scalar>(a: &[T], b: &[T], tol: Tolerance) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| (x.clone() - y.clone()).is_zero_tol(tol))
}
