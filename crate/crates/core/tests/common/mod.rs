//! Random scenario generators and independent oracles shared by the
//! integration and acceptance tests.
#![allow(dead_code)]

use nctest_core::fragment::GptFragment;
use nctest_core::lp::simplex::{solve_lp, LinearProgram, LpOutcome};
use nctest_core::numerics::{inverse, rank, Matrix, Rational, Scalar, Tolerance};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

pub fn exact() -> Tolerance {
    Tolerance::default()
}

/// Entries `n/den` with `n` uniform in `lo..=hi`.
pub fn random_matrix(rng: &mut Rng8, rows: usize, cols: usize, lo: i64, hi: i64, den: i64) -> Matrix<Rational> {
    let data = (0..rows * cols).map(|_| q(rng.gen_range(lo..=hi), den)).collect();
    Matrix::from_vec(rows, cols, data).unwrap()
}

pub fn random_invertible(rng: &mut Rng8, d: usize) -> Matrix<Rational> {
    loop {
        let m = random_matrix(rng, d, d, -3, 3, 1);
        if rank(&m, exact()) == d {
            return m;
        }
    }
}

/// A probability vector over `k` outcomes with small denominators, zeros allowed.
fn distribution(rng: &mut Rng8, k: usize) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=4)).collect();
        let total: i64 = w.iter().sum();
        if total > 0 {
            return w.into_iter().map(|x| q(x, total)).collect();
        }
    }
}

/// A classical scenario built from an explicit ontological model over `k`
/// ontic states, then hidden behind a random change of coordinates.
pub fn random_classical(rng: &mut Rng8) -> GptFragment<Rational> {
    let k = rng.gen_range(2..=4);
    let n_states = rng.gen_range(1..=5);
    let n_effects = rng.gen_range(1..=5);
    let states: Vec<Vec<Rational>> = (0..n_states).map(|_| distribution(rng, k)).collect();
    let mut effects: Vec<Vec<Rational>> = (0..n_effects)
        .map(|_| (0..k).map(|_| q(rng.gen_range(0..=4), 4)).collect())
        .collect();
    effects.push(vec![Rational::from_i64(1); k]);
    let frag = GptFragment::new(
        Matrix::from_rows(states, k).unwrap(),
        Matrix::from_rows(effects, k).unwrap(),
        vec![Rational::from_i64(1); k],
        None,
    )
    .unwrap();
    let m = random_invertible(rng, k);
    reparametrize(&frag, &m)
}

/// Points on the unit circle from the rational parametrisation
/// `t ↦ ((1−t²)/(1+t²), 2t/(1+t²))`, in angular order.
fn circle_points(rng: &mut Rng8, n: usize) -> Vec<(Rational, Rational)> {
    let mut ts: Vec<Rational> = Vec::new();
    while ts.len() < n {
        let t = q(rng.gen_range(-12..=12), rng.gen_range(1..=4));
        if !ts.contains(&t) {
            ts.push(t);
        }
    }
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.into_iter()
        .map(|t| {
            let one = Rational::from_i64(1);
            let den = one.clone() + t.clone() * t.clone();
            (
                (one - t.clone() * t.clone()) / den.clone(),
                Rational::from_i64(2) * t / den,
            )
        })
        .collect()
}

/// A polygon theory: states are rational points on the unit circle, effects
/// are (some of) the polygon's facet functionals, their complements and the
/// unit. The polygon always contains the origin, which is the maximally
/// mixed state. Usually nonclassical for four or more vertices.
pub fn random_polygon(rng: &mut Rng8) -> GptFragment<Rational> {
    let n = rng.gen_range(3..=6);
    // The maximally mixed state (the origin) must lie strictly inside.
    let pts = loop {
        let pts = circle_points(rng, n);
        let inside = (0..n).all(|i| {
            let (a, b) = (&pts[i], &pts[(i + 1) % n]);
            // Counter-clockwise order: the origin is left of every edge.
            let cross = (b.0.clone() - a.0.clone()) * (-a.1.clone()) - (b.1.clone() - a.1.clone()) * (-a.0.clone());
            cross.is_positive()
        });
        if inside {
            break pts;
        }
    };
    let one = Rational::from_i64(1);
    let states: Vec<Vec<Rational>> = pts.iter().map(|(x, y)| vec![one.clone(), x.clone(), y.clone()]).collect();
    let mut effects = Vec::new();
    let mut edges: Vec<usize> = (0..n).collect();
    edges.shuffle(rng);
    let keep = rng.gen_range(2..=n);
    for &i in &edges[..keep] {
        let (a, b) = (&pts[i], &pts[(i + 1) % n]);
        // Functional vanishing on the edge a–b, scaled to max 1 on the states.
        let nx = b.1.clone() - a.1.clone();
        let ny = a.0.clone() - b.0.clone();
        let c = nx.clone() * a.0.clone() + ny.clone() * a.1.clone();
        let vals: Vec<Rational> = pts
            .iter()
            .map(|(x, y)| c.clone() - nx.clone() * x.clone() - ny.clone() * y.clone())
            .collect();
        let sign = if vals.iter().any(|v| v.is_negative()) { -one.clone() } else { one.clone() };
        let scale = vals.iter().map(|v| v.clone() * sign.clone()).fold(Rational::from_i64(0), |m, v| if v > m { v } else { m });
        let e = vec![c * sign.clone() / scale.clone(), -nx * sign.clone() / scale.clone(), -ny * sign / scale];
        let comp: Vec<Rational> = vec![one.clone() - e[0].clone(), -e[1].clone(), -e[2].clone()];
        effects.push(e);
        effects.push(comp);
    }
    effects.push(vec![one.clone(), Rational::from_i64(0), Rational::from_i64(0)]);
    GptFragment::new(
        Matrix::from_rows(states, 3).unwrap(),
        Matrix::from_rows(effects, 3).unwrap(),
        vec![one.clone(), Rational::from_i64(0), Rational::from_i64(0)],
        Some(vec![one, Rational::from_i64(0), Rational::from_i64(0)]),
    )
    .unwrap()
}

/// States (and the maximally mixed state) map by `M`; effects and the unit
/// by `M⁻ᵀ`, so every pairing is unchanged.
pub fn reparametrize<T: Scalar>(frag: &GptFragment<T>, m: &Matrix<T>) -> GptFragment<T> {
    let inv = inverse(m, Tolerance::default()).expect("invertible");
    let mt = m.transpose();
    let unit = nctest_core::numerics::vec_mul(frag.unit(), &inv).unwrap();
    let mixed = frag.max_mixed().map(|v| m.mul_vec(v).unwrap());
    GptFragment::new(
        frag.states().matmul(&mt).unwrap(),
        frag.effects().matmul(&inv).unwrap(),
        unit,
        mixed,
    )
    .unwrap()
}

fn mixtures(rng: &mut Rng8, rows: &Matrix<Rational>, count: usize) -> Vec<Vec<Rational>> {
    (0..count)
        .map(|_| {
            let w = distribution(rng, rows.nrows());
            let mut v = vec![Rational::from_i64(0); rows.ncols()];
            for (wi, r) in w.iter().zip(rows.rows_iter()) {
                for (acc, x) in v.iter_mut().zip(r) {
                    *acc = acc.clone() + wi.clone() * x.clone();
                }
            }
            v
        })
        .collect()
}

/// Appends random convex mixtures of existing states and of existing effects.
pub fn append_convex(rng: &mut Rng8, frag: &GptFragment<Rational>) -> GptFragment<Rational> {
    let mut states = frag.states().to_rows();
    let mut effects = frag.effects().to_rows();
    let (ns, ne) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
    states.extend(mixtures(rng, frag.states(), ns));
    effects.extend(mixtures(rng, frag.effects(), ne));
    let d = frag.ambient_dim();
    GptFragment::new(
        Matrix::from_rows(states, d).unwrap(),
        Matrix::from_rows(effects, d).unwrap(),
        frag.unit().to_vec(),
        frag.max_mixed().map(<[Rational]>::to_vec),
    )
    .unwrap()
}

/// Cone membership by LP feasibility: `Gᵀλ = v, λ ≥ 0`.
pub fn lp_membership<T: Scalar>(gens: &Matrix<T>, v: &[T], tol: Tolerance) -> bool {
    let lp = LinearProgram::new(vec![T::zero(); gens.nrows()], gens.transpose(), v.to_vec()).unwrap();
    matches!(solve_lp(&lp, tol).unwrap(), LpOutcome::Optimal { .. })
}

/// A random spanning rational cone of dimension `d ≤ 4` with at most 8 generators.
pub fn random_cone(rng: &mut Rng8) -> (usize, Matrix<Rational>) {
    loop {
        let d = rng.gen_range(1..=4);
        let k = rng.gen_range(d..=8);
        let den = rng.gen_range(1..=3);
        let g = random_matrix(rng, k, d, -4, 4, den);
        if rank(&g, exact()) == d {
            return (d, g);
        }
    }
}

/// Nonnegative combinations of generators (some coefficients zero, so
/// boundary points are exercised) and unconstrained random vectors.
pub fn test_vectors(rng: &mut Rng8, g: &Matrix<Rational>, count: usize) -> Vec<Vec<Rational>> {
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                let mut v = vec![Rational::from_i64(0); g.ncols()];
                for r in g.rows_iter() {
                    let c = q(rng.gen_range(0..=3).max(0) * i64::from(rng.gen_bool(0.6)), rng.gen_range(1..=3));
                    for (a, x) in v.iter_mut().zip(r) {
                        *a = a.clone() + c.clone() * x.clone();
                    }
                }
                v
            } else {
                (0..g.ncols()).map(|_| q(rng.gen_range(-6..=6), rng.gen_range(1..=3))).collect()
            }
        })
        .collect()
}

/// Determinant by cofactor expansion; for the small oracles only.
pub fn det(m: &[Vec<Rational>]) -> Rational {
    match m.len() {
        0 => Rational::from_i64(1),
        1 => m[0][0].clone(),
        n => (0..n)
            .map(|j| {
                let minor: Vec<Vec<Rational>> = m[1..]
                    .iter()
                    .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = m[0][j].clone() * det(&minor);
                if j % 2 == 0 {
                    term
                } else {
                    -term
                }
            })
            .fold(Rational::zero(), |a, b| a + b),
    }
}

/// All `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}
