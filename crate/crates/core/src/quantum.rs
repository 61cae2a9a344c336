//! Quantum front end: Hermitian operators, an orthonormal Hermitian operator
//! basis, Born-rule evaluation, and conversion of density matrices and POVM
//! elements into real GPT vectors.
//!
//! The basis is the generalized Gell-Mann family normalised to unit
//! Hilbert-Schmidt norm, so the trace inner product becomes the dot product.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fragment::GptFragment;
use crate::numerics::{Matrix, Tolerance};

/// Eigenvalue iterations stop once off-diagonal mass drops below this.
const EIGEN_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    /// Builds an operator from row-major entries, checking hermiticity within `tol`.
    pub fn new(dim: usize, entries: Vec<Complex64>, tol: Tolerance) -> Result<Self> {
        let op = Self::unchecked(dim, entries)?;
        let dev = op.hermiticity_deviation();
        if dev > tol.eps {
            return Err(Error::NotHermitian {
                what: format!("{dim}x{dim} operator"),
                deviation: dev,
            });
        }
        Ok(op)
    }

    fn unchecked(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "{} entries for a {dim}x{dim} operator",
                entries.len()
            )));
        }
        Ok(HermitianOperator { dim, entries })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut entries = vec![Complex64::new(0.0, 0.0); d * d];
        for (i, &v) in diag.iter().enumerate() {
            entries[i * d + i] = Complex64::new(v, 0.0);
        }
        HermitianOperator { dim: d, entries }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_real_diagonal(&vec![1.0; dim])
    }

    /// The projector |ψ⟩⟨ψ| for an (unnormalised) vector ψ.
    pub fn projector(psi: &[Complex64]) -> Self {
        let d = psi.len();
        let mut entries = Vec::with_capacity(d * d);
        for a in psi {
            for b in psi {
                entries.push(a * b.conj());
            }
        }
        HermitianOperator { dim: d, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn scale(&self, c: f64) -> Self {
        HermitianOperator {
            dim: self.dim,
            entries: self.entries.iter().map(|v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(HermitianOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "operators of dimension {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                dev = dev.max((self.entry(i, j) - self.entry(j, i).conj()).norm());
            }
        }
        dev
    }

    /// tr(self · other)
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for k in 0..d {
                acc += self.entry(i, k) * other.entry(k, i);
            }
        }
        Ok(acc)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.entry(i, i).re).sum()
    }

    /// Eigenvalues in ascending order, via Jacobi rotations on the real
    /// symmetric embedding `[[Re, -Im], [Im, Re]]` (each eigenvalue appears twice there).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dim;
        let n = 2 * d;
        let mut a = vec![0.0; n * n];
        for i in 0..d {
            for j in 0..d {
                let z = self.entry(i, j);
                a[i * n + j] = z.re;
                a[(i + d) * n + (j + d)] = z.re;
                a[i * n + (j + d)] = -z.im;
                a[(i + d) * n + j] = z.im;
            }
        }
        // symmetrise away rounding from a merely-approximately Hermitian input
        for i in 0..n {
            for j in (i + 1)..n {
                let m = 0.5 * (a[i * n + j] + a[j * n + i]);
                a[i * n + j] = m;
                a[j * n + i] = m;
            }
        }
        jacobi_eigenvalues(&mut a, n);
        let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
        ev.sort_by(|x, y| x.total_cmp(y));
        ev.into_iter().step_by(2).collect()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }
}

fn jacobi_eigenvalues(a: &mut [f64], n: usize) {
    let scale: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= EIGEN_TOLERANCE * scale {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

/// An orthonormal basis of the real space of d×d Hermitian operators.
#[derive(Clone, Debug)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<HermitianOperator>,
}

impl HermitianBasis {
    /// Wraps arbitrary elements after checking the Gram matrix is the identity within `tol`.
    pub fn from_elements(elements: Vec<HermitianOperator>, tol: Tolerance) -> Result<Self> {
        let dim = elements.first().map_or(0, HermitianOperator::dim);
        if dim == 0 || elements.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "a Hermitian basis for dimension {dim} needs {} elements, got {}",
                dim * dim,
                elements.len()
            )));
        }
        let basis = HermitianBasis { dim, elements };
        let gram = basis.gram();
        let dev = gram.max_abs_diff(&Matrix::identity(dim * dim))?;
        if dev > tol.eps {
            return Err(Error::InvalidInput(format!(
                "basis is not orthonormal (Gram deviation {dev:e})"
            )));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }

    pub fn gram(&self) -> Matrix<f64> {
        let n = self.elements.len();
        let mut g = Matrix::zeros(n, n);
        for (i, a) in self.elements.iter().enumerate() {
            for (j, b) in self.elements.iter().enumerate() {
                g[(i, j)] = a.trace_product(b).expect("uniform dimension").re;
            }
        }
        g
    }

    pub fn to_vector(&self, op: &HermitianOperator, tol: Tolerance) -> Result<Vec<f64>> {
        if op.dim() != self.dim {
            return Err(Error::Dimension(format!(
                "operator of dimension {} against a basis of dimension {}",
                op.dim(),
                self.dim
            )));
        }
        let dev = op.hermiticity_deviation();
        if dev > tol.eps {
            return Err(Error::NotHermitian {
                what: "operator".into(),
                deviation: dev,
            });
        }
        self.elements
            .iter()
            .map(|b| {
                let z = b.trace_product(op)?;
                if z.im.abs() > tol.eps {
                    return Err(Error::NotHermitian {
                        what: "operator coordinate".into(),
                        deviation: z.im.abs(),
                    });
                }
                Ok(z.re)
            })
            .collect()
    }

    pub fn from_vector(&self, coords: &[f64]) -> Result<HermitianOperator> {
        if coords.len() != self.elements.len() {
            return Err(Error::Dimension(format!(
                "{} coordinates for a basis of {} elements",
                coords.len(),
                self.elements.len()
            )));
        }
        let d = self.dim;
        let mut acc = HermitianOperator::unchecked(d, vec![Complex64::new(0.0, 0.0); d * d])?;
        for (c, b) in coords.iter().zip(&self.elements) {
            acc = acc.add(&b.scale(*c))?;
        }
        Ok(acc)
    }
}

/// The normalised generalized Gell-Mann basis.
///
/// Ordering: identity first, then the symmetric off-diagonal elements, then the
/// antisymmetric ones (both over pairs j < k in lexicographic order), then the
/// diagonal elements. For d = 2 this is {I, X, Y, Z}/√2.
pub fn hermitian_basis(d: usize) -> Result<HermitianBasis> {
    if d == 0 {
        return Err(Error::InvalidInput("Hilbert-space dimension must be at least 1".into()));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut elements = vec![HermitianOperator::identity(d).scale(1.0 / (d as f64).sqrt())];
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| ((j + 1)..d).map(move |k| (j, k)))
        .collect();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for &(j, k) in &pairs {
        let mut e = vec![zero; d * d];
        e[j * d + k] = Complex64::new(r, 0.0);
        e[k * d + j] = Complex64::new(r, 0.0);
        elements.push(HermitianOperator { dim: d, entries: e });
    }
    for &(j, k) in &pairs {
        let mut e = vec![zero; d * d];
        e[j * d + k] = Complex64::new(0.0, -r);
        e[k * d + j] = Complex64::new(0.0, r);
        elements.push(HermitianOperator { dim: d, entries: e });
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = vec![0.0; d];
        for v in diag.iter_mut().take(l) {
            *v = norm;
        }
        diag[l] = -(l as f64) * norm;
        elements.push(HermitianOperator::from_real_diagonal(&diag));
    }
    Ok(HermitianBasis { dim: d, elements })
}

/// Born-rule probability tr(ρ E).
pub fn born(state: &HermitianOperator, effect: &HermitianOperator) -> Result<f64> {
    Ok(state.trace_product(effect)?.re)
}

/// Converts a quantum prepare-measure fragment into GPT vectors.
///
/// The unit effect is the image of the identity and the maximally mixed state
/// the image of 1/d. With `validate`, states must be positive with trace ≤ 1
/// and effects must satisfy 0 ≤ E ≤ 1, all within `tol`.
pub fn quantum_to_gpt(
    states: &[HermitianOperator],
    effects: &[HermitianOperator],
    basis: &HermitianBasis,
    tol: Tolerance,
    validate: bool,
) -> Result<GptFragment<f64>> {
    let d = basis.dim();
    for op in states.iter().chain(effects) {
        if op.dim() != d {
            return Err(Error::Dimension(format!(
                "operator of dimension {} in a fragment of dimension {d}",
                op.dim()
            )));
        }
    }
    if validate {
        for (index, s) in states.iter().enumerate() {
            let min = s.min_eigenvalue();
            if min < -tol.eps {
                return Err(Error::NotPositive {
                    kind: "state",
                    index,
                    eigenvalue: min,
                });
            }
            let tr = s.trace();
            if tr <= 0.0 || tr > 1.0 + tol.eps {
                return Err(Error::StateNormalization { index, value: tr });
            }
        }
        let id = HermitianOperator::identity(d);
        for (index, e) in effects.iter().enumerate() {
            let min = e.min_eigenvalue();
            if min < -tol.eps {
                return Err(Error::NotPositive {
                    kind: "effect",
                    index,
                    eigenvalue: min,
                });
            }
            let complement = id.add(&e.scale(-1.0))?;
            let cmin = complement.min_eigenvalue();
            if cmin < -tol.eps {
                return Err(Error::EffectExceedsUnit {
                    index,
                    eigenvalue: cmin,
                });
            }
        }
    }
    let to_rows = |ops: &[HermitianOperator]| -> Result<Matrix<f64>> {
        let rows = ops
            .iter()
            .map(|op| basis.to_vector(op, tol))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(rows, d * d)
    };
    let unit = basis.to_vector(&HermitianOperator::identity(d), tol)?;
    let mixed = basis.to_vector(&HermitianOperator::identity(d).scale(1.0 / d as f64), tol)?;
    GptFragment::new(to_rows(states)?, to_rows(effects)?, unit, Some(mixed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ket0() -> HermitianOperator {
        HermitianOperator::projector(&[c(1.0), c(0.0)])
    }

    fn ket_plus() -> HermitianOperator {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        HermitianOperator::projector(&[c(r), c(r)])
    }

    #[test]
    fn dimension_zero_rejected() {
        assert!(hermitian_basis(0).is_err());
    }

    #[test]
    fn trivial_dimension_one() {
        let b = hermitian_basis(1).unwrap();
        assert_eq!(b.elements().len(), 1);
        assert_eq!(b.elements()[0].entry(0, 0), c(1.0));
    }

    #[test]
    fn gram_matrices_are_identity() {
        for d in 1..=4 {
            let b = hermitian_basis(d).unwrap();
            let g = b.gram();
            assert!(g.max_abs_diff(&Matrix::identity(d * d)).unwrap() < 1e-12, "d={d}");
        }
    }

    #[test]
    fn qubit_basis_is_scaled_paulis() {
        let b = hermitian_basis(2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let e = b.elements();
        assert_eq!(e[1].entry(0, 1), c(r));
        assert_eq!(e[2].entry(0, 1), Complex64::new(0.0, -r));
        assert_eq!(e[2].entry(1, 0), Complex64::new(0.0, r));
        assert!((e[3].entry(0, 0).re - r).abs() < 1e-15);
        assert!((e[3].entry(1, 1).re + r).abs() < 1e-15);
    }

    #[test]
    fn ket_zero_coordinates() {
        let b = hermitian_basis(2).unwrap();
        let v = b.to_vector(&ket0(), Tolerance::default()).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let expected = [r, 0.0, 0.0, r];
        for (a, e) in v.iter().zip(expected) {
            assert!((a - e).abs() < 1e-12);
        }
        let zero = HermitianOperator::from_real_diagonal(&[0.0, 0.0]);
        assert!(b
            .to_vector(&zero, Tolerance::default())
            .unwrap()
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn non_hermitian_rejected() {
        let b = hermitian_basis(2).unwrap();
        let bad = HermitianOperator::unchecked(2, vec![c(1.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        assert!(matches!(
            b.to_vector(&bad, Tolerance::default()),
            Err(Error::NotHermitian { .. })
        ));
        assert!(HermitianOperator::new(2, bad.entries().to_vec(), Tolerance::default()).is_err());
    }

    #[test]
    fn born_values() {
        assert!((born(&ket0(), &ket0()).unwrap() - 1.0).abs() < 1e-12);
        assert!((born(&ket0(), &ket_plus()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_projector_and_complex_operator() {
        let ev = ket_plus().eigenvalues();
        assert!((ev[0]).abs() < 1e-10 && (ev[1] - 1.0).abs() < 1e-10);
        // Y has eigenvalues ±1
        let y = HermitianOperator::unchecked(
            2,
            vec![c(0.0), Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), c(0.0)],
        )
        .unwrap();
        let ev = y.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-10 && (ev[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn validation_reports_offending_eigenvalue() {
        let b = hermitian_basis(2).unwrap();
        let bad = HermitianOperator::from_real_diagonal(&[1.2, -0.2]);
        let err = quantum_to_gpt(&[bad], &[ket0()], &b, Tolerance::default(), true).unwrap_err();
        match err {
            Error::NotPositive { index, eigenvalue, .. } => {
                assert_eq!(index, 0);
                assert!((eigenvalue + 0.2).abs() < 1e-9);
            }
            other => panic!("unexpected {other:?}"),
        }
        let big = HermitianOperator::from_real_diagonal(&[1.5, 0.0]);
        assert!(matches!(
            quantum_to_gpt(&[ket0()], std::slice::from_ref(&big), &b, Tolerance::default(), true),
            Err(Error::EffectExceedsUnit { .. })
        ));
        assert!(quantum_to_gpt(&[ket0()], &[big], &b, Tolerance::default(), false).is_ok());
    }

    #[test]
    fn maximally_mixed_with_unit_effect() {
        let b = hermitian_basis(3).unwrap();
        let mixed = HermitianOperator::identity(3).scale(1.0 / 3.0);
        let frag = quantum_to_gpt(
            &[mixed],
            &[HermitianOperator::identity(3)],
            &b,
            Tolerance::default(),
            true,
        )
        .unwrap();
        let p = crate::numerics::dot(frag.states().row(0), frag.effects().row(0));
        assert!((p - 1.0).abs() < 1e-12);
    }
}
