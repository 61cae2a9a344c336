//! The classicality feasibility test and the robustness minimisation, both
//! posed over the entries of a nonnegative matrix `σ` with
//! `H_Eᵀ·σ·H_Ω = target`.

pub mod simplex;

pub use simplex::{solve_lp, LinearProgram, LpOutcome};

use crate::error::{Error, Result};
use crate::fragment::{noisy_rule, AccessibleFragment};
use crate::numerics::{Matrix, Mode, Scalar, Tolerance};

/// A nonnegative `σ` (m × n, effect facets by state facets) reproducing the
/// rule at noise level `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingCertificate<T> {
    pub sigma: Matrix<T>,
    pub r: T,
    /// Max-abs entry of `H_Eᵀ·σ·H_Ω − target`.
    pub residual: T,
    /// Whether `σ` came from a basic (vertex) solution.
    pub basic: bool,
}

impl<T: Scalar> EmbeddingCertificate<T> {
    pub fn nonzero_count(&self, tol: Tolerance) -> usize {
        self.sigma.count_nonzero(tol)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classicality<T> {
    Classical(EmbeddingCertificate<T>),
    /// `witness` (d_E × d_Ω) separates the rule from the classical cone:
    /// `⟨W, B⟩ > 0` while `H_E·W·H_Ωᵀ ≤ 0` entrywise.
    Nonclassical { witness: Matrix<T> },
}

impl<T> Classicality<T> {
    pub fn is_classical(&self) -> bool {
        matches!(self, Classicality::Classical(_))
    }
}

/// `H_Eᵀ·σ·H_Ω`.
pub fn certificate_product<T: Scalar>(
    h_effects: &Matrix<T>,
    sigma: &Matrix<T>,
    h_states: &Matrix<T>,
) -> Result<Matrix<T>> {
    h_effects.transpose().matmul(sigma)?.matmul(h_states)
}

/// Constraint matrix for `H_Eᵀ·σ·H_Ω` with `σ` flattened row-major; one row
/// per entry `(a, b)` of the d_E × d_Ω product.
fn product_constraints<T: Scalar>(h_e: &Matrix<T>, h_s: &Matrix<T>, extra_cols: usize) -> Matrix<T> {
    let (m, de) = h_e.shape();
    let (n, ds) = h_s.shape();
    let mut a = Matrix::zeros(de * ds, m * n + extra_cols);
    for ea in 0..de {
        for sb in 0..ds {
            let row = ea * ds + sb;
            for j in 0..m {
                let he = &h_e[(j, ea)];
                if he.is_zero() {
                    continue;
                }
                for i in 0..n {
                    let hs = &h_s[(i, sb)];
                    if !hs.is_zero() {
                        a[(row, j * n + i)] = he.clone() * hs.clone();
                    }
                }
            }
        }
    }
    a
}

fn flatten<T: Scalar>(m: &Matrix<T>) -> Vec<T> {
    m.as_slice().to_vec()
}

/// Decides whether some `σ ≥ 0` satisfies `H_Eᵀ·σ·H_Ω = B`.
pub fn check_classicality<T: Scalar>(acc: &AccessibleFragment<T>) -> Result<Classicality<T>> {
    match fit(acc, acc.rule(), T::zero())? {
        Ok(cert) => Ok(Classicality::Classical(cert)),
        Err(certificate) => {
            let witness = Matrix::from_vec(acc.effect_dim(), acc.state_dim(), certificate)?;
            Ok(Classicality::Nonclassical { witness })
        }
    }
}

/// Some `σ ≥ 0` with `H_Eᵀ·σ·H_Ω = target`, recorded at noise level `r`;
/// `None` when the target lies outside the classical cone.
pub fn fit_rule<T: Scalar>(
    acc: &AccessibleFragment<T>,
    target: &Matrix<T>,
    r: T,
) -> Result<Option<EmbeddingCertificate<T>>> {
    if target.shape() != acc.rule().shape() {
        return Err(Error::Dimension(format!(
            "target rule is {}x{}, probability rule is {}x{}",
            target.nrows(),
            target.ncols(),
            acc.rule().nrows(),
            acc.rule().ncols()
        )));
    }
    Ok(fit(acc, target, r)?.ok())
}

/// The feasibility LP; the error side carries the Farkas certificate.
fn fit<T: Scalar>(
    acc: &AccessibleFragment<T>,
    target: &Matrix<T>,
    r: T,
) -> Result<std::result::Result<EmbeddingCertificate<T>, Vec<T>>> {
    let h_e = acc.h_effects()?.matrix();
    let h_s = acc.h_states()?.matrix();
    let (m, n) = (h_e.nrows(), h_s.nrows());
    let a = product_constraints(h_e, h_s, 0);
    let lp = LinearProgram::new(vec![T::zero(); m * n], a, flatten(target))?;
    Ok(match solve_lp(&lp, acc.tolerance())? {
        LpOutcome::Optimal { x, .. } => Ok(finish_certificate(acc, h_e, h_s, x, r, target)?),
        LpOutcome::Infeasible { certificate, .. } => Err(certificate),
    })
}

/// Minimal `r ∈ [0, 1]` with `r·B_D + (1−r)·B = H_Eᵀ·σ·H_Ω` for some `σ ≥ 0`.
pub fn robustness<T: Scalar>(
    acc: &AccessibleFragment<T>,
    noise: &Matrix<T>,
) -> Result<EmbeddingCertificate<T>> {
    if noise.shape() != acc.rule().shape() {
        return Err(Error::Dimension(format!(
            "noise rule is {}x{}, probability rule is {}x{}",
            noise.nrows(),
            noise.ncols(),
            acc.rule().nrows(),
            acc.rule().ncols()
        )));
    }
    let h_e = acc.h_effects()?.matrix();
    let h_s = acc.h_states()?.matrix();
    let (m, n) = (h_e.nrows(), h_s.nrows());
    let r_var = m * n;
    // r·(B_D − B) − H_Eᵀ σ H_Ω = −B
    let mut a = product_constraints(h_e, h_s, 1).map(|v| -v.clone());
    let diff = noise.sub(acc.rule())?;
    for (row, d) in diff.as_slice().iter().enumerate() {
        a[(row, r_var)] = d.clone();
    }
    let rhs: Vec<T> = acc.rule().as_slice().iter().map(|v| -v.clone()).collect();
    let mut objective = vec![T::zero(); m * n + 1];
    objective[r_var] = T::one();
    let lp = LinearProgram::new(objective, a, rhs)?.with_upper_bound(r_var, T::one())?;
    match solve_lp(&lp, acc.tolerance())? {
        LpOutcome::Optimal { mut x, .. } => {
            let mut r = x.pop().expect("r variable present");
            if T::MODE == Mode::Approximate && r.is_zero_tol(acc.tolerance()) {
                r = T::zero();
            }
            let target = noisy_rule(acc.rule(), noise, &clamp_unit(r.clone()))?;
            finish_certificate(acc, h_e, h_s, x, r, &target)
        }
        LpOutcome::Infeasible { .. } => Err(Error::InfeasibleAtFullNoise),
    }
}

fn clamp_unit<T: Scalar>(r: T) -> T {
    if r.is_negative() {
        T::zero()
    } else if r > T::one() {
        T::one()
    } else {
        r
    }
}

/// Reshapes the solution, clears float round-off below zero, and verifies
/// the product against `target` by direct multiplication.
fn finish_certificate<T: Scalar>(
    acc: &AccessibleFragment<T>,
    h_e: &Matrix<T>,
    h_s: &Matrix<T>,
    x: Vec<T>,
    r: T,
    target: &Matrix<T>,
) -> Result<EmbeddingCertificate<T>> {
    let tol = acc.tolerance();
    let x = x
        .into_iter()
        .map(|v| if v.is_negative() && v.is_zero_tol(tol) { T::zero() } else { v })
        .collect();
    let sigma = Matrix::from_vec(h_e.nrows(), h_s.nrows(), x)?;
    let cert = EmbeddingCertificate {
        residual: certificate_product(h_e, &sigma, h_s)?.max_abs_diff(target)?,
        sigma,
        r,
        basic: true,
    };
    verify_certificate(&cert, h_e, h_s, target, tol)?;
    Ok(cert)
}

/// Checks `σ ≥ 0` and the product equality, exactly or within `tol`.
pub fn verify_certificate<T: Scalar>(
    cert: &EmbeddingCertificate<T>,
    h_effects: &Matrix<T>,
    h_states: &Matrix<T>,
    target: &Matrix<T>,
    tol: Tolerance,
) -> Result<()> {
    let residual = certificate_product(h_effects, &cert.sigma, h_states)?.max_abs_diff(target)?;
    let ok = residual.is_zero_tol(tol)
        && cert
            .sigma
            .as_slice()
            .iter()
            .all(|v| !v.is_negative_tol(tol));
    if ok {
        Ok(())
    } else {
        Err(Error::UnverifiedCertificate {
            residual: residual.to_f64(),
        })
    }
}
