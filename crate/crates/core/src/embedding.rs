//! From a certificate `σ` to simplicial-cone and simplex embeddings, and from
//! those to an explicit ontological model `(μ, ξ)`.

use crate::error::{Error, Result};
use crate::fragment::{AccessibleFragment, GptFragment};
use crate::lp::EmbeddingCertificate;
use crate::numerics::{dot, Matrix, Scalar, Tolerance};

/// Linear maps sending accessible states and effects to nonnegative vectors
/// over `Λ'` ontic states, with `τ_Eᵀ·τ_Ω` equal to the target rule.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialConeEmbedding<T> {
    pub tau_states: Matrix<T>,
    pub tau_effects: Matrix<T>,
}

impl<T: Scalar> SimplicialConeEmbedding<T> {
    pub fn ontic_count(&self) -> usize {
        self.tau_states.nrows()
    }

    /// `τ_Eᵀ·τ_Ω`.
    pub fn product(&self) -> Matrix<T> {
        self.tau_effects
            .transpose()
            .matmul(&self.tau_states)
            .expect("embedding maps share the ontic dimension")
    }
}

/// A simplicial-cone embedding whose effect map sends the unit to all-ones.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexEmbedding<T> {
    pub tau_states: Matrix<T>,
    pub tau_effects: Matrix<T>,
}

impl<T: Scalar> SimplexEmbedding<T> {
    pub fn ontic_count(&self) -> usize {
        self.tau_states.nrows()
    }

    pub fn product(&self) -> Matrix<T> {
        self.tau_effects
            .transpose()
            .matmul(&self.tau_states)
            .expect("embedding maps share the ontic dimension")
    }
}

/// `τ_Ω = H_Ω`, `τ_E = σᵀ·H_E`, one ontic state per state-cone facet.
pub fn embedding_from_certificate<T: Scalar>(
    acc: &AccessibleFragment<T>,
    cert: &EmbeddingCertificate<T>,
    target: &Matrix<T>,
) -> Result<SimplicialConeEmbedding<T>> {
    let h_s = acc.h_states()?.matrix();
    let h_e = acc.h_effects()?.matrix();
    if cert.sigma.shape() != (h_e.nrows(), h_s.nrows()) {
        return Err(Error::Dimension(format!(
            "certificate is {}x{}, expected {}x{}",
            cert.sigma.nrows(),
            cert.sigma.ncols(),
            h_e.nrows(),
            h_s.nrows()
        )));
    }
    let sce = SimplicialConeEmbedding {
        tau_states: h_s.clone(),
        tau_effects: cert.sigma.transpose().matmul(h_e)?,
    };
    let residual = sce.product().max_abs_diff(target)?;
    if !residual.is_zero_tol(acc.tolerance()) {
        return Err(Error::UnverifiedCertificate {
            residual: residual.to_f64(),
        });
    }
    Ok(sce)
}

/// Drops ontic states that the unit effect never reaches and rescales the
/// rest so that `τ_E·u_A` is all-ones.
///
/// The product `τ_Eᵀ·τ_Ω` is rechecked after truncation: when the fragment
/// lacks effect complements, a dropped row can still carry weight, and the
/// conversion is refused rather than silently changing the rule.
pub fn to_simplex<T: Scalar>(
    sce: &SimplicialConeEmbedding<T>,
    unit: &[T],
    tol: Tolerance,
) -> Result<SimplexEmbedding<T>> {
    let weights = sce.tau_effects.mul_vec(unit)?;
    if let Some((index, w)) = weights.iter().enumerate().find(|(_, w)| w.is_negative_tol(tol)) {
        return Err(Error::UnitOutsideEffectCone {
            index,
            value: w.to_f64(),
        });
    }
    let support: Vec<usize> = (0..weights.len())
        .filter(|&i| weights[i].is_positive_tol(tol))
        .collect();
    let product = sce.product();
    if support.is_empty() && !product.max_abs().is_zero_tol(tol) {
        return Err(Error::SimplexNormalization(
            "the unit effect vanishes on every ontic state".into(),
        ));
    }
    let mut tau_states = sce.tau_states.select_rows(&support);
    let mut tau_effects = sce.tau_effects.select_rows(&support);
    for (row, &lambda) in support.iter().enumerate() {
        let w = &weights[lambda];
        for v in tau_effects.row_mut(row) {
            *v = v.clone() / w.clone();
        }
        for v in tau_states.row_mut(row) {
            *v = v.clone() * w.clone();
        }
    }
    let se = SimplexEmbedding {
        tau_states,
        tau_effects,
    };
    let drift = se.product().max_abs_diff(&product)?;
    if !drift.is_zero_tol(tol) {
        return Err(Error::SimplexNormalization(format!(
            "dropping unit-null ontic states changes the rule by {:e}",
            drift.to_f64()
        )));
    }
    Ok(se)
}

/// Epistemic states `μ` (one row per state) and response functions `ξ` (one
/// row per effect) over a common ontic set, valid at noise level `r`.
#[derive(Clone, Debug, PartialEq)]
pub struct OntologicalModel<T> {
    pub epistemic: Matrix<T>,
    pub response: Matrix<T>,
    pub r: T,
}

impl<T: Scalar> OntologicalModel<T> {
    pub fn ontic_count(&self) -> usize {
        self.epistemic.ncols()
    }

    /// Ontic states on which some response function is nonzero.
    pub fn response_support(&self, tol: Tolerance) -> usize {
        (0..self.response.ncols())
            .filter(|&l| {
                (0..self.response.nrows()).any(|j| !self.response[(j, l)].is_zero_tol(tol))
            })
            .count()
    }

    /// `ξ_j·μ_i` for every pair, effects as rows.
    pub fn predictions(&self) -> Matrix<T> {
        self.response
            .matmul(&self.epistemic.transpose())
            .expect("model factors share the ontic dimension")
    }
}

/// `μ_i = τ_Ω·s_i`, `ξ_j = τ_E·e_j` on the accessible rows.
///
/// Positivity and the pairing against `target` are checked here; failure is
/// an internal error since it can only stem from a solver or geometry bug.
pub fn ontological_model<T: Scalar>(
    se: &SimplexEmbedding<T>,
    acc: &AccessibleFragment<T>,
    target: &Matrix<T>,
    r: T,
) -> Result<OntologicalModel<T>> {
    let tol = acc.tolerance();
    let model = OntologicalModel {
        epistemic: acc.states().matmul(&se.tau_states.transpose())?,
        response: acc.effects().matmul(&se.tau_effects.transpose())?,
        r,
    };
    let negative = model
        .epistemic
        .as_slice()
        .iter()
        .chain(model.response.as_slice())
        .any(|v| v.is_negative_tol(tol));
    if negative {
        return Err(Error::Internal(
            "embedding produced a negative probability".into(),
        ));
    }
    let residual = model.predictions().max_abs_diff(&acc.pairings(target)?)?;
    if !residual.is_zero_tol(tol) {
        return Err(Error::Internal(format!(
            "model misses the target statistics by {:e}",
            residual.to_f64()
        )));
    }
    Ok(model)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NegativeEpistemic { state: usize, ontic: usize, value: f64 },
    NegativeResponse { effect: usize, ontic: usize, value: f64 },
    ResponseAboveOne { effect: usize, ontic: usize, value: f64 },
    UnitResponse { effect: usize },
    Normalization { state: usize, sum: f64 },
    Pairing { effect: usize, state: usize, residual: f64 },
}

impl Violation {
    /// Response values above one can arise legitimately in fragments that
    /// lack effect complements; every other violation invalidates the model.
    pub fn is_soft(&self) -> bool {
        matches!(self, Violation::ResponseAboveOne { .. })
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::NegativeEpistemic { state, ontic, value } => {
                write!(f, "mu[{state}][{ontic}] = {value:e} is negative")
            }
            Violation::NegativeResponse { effect, ontic, value } => {
                write!(f, "xi[{effect}][{ontic}] = {value:e} is negative")
            }
            Violation::ResponseAboveOne { effect, ontic, value } => {
                write!(f, "xi[{effect}][{ontic}] = {value} exceeds 1")
            }
            Violation::UnitResponse { effect } => {
                write!(f, "unit effect {effect} does not respond with all ones")
            }
            Violation::Normalization { state, sum } => {
                write!(f, "normalised state {state} has epistemic weight {sum}")
            }
            Violation::Pairing { effect, state, residual } => {
                write!(f, "pair (effect {effect}, state {state}) off by {residual:e}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelCheck<T> {
    pub max_residual: T,
    pub violations: Vec<Violation>,
}

impl<T> ModelCheck<T> {
    pub fn is_valid(&self) -> bool {
        self.violations.iter().all(Violation::is_soft)
    }
}

/// Checks a model against the fragment's own statistics, or against
/// `targets` (effects × states) when noise has been mixed in.
pub fn verify_model<T: Scalar>(
    model: &OntologicalModel<T>,
    frag: &GptFragment<T>,
    targets: Option<&Matrix<T>>,
    tol: Tolerance,
) -> Result<ModelCheck<T>> {
    let n_states = frag.states().nrows();
    let n_effects = frag.effects().nrows();
    if model.epistemic.nrows() != n_states
        || model.response.nrows() != n_effects
        || model.epistemic.ncols() != model.response.ncols()
    {
        return Err(Error::Dimension(format!(
            "model has {} epistemic and {} response rows over {}/{} ontic states; fragment has {n_states} states and {n_effects} effects",
            model.epistemic.nrows(),
            model.response.nrows(),
            model.epistemic.ncols(),
            model.response.ncols()
        )));
    }
    let own;
    let targets = match targets {
        Some(t) => {
            if t.shape() != (n_effects, n_states) {
                return Err(Error::Dimension(format!(
                    "targets are {}x{}, expected {n_effects}x{n_states}",
                    t.nrows(),
                    t.ncols()
                )));
            }
            t
        }
        None => {
            own = frag.probabilities();
            &own
        }
    };
    let mut violations = Vec::new();
    let one = T::one();
    for (state, row) in model.epistemic.rows_iter().enumerate() {
        for (ontic, v) in row.iter().enumerate() {
            if v.is_negative_tol(tol) {
                violations.push(Violation::NegativeEpistemic {
                    state,
                    ontic,
                    value: v.to_f64(),
                });
            }
        }
    }
    for (effect, row) in model.response.rows_iter().enumerate() {
        for (ontic, v) in row.iter().enumerate() {
            if v.is_negative_tol(tol) {
                violations.push(Violation::NegativeResponse {
                    effect,
                    ontic,
                    value: v.to_f64(),
                });
            }
            if (v.clone() - one.clone()).is_positive_tol(tol) {
                violations.push(Violation::ResponseAboveOne {
                    effect,
                    ontic,
                    value: v.to_f64(),
                });
            }
        }
        let is_unit = frag.effects().row(effect).iter().zip(frag.unit()).all(|(a, b)| (a.clone() - b.clone()).is_zero_tol(tol));
        if is_unit && row.iter().any(|v| !(v.clone() - one.clone()).is_zero_tol(tol)) {
            violations.push(Violation::UnitResponse { effect });
        }
    }
    for (state, s) in frag.states().rows_iter().enumerate() {
        if !(dot(frag.unit(), s) - one.clone()).is_zero_tol(tol) {
            continue;
        }
        let sum = model
            .epistemic
            .row(state)
            .iter()
            .fold(T::zero(), |a, b| a + b.clone());
        if !(sum.clone() - one.clone()).is_zero_tol(tol) {
            violations.push(Violation::Normalization {
                state,
                sum: sum.to_f64(),
            });
        }
    }
    let predicted = model.predictions();
    let mut max_residual = T::zero();
    for effect in 0..n_effects {
        for state in 0..n_states {
            let d = (predicted[(effect, state)].clone() - targets[(effect, state)].clone()).abs();
            if !d.is_zero_tol(tol) {
                violations.push(Violation::Pairing {
                    effect,
                    state,
                    residual: d.to_f64(),
                });
            }
            if d > max_residual {
                max_residual = d;
            }
        }
    }
    Ok(ModelCheck {
        max_residual,
        violations,
    })
}

/// Fragment-level targets under depolarising noise:
/// `(1−r)·e·s + r·(e·m)(u·s)`.
pub fn depolarized_targets<T: Scalar>(frag: &GptFragment<T>, r: &T) -> Matrix<T> {
    let m = frag.max_mixed_or_uniform();
    let mut t = frag.probabilities().scale(&(T::one() - r.clone()));
    for (j, e) in frag.effects().rows_iter().enumerate() {
        let em = dot(e, &m);
        for (i, s) in frag.states().rows_iter().enumerate() {
            t[(j, i)] = t[(j, i)].clone() + r.clone() * em.clone() * dot(frag.unit(), s);
        }
    }
    t
}
