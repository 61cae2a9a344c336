//! GPT fragments, their accessible (span) form, and noise rules.

use std::sync::OnceLock;

use crate::cone::{dual_rays, ConeGenerators, FacetMatrix};
use crate::error::{Error, Result};
use crate::numerics::{
    dot, in_row_space, split_idempotent, vec_mul, Matrix, Scalar, Splitting, Tolerance,
};

/// States and effects of one prepare-measure experiment as vectors in a
/// common ambient space of dimension `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct GptFragment<T> {
    states: Matrix<T>,
    effects: Matrix<T>,
    unit: Vec<T>,
    max_mixed: Option<Vec<T>>,
}

impl<T: Scalar> GptFragment<T> {
    /// Checks shapes only; see [`GptFragment::validate`] for the physical checks.
    pub fn new(
        states: Matrix<T>,
        effects: Matrix<T>,
        unit: Vec<T>,
        max_mixed: Option<Vec<T>>,
    ) -> Result<Self> {
        if states.nrows() == 0 {
            return Err(Error::InvalidInput("fragment has no states".into()));
        }
        if effects.nrows() == 0 {
            return Err(Error::InvalidInput("fragment has no effects".into()));
        }
        let d = states.ncols();
        if d == 0 {
            return Err(Error::Dimension("ambient dimension is zero".into()));
        }
        if effects.ncols() != d {
            return Err(Error::Dimension(format!(
                "states have length {d} but effects have length {}",
                effects.ncols()
            )));
        }
        if unit.len() != d {
            return Err(Error::Dimension(format!(
                "unit effect has length {}, expected {d}",
                unit.len()
            )));
        }
        if let Some(m) = &max_mixed {
            if m.len() != d {
                return Err(Error::Dimension(format!(
                    "maximally mixed state has length {}, expected {d}",
                    m.len()
                )));
            }
        }
        Ok(GptFragment {
            states,
            effects,
            unit,
            max_mixed,
        })
    }

    /// Every state must satisfy `u·s ∈ [−ε, 1+ε]` (subnormalised states
    /// allowed); a designated maximally mixed state must be normalised.
    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        if let Some(m) = &self.max_mixed {
            let v = dot(&self.unit, m);
            if !(v.clone() - T::one()).is_zero_tol(tol) {
                return Err(Error::InvalidInput(format!(
                    "maximally mixed state has unit-effect value {v}, expected 1"
                )));
            }
        }
        for (index, s) in self.states.rows_iter().enumerate() {
            let v = dot(&self.unit, s);
            if v.is_negative_tol(tol) || (v.clone() - T::one()).is_positive_tol(tol) {
                return Err(Error::StateNormalization {
                    index,
                    value: v.to_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.states.ncols()
    }

    pub fn states(&self) -> &Matrix<T> {
        &self.states
    }

    pub fn effects(&self) -> &Matrix<T> {
        &self.effects
    }

    pub fn unit(&self) -> &[T] {
        &self.unit
    }

    pub fn max_mixed(&self) -> Option<&[T]> {
        self.max_mixed.as_deref()
    }

    /// The designated maximally mixed state, or else the uniform mixture of
    /// the states, rescaled to unit normalisation when the states are
    /// subnormalised.
    pub fn max_mixed_or_uniform(&self) -> Vec<T> {
        if let Some(m) = &self.max_mixed {
            return m.clone();
        }
        let n = T::from_i64(self.states.nrows() as i64);
        let mix: Vec<T> = (0..self.ambient_dim())
            .map(|j| {
                self.states
                    .column(j)
                    .into_iter()
                    .fold(T::zero(), |a, b| a + b)
                    / n.clone()
            })
            .collect();
        let norm = dot(&self.unit, &mix);
        if norm.is_positive() && norm != T::one() {
            mix.into_iter().map(|v| v / norm.clone()).collect()
        } else {
            mix
        }
    }

    pub fn with_max_mixed(mut self, m: Option<Vec<T>>) -> Result<Self> {
        if let Some(v) = &m {
            if v.len() != self.ambient_dim() {
                return Err(Error::Dimension(format!(
                    "maximally mixed state has length {}, expected {}",
                    v.len(),
                    self.ambient_dim()
                )));
            }
        }
        self.max_mixed = m;
        Ok(self)
    }

    /// Pairwise probabilities `e_j·s_i`, effects as rows.
    pub fn probabilities(&self) -> Matrix<T> {
        self.effects
            .matmul(&self.states.transpose())
            .expect("shapes checked at construction")
    }

    /// The same fragment with the unit and every complement `u − e` added
    /// after the original effects. The effect span is unchanged whenever the
    /// unit already lies in it.
    pub fn with_complements(&self) -> GptFragment<T> {
        let mut effects = self.effects.clone();
        let complements: Vec<Vec<T>> = self
            .effects
            .rows_iter()
            .map(|e| self.unit.iter().zip(e).map(|(u, x)| u.clone() - x.clone()).collect())
            .collect();
        for row in complements.iter().chain(std::iter::once(&self.unit)) {
            effects.push_row(row).expect("rows share the ambient dimension");
        }
        GptFragment {
            effects,
            ..self.clone()
        }
    }

    pub fn to_float(&self) -> GptFragment<f64> {
        GptFragment {
            states: self.states.to_f64(),
            effects: self.effects.to_f64(),
            unit: self.unit.iter().map(Scalar::to_f64).collect(),
            max_mixed: self
                .max_mixed
                .as_ref()
                .map(|m| m.iter().map(Scalar::to_f64).collect()),
        }
    }
}

/// A fragment re-expressed in the coordinates of the spans of its states and
/// of its effects.
#[derive(Debug)]
pub struct AccessibleFragment<T> {
    tol: Tolerance,
    state_split: Splitting<T>,
    effect_split: Splitting<T>,
    states: Matrix<T>,
    effects: Matrix<T>,
    unit: Vec<T>,
    unit_in_span: bool,
    rule: Matrix<T>,
    warnings: Vec<String>,
    h_states: OnceLock<Result<FacetMatrix<T>>>,
    h_effects: OnceLock<Result<FacetMatrix<T>>>,
}

/// Builds the accessible fragment: spans, splittings and the probability rule.
///
/// Facet matrices are computed on first use.
pub fn accessible<T: Scalar>(frag: &GptFragment<T>, tol: Tolerance) -> Result<AccessibleFragment<T>> {
    let d = frag.ambient_dim();
    let state_split = split_idempotent(frag.states(), d, tol)?;
    if state_split.pivots.is_empty() {
        return Err(Error::ZeroDimensionalSpan("state"));
    }
    let effect_split = split_idempotent(frag.effects(), d, tol)?;
    if effect_split.pivots.is_empty() {
        return Err(Error::ZeroDimensionalSpan("effect"));
    }
    let project = |m: &Matrix<T>, s: &Splitting<T>| m.matmul(&s.projection.transpose());
    let states = project(frag.states(), &state_split)?;
    let effects = project(frag.effects(), &effect_split)?;
    let unit = s_mul(&effect_split, frag.unit())?;

    let mut warnings = Vec::new();
    let unit_in_span = in_row_space(&effect_split.inclusion.transpose(), frag.unit(), tol)?;
    if !unit_in_span {
        warnings.push(
            "unit effect lies outside the span of the effects; simplex normalisation is unavailable"
                .to_string(),
        );
    }
    let rule = effect_split
        .inclusion
        .transpose()
        .matmul(&state_split.inclusion)?;
    Ok(AccessibleFragment {
        tol,
        state_split,
        effect_split,
        states,
        effects,
        unit,
        unit_in_span,
        rule,
        warnings,
        h_states: OnceLock::new(),
        h_effects: OnceLock::new(),
    })
}

/// `P·v` for an ambient vector.
fn s_mul<T: Scalar>(s: &Splitting<T>, v: &[T]) -> Result<Vec<T>> {
    s.projection.mul_vec(v)
}

impl<T: Scalar> AccessibleFragment<T> {
    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn state_dim(&self) -> usize {
        self.state_split.pivots.len()
    }

    pub fn effect_dim(&self) -> usize {
        self.effect_split.pivots.len()
    }

    pub fn state_inclusion(&self) -> &Matrix<T> {
        &self.state_split.inclusion
    }

    pub fn effect_inclusion(&self) -> &Matrix<T> {
        &self.effect_split.inclusion
    }

    pub fn state_projection(&self) -> &Matrix<T> {
        &self.state_split.projection
    }

    pub fn effect_projection(&self) -> &Matrix<T> {
        &self.effect_split.projection
    }

    /// Projected state rows `s·P_Ωᵀ`.
    pub fn states(&self) -> &Matrix<T> {
        &self.states
    }

    /// Projected effect rows `e·P_Eᵀ`.
    pub fn effects(&self) -> &Matrix<T> {
        &self.effects
    }

    /// Projected unit effect `u·P_Eᵀ`.
    pub fn unit(&self) -> &[T] {
        &self.unit
    }

    pub fn unit_in_span(&self) -> bool {
        self.unit_in_span
    }

    /// The probability rule `B = I_Eᵀ·I_Ω` (d_E × d_Ω).
    pub fn rule(&self) -> &Matrix<T> {
        &self.rule
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Facets of the accessible state cone (n × d_Ω), computed once.
    pub fn h_states(&self) -> Result<&FacetMatrix<T>> {
        self.h_states
            .get_or_init(|| facets(&self.states, self.tol))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Facets of the accessible effect cone (m × d_E), computed once.
    pub fn h_effects(&self) -> Result<&FacetMatrix<T>> {
        self.h_effects
            .get_or_init(|| facets(&self.effects, self.tol))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `e_A·rule·s_Aᵀ` for every pair, effects as rows.
    pub fn pairings(&self, rule: &Matrix<T>) -> Result<Matrix<T>> {
        self.effects.matmul(rule)?.matmul(&self.states.transpose())
    }
}

fn facets<T: Scalar>(rows: &Matrix<T>, tol: Tolerance) -> Result<FacetMatrix<T>> {
    dual_rays(&ConeGenerators::new(rows, tol)?, tol)
}

/// Depolarising noise `B_D = (I_Eᵀ·mᵀ)(u·I_Ω)`, with `m` the fragment's
/// maximally mixed state or, if none is designated, the uniform mixture of its states.
pub fn depolarizing_rule<T: Scalar>(
    acc: &AccessibleFragment<T>,
    frag: &GptFragment<T>,
) -> Result<Matrix<T>> {
    let m = frag.max_mixed_or_uniform();
    let state_basis = acc.state_inclusion().transpose();
    if !in_row_space(&state_basis, &m, acc.tol)? {
        return Err(Error::MixedStateOutsideSpan);
    }
    let column = acc.effect_inclusion().transpose().mul_vec(&m)?;
    let row = vec_mul(frag.unit(), acc.state_inclusion())?;
    Matrix::column_vector(&column).matmul(&Matrix::row_vector(&row))
}

/// `r·B_D + (1−r)·B`.
pub fn noisy_rule<T: Scalar>(b: &Matrix<T>, b_d: &Matrix<T>, r: &T) -> Result<Matrix<T>> {
    if r.is_negative() || *r > T::one() {
        return Err(Error::NoiseLevel(r.to_f64()));
    }
    b_d.scale(r).add(&b.scale(&(T::one() - r.clone())))
}

/// Pulls an ambient noise channel `N` (D × D) back to span coordinates: `I_Eᵀ·N·I_Ω`.
pub fn custom_noise_rule<T: Scalar>(acc: &AccessibleFragment<T>, n: &Matrix<T>) -> Result<Matrix<T>> {
    let d = acc.state_inclusion().nrows();
    if n.shape() != (d, d) {
        return Err(Error::Dimension(format!(
            "noise matrix is {}x{}, expected {d}x{d}",
            n.nrows(),
            n.ncols()
        )));
    }
    acc.effect_inclusion()
        .transpose()
        .matmul(n)?
        .matmul(acc.state_inclusion())
}
