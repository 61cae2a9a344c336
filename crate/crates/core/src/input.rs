//! JSON input documents: a quantum or GPT payload plus run options.

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fragment::GptFragment;
use crate::numerics::{Matrix, Scalar, Tolerance};
use crate::quantum::HermitianOperator;

/// A numeric literal: a JSON number or a string such as `"1/3"` or `"0.25"`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum NumLit {
    Number(serde_json::Number),
    Text(String),
}

impl NumLit {
    pub fn parse<T: Scalar>(&self) -> Result<T> {
        match self {
            NumLit::Number(n) => T::parse_literal(&n.to_string()),
            NumLit::Text(s) => T::parse_literal(s),
        }
    }
}

impl From<&str> for NumLit {
    fn from(s: &str) -> Self {
        NumLit::Text(s.to_string())
    }
}

impl From<i64> for NumLit {
    fn from(v: i64) -> Self {
        NumLit::Number(v.into())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Quantum,
    Gpt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    Depolarizing,
    Custom,
}

impl NoiseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NoiseKind::Depolarizing => "depolarizing",
            NoiseKind::Custom => "custom",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    pub arithmetic: Option<Arithmetic>,
    pub tolerance: Option<f64>,
    pub noise: Option<NoiseKind>,
    pub noise_matrix: Option<Vec<Vec<NumLit>>>,
    #[serde(default)]
    pub skip_validation: bool,
}

/// Operators as `d × d` arrays of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumPayload {
    pub dimension: usize,
    pub states: Vec<Vec<Vec<[f64; 2]>>>,
    pub effects: Vec<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GptPayload {
    pub states: Vec<Vec<NumLit>>,
    pub effects: Vec<Vec<NumLit>>,
    pub unit_effect: Vec<NumLit>,
    pub max_mixed_state: Option<Vec<NumLit>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub format: Format,
    pub quantum: Option<QuantumPayload>,
    pub gpt: Option<GptPayload>,
    #[serde(default)]
    pub options: Options,
}

impl InputDocument {
    /// The payload named by `format` must be present and the other absent.
    pub fn check_payload(&self) -> Result<()> {
        match (self.format, &self.quantum, &self.gpt) {
            (Format::Quantum, Some(_), None) | (Format::Gpt, None, Some(_)) => Ok(()),
            (Format::Quantum, None, _) => Err(Error::InvalidInput(
                "format is \"quantum\" but the \"quantum\" field is missing".into(),
            )),
            (Format::Gpt, _, None) => Err(Error::InvalidInput(
                "format is \"gpt\" but the \"gpt\" field is missing".into(),
            )),
            _ => Err(Error::InvalidInput(
                "exactly one of \"quantum\" and \"gpt\" may be given".into(),
            )),
        }
    }
}

/// Parses one document or a JSON array of documents (batch mode).
pub fn parse_documents(text: &str) -> Result<(Vec<InputDocument>, bool)> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("malformed JSON: {e}")))?;
    let (items, batch) = match value {
        serde_json::Value::Array(items) => (items, true),
        other => (vec![other], false),
    };
    let docs = items
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let doc: InputDocument = serde_json::from_value(v).map_err(|e| {
                if batch {
                    Error::InvalidInput(format!("document {i}: {e}"))
                } else {
                    Error::InvalidInput(e.to_string())
                }
            })?;
            doc.check_payload()?;
            Ok(doc)
        })
        .collect::<Result<Vec<_>>>()?;
    if docs.is_empty() {
        return Err(Error::InvalidInput("batch contains no documents".into()));
    }
    Ok((docs, batch))
}

pub fn parse_document(text: &str) -> Result<InputDocument> {
    let doc: InputDocument =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(e.to_string()))?;
    doc.check_payload()?;
    Ok(doc)
}

/// A row of literals as scalars; `field` names the location in errors.
pub fn parse_row<T: Scalar>(row: &[NumLit], field: &str) -> Result<Vec<T>> {
    row.iter()
        .enumerate()
        .map(|(j, v)| {
            v.parse().map_err(|e| match e {
                Error::InvalidInput(msg) => Error::InvalidInput(format!("{field}[{j}]: {msg}")),
                other => other,
            })
        })
        .collect()
}

pub fn parse_matrix<T: Scalar>(rows: &[Vec<NumLit>], cols: usize, field: &str) -> Result<Matrix<T>> {
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let name = format!("{field}[{i}]");
            if r.len() != cols {
                return Err(Error::Dimension(format!(
                    "{name} has length {}, expected {cols}",
                    r.len()
                )));
            }
            parse_row(r, &name)
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(parsed, cols)
}

impl GptPayload {
    pub fn ambient_dim(&self) -> Result<usize> {
        self.states
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidInput("gpt.states is empty".into()))
    }

    pub fn to_fragment<T: Scalar>(&self) -> Result<GptFragment<T>> {
        let d = self.ambient_dim()?;
        if self.effects.is_empty() {
            return Err(Error::InvalidInput("gpt.effects is empty".into()));
        }
        let states = parse_matrix(&self.states, d, "gpt.states")?;
        let effects = parse_matrix(&self.effects, d, "gpt.effects")?;
        if self.unit_effect.len() != d {
            return Err(Error::Dimension(format!(
                "gpt.unit_effect has length {}, expected {d}",
                self.unit_effect.len()
            )));
        }
        let unit = parse_row(&self.unit_effect, "gpt.unit_effect")?;
        let mixed = match &self.max_mixed_state {
            Some(m) => {
                if m.len() != d {
                    return Err(Error::Dimension(format!(
                        "gpt.max_mixed_state has length {}, expected {d}",
                        m.len()
                    )));
                }
                Some(parse_row(m, "gpt.max_mixed_state")?)
            }
            None => None,
        };
        GptFragment::new(states, effects, unit, mixed)
    }
}

impl QuantumPayload {
    pub fn operators(&self, tol: Tolerance) -> Result<(Vec<HermitianOperator>, Vec<HermitianOperator>)> {
        let d = self.dimension;
        if d == 0 {
            return Err(Error::InvalidInput("quantum.dimension must be positive".into()));
        }
        if self.states.is_empty() {
            return Err(Error::InvalidInput("quantum.states is empty".into()));
        }
        if self.effects.is_empty() {
            return Err(Error::InvalidInput("quantum.effects is empty".into()));
        }
        let convert = |ops: &[Vec<Vec<[f64; 2]>>], field: &str| -> Result<Vec<HermitianOperator>> {
            ops.iter()
                .enumerate()
                .map(|(k, op)| {
                    let name = format!("{field}[{k}]");
                    if op.len() != d {
                        return Err(Error::Dimension(format!(
                            "{name} has {} rows, expected {d}",
                            op.len()
                        )));
                    }
                    let mut entries = Vec::with_capacity(d * d);
                    for (i, row) in op.iter().enumerate() {
                        if row.len() != d {
                            return Err(Error::Dimension(format!(
                                "{name}[{i}] has {} entries, expected {d}",
                                row.len()
                            )));
                        }
                        entries.extend(row.iter().map(|&[re, im]| Complex64::new(re, im)));
                    }
                    HermitianOperator::new(d, entries, tol).map_err(|e| match e {
                        Error::NotHermitian { deviation, .. } => Error::NotHermitian {
                            what: name.clone(),
                            deviation,
                        },
                        other => other,
                    })
                })
                .collect()
        };
        Ok((
            convert(&self.states, "quantum.states")?,
            convert(&self.effects, "quantum.effects")?,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Rational;

    #[test]
    fn parses_gpt_document_with_mixed_literals() {
        let doc = parse_document(
            r#"{"format":"gpt","gpt":{"states":[[1,"1/2"],[1,-0.5]],"effects":[[1,0]],"unit_effect":[1,0]}}"#,
        )
        .unwrap();
        let f = doc.gpt.unwrap().to_fragment::<Rational>().unwrap();
        assert_eq!(f.states()[(0, 1)], Rational::from_ratio(1, 2));
        assert_eq!(f.states()[(1, 1)], Rational::from_ratio(-1, 2));
    }

    #[test]
    fn rejects_mismatched_payload() {
        let err = parse_document(r#"{"format":"quantum","gpt":{"states":[],"effects":[],"unit_effect":[]}}"#)
            .unwrap_err();
        assert!(err.to_string().contains("quantum"));
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(parse_document(r#"{"format":"gpt","gpt":{"states":[[1]],"effects":[[1]],"unit_effect":[1]},"extra":1}"#).is_err());
    }

    #[test]
    fn ragged_quantum_operator() {
        let doc = parse_document(
            r#"{"format":"quantum","quantum":{"dimension":2,"states":[[[[1,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]]],"effects":[[[[1,0],[0,0]],[[0,0],[1,0]]]]}}"#,
        )
        .unwrap();
        let err = doc.quantum.unwrap().operators(Tolerance::default()).unwrap_err();
        assert!(matches!(err, Error::Dimension(ref m) if m.contains("quantum.states[0][0]")));
    }

    #[test]
    fn batch_documents() {
        let one = r#"{"format":"gpt","gpt":{"states":[[1]],"effects":[[1]],"unit_effect":[1]}}"#;
        let (docs, batch) = parse_documents(&format!("[{one},{one}]")).unwrap();
        assert!(batch);
        assert_eq!(docs.len(), 2);
        let (docs, batch) = parse_documents(one).unwrap();
        assert!(!batch);
        assert_eq!(docs.len(), 1);
        assert!(parse_documents("[]").is_err());
    }

    #[test]
    fn gpt_dimension_errors_name_the_field() {
        let doc = parse_document(
            r#"{"format":"gpt","gpt":{"states":[[1,0],[1]],"effects":[[1,0]],"unit_effect":[1,0]}}"#,
        )
        .unwrap();
        let err = doc.gpt.unwrap().to_fragment::<f64>().unwrap_err();
        assert!(err.to_string().contains("gpt.states[1]"));
    }
}
