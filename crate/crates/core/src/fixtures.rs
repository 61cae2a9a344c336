//! Built-in example scenarios, as input documents, with hand-checked
//! reference certificates.
//!
//! * `stabilizer-qubit`: the X and Z eigenstates of a qubit with the
//!   corresponding projectors, the identity and the zero effect (classical).
//! * `diagonal-ququart`: four computational-basis states of a 4-level system
//!   and six diagonal effects whose span is only 3-dimensional (classical).
//! * `boxworld`: the square-bit GPT; nonclassical, with robustness 1/2.
//!
//! The `-gpt` variants encode the quantum examples in rational coordinates:
//! `{1, X, Z}` for the qubit, and for the ququart the diagonal basis
//! `{1, diag(1,1,-1,-1), diag(-1,1,1,-1), diag(1,-1,1,-1)}`.

use serde_json::{json, Value};

use crate::input::{parse_document, InputDocument};
use crate::numerics::{Matrix, Rational, Scalar};

pub const NAMES: &[&str] = &[
    "stabilizer-qubit",
    "stabilizer-qubit-gpt",
    "diagonal-ququart",
    "diagonal-ququart-gpt",
    "boxworld",
];

pub fn fixture_json(name: &str) -> Option<Value> {
    Some(match name {
        "stabilizer-qubit" => stabilizer_qubit(),
        "stabilizer-qubit-gpt" => stabilizer_qubit_gpt(),
        "diagonal-ququart" => diagonal_ququart(),
        "diagonal-ququart-gpt" => diagonal_ququart_gpt(),
        "boxworld" => boxworld(),
        _ => return None,
    })
}

pub fn fixture(name: &str) -> Option<InputDocument> {
    fixture_json(name).map(|v| parse_document(&v.to_string()).expect("built-in fixtures are valid"))
}

fn real(m: &[&[f64]]) -> Value {
    Value::Array(
        m.iter()
            .map(|row| Value::Array(row.iter().map(|&x| json!([x, 0.0])).collect()))
            .collect(),
    )
}

fn stabilizer_qubit() -> Value {
    let zero = real(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let one = real(&[&[0.0, 0.0], &[0.0, 1.0]]);
    let plus = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let minus = real(&[&[0.5, -0.5], &[-0.5, 0.5]]);
    let id = real(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let zero_effect = real(&[&[0.0, 0.0], &[0.0, 0.0]]);
    json!({
        "format": "quantum",
        "quantum": {
            "dimension": 2,
            "states": [zero, one, plus, minus],
            "effects": [zero, one, plus, minus, id, zero_effect]
        }
    })
}

fn stabilizer_qubit_gpt() -> Value {
    json!({
        "format": "gpt",
        "gpt": {
            "states": [["1/2", 0, "1/2"], ["1/2", 0, "-1/2"], ["1/2", "1/2", 0], ["1/2", "-1/2", 0]],
            "effects": [[1, 0, 1], [1, 0, -1], [1, 1, 0], [1, -1, 0], [2, 0, 0], [0, 0, 0]],
            "unit_effect": [2, 0, 0],
            "max_mixed_state": ["1/2", 0, 0]
        },
        "options": {"arithmetic": "exact"}
    })
}

fn diag4(d: [f64; 4]) -> Value {
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        m[i][i] = d[i];
    }
    let rows: Vec<&[f64]> = m.iter().map(|r| r.as_slice()).collect();
    real(&rows)
}

fn diagonal_ququart() -> Value {
    json!({
        "format": "quantum",
        "quantum": {
            "dimension": 4,
            "states": [
                diag4([1.0, 0.0, 0.0, 0.0]),
                diag4([0.0, 1.0, 0.0, 0.0]),
                diag4([0.0, 0.0, 1.0, 0.0]),
                diag4([0.0, 0.0, 0.0, 1.0])
            ],
            "effects": [
                diag4([1.0, 1.0, 0.0, 0.0]),
                diag4([0.0, 1.0, 1.0, 0.0]),
                diag4([0.0, 0.0, 1.0, 1.0]),
                diag4([1.0, 0.0, 0.0, 1.0]),
                diag4([1.0, 1.0, 1.0, 1.0]),
                diag4([0.0, 0.0, 0.0, 0.0])
            ]
        }
    })
}

fn diagonal_ququart_gpt() -> Value {
    json!({
        "format": "gpt",
        "gpt": {
            "states": [
                ["1/4", "1/4", "-1/4", "1/4"],
                ["1/4", "1/4", "1/4", "-1/4"],
                ["1/4", "-1/4", "1/4", "1/4"],
                ["1/4", "-1/4", "-1/4", "-1/4"]
            ],
            "effects": [[2, 2, 0, 0], [2, 0, 2, 0], [2, -2, 0, 0], [2, 0, -2, 0], [4, 0, 0, 0], [0, 0, 0, 0]],
            "unit_effect": [4, 0, 0, 0],
            "max_mixed_state": ["1/4", 0, 0, 0]
        },
        "options": {"arithmetic": "exact"}
    })
}

fn boxworld() -> Value {
    json!({
        "format": "gpt",
        "gpt": {
            "states": [[1, 1, 0], [1, 0, 1], [1, -1, 0], [1, 0, -1]],
            "effects": [
                ["1/2", "-1/2", "-1/2"],
                ["1/2", "1/2", "-1/2"],
                ["1/2", "1/2", "1/2"],
                ["1/2", "-1/2", "1/2"],
                [1, 0, 0],
                [0, 0, 0]
            ],
            "unit_effect": [1, 0, 0],
            "max_mixed_state": [1, 0, 0]
        },
        "options": {"arithmetic": "exact"}
    })
}

/// A published certificate together with the facet matrices it refers to.
#[derive(Clone, Debug)]
pub struct ReferenceCertificate {
    pub h_states: Matrix<Rational>,
    pub h_effects: Matrix<Rational>,
    pub sigma: Matrix<Rational>,
    /// `H_Eᵀ·σ·H_Ω` at the certified noise level.
    pub target: Matrix<Rational>,
    pub r: Rational,
}

pub fn reference_certificate(name: &str) -> Option<ReferenceCertificate> {
    let q = Rational::from_ratio;
    match name {
        "stabilizer-qubit-gpt" => {
            let h = Matrix::from_i64_rows(&[&[1, 1, 1], &[1, -1, 1], &[1, 1, -1], &[1, -1, -1]]);
            Some(ReferenceCertificate {
                h_states: h.clone(),
                h_effects: h,
                sigma: Matrix::identity(4).scale(&q(1, 4)),
                target: Matrix::identity(3),
                r: q(0, 1),
            })
        }
        "boxworld" => {
            let mut target = Matrix::identity(3).scale(&q(1, 2));
            target[(0, 0)] = q(1, 1);
            Some(ReferenceCertificate {
                h_states: Matrix::from_i64_rows(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, 1], &[1, -1, -1]]),
                h_effects: Matrix::from_i64_rows(&[&[1, 0, 1], &[1, 0, -1], &[1, 1, 0], &[1, -1, 0]]),
                sigma: Matrix::from_i64_rows(&[&[1, 0, 1, 0], &[0, 1, 0, 1], &[1, 1, 0, 0], &[0, 0, 1, 1]])
                    .scale(&q(1, 8)),
                target,
                r: q(1, 2),
            })
        }
        _ => None,
    }
}

/// Published facet matrices for the diagonal ququart in its rational coordinates.
pub fn reference_facets(name: &str) -> Option<(Matrix<Rational>, Matrix<Rational>)> {
    match name {
        "diagonal-ququart-gpt" => Some((
            Matrix::from_i64_rows(&[&[1, 1, 1, -1], &[1, 1, -1, 1], &[1, -1, 1, 1], &[1, -1, -1, -1]]),
            Matrix::from_i64_rows(&[&[1, 1, 1], &[1, 1, -1], &[1, -1, 1], &[1, -1, -1]]),
        )),
        "stabilizer-qubit-gpt" | "boxworld" => {
            reference_certificate(name).map(|c| (c.h_states, c.h_effects))
        }
        _ => None,
    }
}
