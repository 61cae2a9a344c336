//! Quantum inputs: verdicts and robustness do not depend on the choice of
//! orthonormal Hermitian basis.

mod common;

use common::*;
use nctest_core::fixtures::fixture;
use nctest_core::input::InputDocument;
use nctest_core::numerics::Tolerance;
use nctest_core::pipeline::{analyze, analyze_fragment, Command, NoiseSpec, Overrides, Verdict};
use nctest_core::quantum::{hermitian_basis, quantum_to_gpt, HermitianBasis, HermitianOperator};
use num_complex::Complex64;
use rand::Rng;

const EPS: f64 = 1e-9;

/// The standard basis with its traceless part rotated by a random orthogonal
/// matrix (Gram–Schmidt on Gaussian-ish columns).
fn rotated_basis(rng: &mut Rng8, d: usize) -> HermitianBasis {
    let std = hermitian_basis(d).unwrap();
    let k = d * d - 1;
    let mut cols: Vec<Vec<f64>> = Vec::new();
    while cols.len() < k {
        let mut v: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for c in &cols {
            let p: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(c) {
                *x -= p * y;
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    let mut elements = vec![std.elements()[0].clone()];
    for c in &cols {
        let mut acc = std.elements()[1].scale(0.0);
        for (w, e) in c.iter().zip(&std.elements()[1..]) {
            acc = acc.add(&e.scale(*w)).unwrap();
        }
        elements.push(acc);
    }
    HermitianBasis::from_elements(elements, Tolerance::new(1e-10).unwrap()).unwrap()
}

fn random_ket(rng: &mut Rng8, d: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

/// Random pure states, and projectors onto random kets with their complements.
fn random_quantum(rng: &mut Rng8, d: usize) -> (Vec<HermitianOperator>, Vec<HermitianOperator>) {
    let states = (0..rng.gen_range(3..=6)).map(|_| HermitianOperator::projector(&random_ket(rng, d))).collect();
    let id = HermitianOperator::identity(d);
    let mut effects = vec![id.clone()];
    for _ in 0..rng.gen_range(2..=3) {
        let p = HermitianOperator::projector(&random_ket(rng, d));
        effects.push(id.add(&p.scale(-1.0)).unwrap());
        effects.push(p);
    }
    (states, effects)
}

#[test]
fn random_qubit_fragments_are_basis_independent() {
    let tol = Tolerance::new(EPS).unwrap();
    let mut rng = rng(41);
    let mut nonclassical = 0;
    for _ in 0..25 {
        let (states, effects) = random_quantum(&mut rng, 2);
        let std = hermitian_basis(2).unwrap();
        let rot = rotated_basis(&mut rng, 2);
        let a = quantum_to_gpt(&states, &effects, &std, tol, true).unwrap();
        let b = quantum_to_gpt(&states, &effects, &rot, tol, true).unwrap();
        let ra = analyze_fragment(a, &NoiseSpec::Depolarizing, tol, true).unwrap();
        let rb = analyze_fragment(b, &NoiseSpec::Depolarizing, tol, true).unwrap();
        assert_eq!(ra.verdict, rb.verdict);
        let (x, y) = (*ra.robustness().unwrap(), *rb.robustness().unwrap());
        assert!((x - y).abs() <= 10.0 * EPS, "r = {x} vs {y}");
        assert!((0.0..=1.0).contains(&x));
        nonclassical += usize::from(ra.verdict == Verdict::Nonclassical);
        for m in [&ra.model_check, &rb.model_check].into_iter().flatten() {
            assert!(m.is_valid() && m.max_residual <= 1e-7);
        }
    }
    assert!(nonclassical > 0, "no nonclassical draw exercised the noise path");
}

#[test]
fn stabilizer_fixture_is_basis_independent() {
    let doc: InputDocument = fixture("stabilizer-qubit").unwrap();
    let q = doc.quantum.as_ref().unwrap();
    let tol = Tolerance::new(EPS).unwrap();
    let (states, effects) = q.operators(tol).unwrap();
    let mut rng = rng(42);
    for _ in 0..5 {
        let basis = rotated_basis(&mut rng, 2);
        let frag = quantum_to_gpt(&states, &effects, &basis, tol, true).unwrap();
        let a = analyze_fragment(frag, &NoiseSpec::Depolarizing, tol, true).unwrap();
        assert_eq!(a.verdict, Verdict::Classical);
        assert!(a.robustness().unwrap().abs() <= 1e-7);
    }
}

#[test]
fn qutrit_diagonal_fragment_is_classical() {
    let tol = Tolerance::new(EPS).unwrap();
    let states: Vec<_> = (0..3)
        .map(|i| {
            let mut d = [0.0; 3];
            d[i] = 1.0;
            HermitianOperator::from_real_diagonal(&d)
        })
        .collect();
    let effects = vec![
        HermitianOperator::from_real_diagonal(&[1.0, 0.5, 0.0]),
        HermitianOperator::from_real_diagonal(&[0.0, 0.5, 1.0]),
        HermitianOperator::identity(3),
    ];
    let mut rng = rng(43);
    for basis in [hermitian_basis(3).unwrap(), rotated_basis(&mut rng, 3)] {
        let frag = quantum_to_gpt(&states, &effects, &basis, tol, true).unwrap();
        let a = analyze_fragment(frag, &NoiseSpec::Depolarizing, tol, true).unwrap();
        assert_eq!(a.verdict, Verdict::Classical);
    }
}

#[test]
fn invalid_quantum_input_is_rejected_unless_skipped() {
    // A state with a negative eigenvalue.
    let bad = serde_json::json!({
        "format": "quantum",
        "quantum": {
            "dimension": 2,
            "states": [[[[1.2, 0], [0, 0]], [[0, 0], [-0.2, 0]]]],
            "effects": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]]
        }
    });
    let doc = nctest_core::input::parse_document(&bad.to_string()).unwrap();
    let err = analyze(&doc, Command::Check, &Overrides::default()).unwrap_err();
    assert!(err.is_input_error());
    assert!(err.to_string().contains("-0.2"), "{err}");
    let skip = Overrides {
        skip_validation: true,
        ..Overrides::default()
    };
    assert!(analyze(&doc, Command::Check, &skip).is_ok());
}
