//! End-to-end analysis: parse, classify, measure robustness, extract and
//! verify a model, and assemble the JSON report.

use serde_json::{json, Map, Value};

use crate::embedding::{
    embedding_from_certificate, ontological_model, to_simplex, verify_model, ModelCheck,
    OntologicalModel, SimplexEmbedding, SimplicialConeEmbedding, Violation,
};
use crate::error::{Error, Result};
use crate::fragment::{
    accessible, custom_noise_rule, depolarizing_rule, noisy_rule, AccessibleFragment, GptFragment,
};
use crate::input::{parse_matrix, parse_row, Arithmetic, Format, InputDocument, NoiseKind, NumLit};
use crate::lp::{check_classicality, fit_rule, robustness, Classicality, EmbeddingCertificate};
use crate::numerics::{vec_mul, Matrix, Rational, Scalar, Tolerance, DEFAULT_EPSILON};
use crate::quantum::{hermitian_basis, quantum_to_gpt};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    /// Verdict and certificate only.
    Check,
    /// Robustness, certificate and the model at the certified noise level.
    Robustness,
    /// Everything, including splittings and facet matrices.
    Report,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Robustness => "robustness",
            Command::Report => "report",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Classical,
    Nonclassical,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Classical => "classical",
            Verdict::Nonclassical => "nonclassical",
        }
    }
}

/// The noise channel mixed in when a fragment is nonclassical.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseSpec<T> {
    /// `s ↦ (u·s)·m` for the fragment's maximally mixed state `m`.
    Depolarizing,
    /// An ambient linear map `N` acting on state vectors.
    Custom(Matrix<T>),
}

#[derive(Clone, Debug)]
pub enum Embedding<T> {
    Simplex(SimplexEmbedding<T>),
    /// Reported when the unit effect gives no simplex normalisation.
    Cone(SimplicialConeEmbedding<T>),
}

/// Every intermediate result of one run.
#[derive(Debug)]
pub struct Analysis<T> {
    pub fragment: GptFragment<T>,
    pub accessible: AccessibleFragment<T>,
    pub verdict: Verdict,
    /// Separating functional from the first LP, when nonclassical.
    pub witness: Option<Matrix<T>>,
    /// `None` when nonclassical and robustness was not requested, or no
    /// noise level up to 1 suffices.
    pub certificate: Option<EmbeddingCertificate<T>>,
    pub robustness_computed: bool,
    /// Noise rule and ambient channel; set when robustness was computed for
    /// a nonclassical fragment.
    pub noise_rule: Option<Matrix<T>>,
    pub channel: Option<Matrix<T>>,
    /// Rule reproduced by the certificate, in span coordinates.
    pub effective_rule: Option<Matrix<T>>,
    /// Effects × states probabilities the model must reproduce.
    pub targets: Option<Matrix<T>>,
    pub embedding: Option<Embedding<T>>,
    pub model: Option<OntologicalModel<T>>,
    pub model_check: Option<ModelCheck<T>>,
    pub warnings: Vec<String>,
}

impl<T: Scalar> Analysis<T> {
    /// `Some(0)` when classical, the certified level when computed.
    pub fn robustness(&self) -> Option<&T> {
        self.certificate.as_ref().map(|c| &c.r)
    }

    pub fn infeasible_at_full_noise(&self) -> bool {
        self.robustness_computed && self.certificate.is_none()
    }
}

/// Runs the stages on an already validated fragment. With `with_robustness`
/// false a nonclassical fragment stops after the first LP.
pub fn analyze_fragment<T: Scalar>(
    frag: GptFragment<T>,
    noise: &NoiseSpec<T>,
    tol: Tolerance,
    with_robustness: bool,
) -> Result<Analysis<T>> {
    let acc = accessible(&frag, tol)?;
    let mut warnings = acc.warnings().to_vec();
    let classicality = check_classicality(&acc)?;
    let mut out = Analysis {
        verdict: if classicality.is_classical() {
            Verdict::Classical
        } else {
            Verdict::Nonclassical
        },
        witness: None,
        certificate: None,
        robustness_computed: false,
        noise_rule: None,
        channel: None,
        effective_rule: None,
        targets: None,
        embedding: None,
        model: None,
        model_check: None,
        warnings: Vec::new(),
        fragment: frag,
        accessible: acc,
    };
    let (acc, frag) = (&out.accessible, &out.fragment);
    let mut unit_preserving = true;
    match classicality {
        Classicality::Classical(cert) => {
            out.effective_rule = Some(acc.rule().clone());
            out.targets = Some(frag.probabilities());
            out.certificate = Some(cert);
        }
        Classicality::Nonclassical { witness } => {
            out.witness = Some(witness);
            if !with_robustness {
                out.warnings = warnings;
                return Ok(out);
            }
            out.robustness_computed = true;
            let (rule, channel) = match noise {
                NoiseSpec::Depolarizing => {
                    let m = frag.max_mixed_or_uniform();
                    let channel = Matrix::column_vector(&m).matmul(&Matrix::row_vector(frag.unit()))?;
                    (depolarizing_rule(acc, frag)?, channel)
                }
                NoiseSpec::Custom(n) => (custom_noise_rule(acc, n)?, n.clone()),
            };
            unit_preserving = vec_mul(frag.unit(), &channel)?
                .iter()
                .zip(frag.unit())
                .all(|(a, b)| (a.clone() - b.clone()).is_zero_tol(tol));
            if !unit_preserving {
                warnings.push("noise channel does not preserve the unit effect".into());
            }
            match robustness(acc, &rule) {
                Ok(cert) => {
                    out.effective_rule = Some(noisy_rule(acc.rule(), &rule, &cert.r)?);
                    out.targets = Some(channel_targets(frag, &channel, &cert.r)?);
                    out.certificate = Some(cert);
                }
                Err(Error::InfeasibleAtFullNoise) => {
                    warnings.push("no classical model exists even at full noise (r = 1)".into());
                }
                Err(e) => return Err(e),
            }
            out.noise_rule = Some(rule);
            out.channel = Some(channel);
        }
    }
    if let (Some(cert), Some(rule), Some(targets)) = (&out.certificate, &out.effective_rule, &out.targets) {
        let sce = embedding_from_certificate(acc, cert, rule)?;
        let mut completed = None;
        let se = if acc.unit_in_span() {
            match to_simplex(&sce, acc.unit(), tol) {
                Ok(se) => Some(se),
                Err(e @ (Error::UnitOutsideEffectCone { .. } | Error::SimplexNormalization(_))) => {
                    match complete_embedding(frag, acc, rule, &cert.r, tol)? {
                        Some((acc2, se)) => {
                            warnings.push(format!(
                                "simplex normalization needed the effect complements u - e: {e}"
                            ));
                            completed = Some(acc2);
                            Some(se)
                        }
                        None => {
                            warnings.push(format!("no simplex normalization: {e}"));
                            None
                        }
                    }
                }
                Err(e) => return Err(e),
            }
        } else {
            warnings.push("no simplex normalization: reporting the simplicial-cone embedding only".into());
            None
        };
        match se {
            None => out.embedding = Some(Embedding::Cone(sce)),
            Some(se) => {
                let mut model = ontological_model(&se, completed.as_ref().unwrap_or(acc), rule, cert.r.clone())?;
                // Response functions of the added complements are not part of the fragment.
                let originals: Vec<usize> = (0..frag.effects().nrows()).collect();
                model.response = model.response.select_rows(&originals);
                let check = verify_model(&model, frag, Some(targets), tol)?;
                // Without unit preservation the noisy states need not stay normalised.
                let tolerated = |v: &Violation| {
                    v.is_soft() || (!unit_preserving && matches!(v, Violation::Normalization { .. }))
                };
                let hard: Vec<String> =
                    check.violations.iter().filter(|v| !tolerated(v)).map(|v| v.to_string()).collect();
                if !hard.is_empty() {
                    return Err(Error::Internal(format!(
                        "extracted model fails verification: {}",
                        hard.join("; ")
                    )));
                }
                warnings.extend(check.violations.iter().map(|v| v.to_string()));
                out.embedding = Some(Embedding::Simplex(se));
                out.model = Some(model);
                out.model_check = Some(check);
            }
        }
    }
    out.warnings = warnings;
    Ok(out)
}

/// Retries the simplex conversion on the fragment completed with effect
/// complements. Its accessible coordinates coincide with the original ones
/// (same spans, canonical splittings), so `rule` carries over unchanged; its
/// smaller dual effect cone forces every ontic state the unit misses to
/// carry no weight. `None` when the completed fragment needs more noise.
fn complete_embedding<T: Scalar>(
    frag: &GptFragment<T>,
    acc: &AccessibleFragment<T>,
    rule: &Matrix<T>,
    r: &T,
    tol: Tolerance,
) -> Result<Option<(AccessibleFragment<T>, SimplexEmbedding<T>)>> {
    let acc2 = accessible(&frag.with_complements(), tol)?;
    let same_coordinates = acc2.effect_dim() == acc.effect_dim()
        && acc2.rule().max_abs_diff(acc.rule())?.is_zero_tol(tol)
        && acc2.unit_in_span();
    if !same_coordinates {
        return Ok(None);
    }
    let Some(cert) = fit_rule(&acc2, rule, r.clone())? else {
        return Ok(None);
    };
    let sce = embedding_from_certificate(&acc2, &cert, rule)?;
    match to_simplex(&sce, acc2.unit(), tol) {
        Ok(se) => Ok(Some((acc2, se))),
        Err(Error::UnitOutsideEffectCone { .. } | Error::SimplexNormalization(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Pairwise targets `(1−r)·e·s + r·e·N·s` for an ambient channel `N`.
pub fn channel_targets<T: Scalar>(frag: &GptFragment<T>, channel: &Matrix<T>, r: &T) -> Result<Matrix<T>> {
    let clean = frag.probabilities().scale(&(T::one() - r.clone()));
    let noisy = frag
        .effects()
        .matmul(channel)?
        .matmul(&frag.states().transpose())?
        .scale(r);
    clean.add(&noisy)
}

/// Settings that take precedence over a document's own options.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub arithmetic: Option<Arithmetic>,
    pub tolerance: Option<f64>,
    /// Lowest-precedence default, typically from the environment.
    pub fallback_tolerance: Option<f64>,
    pub noise: Option<NoiseKind>,
    pub noise_matrix: Option<Vec<Vec<NumLit>>>,
    pub max_mixed: Option<Vec<NumLit>>,
    pub skip_validation: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RobustnessResult {
    /// `exact` holds the `"p/q"` form in exact mode.
    Value { value: f64, exact: Option<String> },
    InfeasibleAtFullNoise,
    NotComputed,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub verdict: Verdict,
    pub robustness: RobustnessResult,
    pub json: Value,
}

impl Report {
    /// Verdict and robustness only.
    pub fn quiet_json(&self) -> Value {
        json!({
            "verdict": self.json["verdict"],
            "robustness": self.json["robustness"],
        })
    }
}

/// Runs `cmd` on one document.
pub fn analyze(doc: &InputDocument, cmd: Command, ov: &Overrides) -> Result<Report> {
    doc.check_payload()?;
    let opts = &doc.options;
    let eps = ov
        .tolerance
        .or(opts.tolerance)
        .or(ov.fallback_tolerance)
        .unwrap_or(DEFAULT_EPSILON);
    let tol = Tolerance::new(eps)?;
    let noise = ov.noise.or(opts.noise).unwrap_or(NoiseKind::Depolarizing);
    let noise_matrix = ov.noise_matrix.as_ref().or(opts.noise_matrix.as_ref());
    if noise == NoiseKind::Custom && noise_matrix.is_none() {
        return Err(Error::InvalidInput("custom noise requires a noise matrix".into()));
    }
    let arithmetic = ov.arithmetic.or(opts.arithmetic);
    let st = Settings {
        cmd,
        tol,
        validate: !(ov.skip_validation || opts.skip_validation),
        noise,
        noise_matrix,
        max_mixed: ov.max_mixed.as_ref(),
    };
    match doc.format {
        Format::Quantum => {
            if arithmetic == Some(Arithmetic::Exact) {
                return Err(Error::InvalidInput(
                    "quantum inputs are analysed in float arithmetic; encode them as a gpt document for exact runs"
                        .into(),
                ));
            }
            let q = doc.quantum.as_ref().expect("payload checked");
            let (states, effects) = q.operators(tol)?;
            let basis = hermitian_basis(q.dimension)?;
            run(quantum_to_gpt(&states, &effects, &basis, tol, st.validate)?, &st)
        }
        Format::Gpt => {
            let g = doc.gpt.as_ref().expect("payload checked");
            match arithmetic.unwrap_or(Arithmetic::Exact) {
                Arithmetic::Exact => run(g.to_fragment::<Rational>()?, &st),
                Arithmetic::Float => run(g.to_fragment::<f64>()?, &st),
            }
        }
    }
}

/// Runs every document, concurrently, returning results in input order.
pub fn analyze_batch(docs: &[InputDocument], cmd: Command, ov: &Overrides) -> Vec<Result<Report>> {
    let workers = std::thread::available_parallelism()
        .map(usize::from)
        .unwrap_or(1)
        .min(docs.len())
        .max(1);
    if workers == 1 {
        return docs.iter().map(|d| analyze(d, cmd, ov)).collect();
    }
    let chunk = docs.len().div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = docs
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|d| analyze(d, cmd, ov)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .zip(docs.chunks(chunk))
            .flat_map(|(h, part)| {
                h.join().unwrap_or_else(|_| {
                    part.iter()
                        .map(|_| Err(Error::Internal("worker panicked".into())))
                        .collect()
                })
            })
            .collect()
    })
}

struct Settings<'a> {
    cmd: Command,
    tol: Tolerance,
    validate: bool,
    noise: NoiseKind,
    noise_matrix: Option<&'a Vec<Vec<NumLit>>>,
    max_mixed: Option<&'a Vec<NumLit>>,
}

fn run<T: Scalar>(mut frag: GptFragment<T>, st: &Settings<'_>) -> Result<Report> {
    let d = frag.ambient_dim();
    if let Some(m) = st.max_mixed {
        if m.len() != d {
            return Err(Error::Dimension(format!(
                "max-mixed override has length {}, expected {d}",
                m.len()
            )));
        }
        frag = frag.with_max_mixed(Some(parse_row(m, "max_mixed")?))?;
    }
    if st.validate {
        frag.validate(st.tol)?;
    }
    let noise = match st.noise {
        NoiseKind::Depolarizing => NoiseSpec::Depolarizing,
        NoiseKind::Custom => {
            let rows = st.noise_matrix.expect("checked by analyze");
            if rows.len() != d {
                return Err(Error::Dimension(format!(
                    "noise matrix has {} rows, expected {d}",
                    rows.len()
                )));
            }
            NoiseSpec::Custom(parse_matrix(rows, d, "noise_matrix")?)
        }
    };
    let analysis = analyze_fragment(frag, &noise, st.tol, st.cmd != Command::Check)?;
    Ok(render(&analysis, st))
}

fn vec_json<T: Scalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(Scalar::to_json).collect())
}

fn opt_json<T: Scalar>(m: Option<&Matrix<T>>) -> Value {
    m.map_or(Value::Null, Matrix::to_json)
}

fn render<T: Scalar>(a: &Analysis<T>, st: &Settings<'_>) -> Report {
    let tol = st.tol;
    let (acc, frag) = (&a.accessible, &a.fragment);
    let robustness = match (&a.certificate, a.infeasible_at_full_noise()) {
        (Some(c), _) => RobustnessResult::Value {
            value: c.r.to_f64(),
            exact: c.r.to_rational().map(|q| q.to_string()),
        },
        (None, true) => RobustnessResult::InfeasibleAtFullNoise,
        (None, false) => RobustnessResult::NotComputed,
    };
    let status = match (&robustness, a.verdict) {
        (RobustnessResult::Value { .. }, Verdict::Classical) => "classical",
        (RobustnessResult::Value { .. }, Verdict::Nonclassical) => "computed",
        (RobustnessResult::InfeasibleAtFullNoise, _) => "infeasible_at_full_noise",
        (RobustnessResult::NotComputed, _) => "not_computed",
    };

    let mut out = Map::new();
    out.insert("command".into(), json!(st.cmd.as_str()));
    out.insert("verdict".into(), json!(a.verdict.as_str()));
    out.insert("robustness".into(), a.robustness().map_or(Value::Null, Scalar::to_json));
    out.insert("robustness_status".into(), json!(status));
    out.insert("sigma".into(), opt_json(a.certificate.as_ref().map(|c| &c.sigma)));
    if a.verdict == Verdict::Nonclassical {
        out.insert("witness".into(), opt_json(a.witness.as_ref()));
    }

    let mut residuals = Map::new();
    let mut diagnostics = Map::new();
    diagnostics.insert("arithmetic".into(), json!(T::MODE.as_str()));
    diagnostics.insert("tolerance".into(), json!(tol.eps));
    let facets = |h: Result<&crate::cone::FacetMatrix<T>>| h.map_or(Value::Null, |h| json!(h.facet_count()));
    diagnostics.insert(
        "dimensions".into(),
        json!({
            "ambient": frag.ambient_dim(),
            "states": acc.state_dim(),
            "effects": acc.effect_dim(),
            "state_facets": facets(acc.h_states()),
            "effect_facets": facets(acc.h_effects()),
        }),
    );
    diagnostics.insert("caratheodory_bound".into(), json!(acc.state_dim() * acc.effect_dim()));
    if let Some(c) = &a.certificate {
        residuals.insert("certificate".into(), c.residual.to_json());
        diagnostics.insert("sigma_nonzeros".into(), json!(c.nonzero_count(tol)));
    }

    if st.cmd != Command::Check {
        diagnostics.insert("noise".into(), json!(st.noise.as_str()));
        if st.noise == NoiseKind::Depolarizing {
            let source = if frag.max_mixed().is_some() { "input" } else { "uniform_mixture" };
            diagnostics.insert("max_mixed_state".into(), vec_json(&frag.max_mixed_or_uniform()));
            diagnostics.insert("max_mixed_state_source".into(), json!(source));
        }
        let noisy = a.certificate.as_ref().is_some_and(|c| !c.r.is_zero());
        out.insert(
            "effective_rule".into(),
            if noisy { opt_json(a.effective_rule.as_ref()) } else { Value::Null },
        );
        if st.cmd == Command::Report {
            out.insert(
                "inclusion".into(),
                json!({"states": acc.state_inclusion().to_json(), "effects": acc.effect_inclusion().to_json()}),
            );
            out.insert(
                "projection".into(),
                json!({"states": acc.state_projection().to_json(), "effects": acc.effect_projection().to_json()}),
            );
            out.insert("H_states".into(), acc.h_states().map_or(Value::Null, |h| h.matrix().to_json()));
            out.insert("H_effects".into(), acc.h_effects().map_or(Value::Null, |h| h.matrix().to_json()));
            out.insert("probability_rule".into(), acc.rule().to_json());
            out.insert("noise_rule".into(), opt_json(a.noise_rule.as_ref()));
            let embedding = match &a.embedding {
                Some(Embedding::Simplex(e)) => embedding_json(true, &e.tau_states, &e.tau_effects),
                Some(Embedding::Cone(e)) => embedding_json(false, &e.tau_states, &e.tau_effects),
                None => Value::Null,
            };
            out.insert("embedding".into(), embedding);
        }
        out.insert(
            "model".into(),
            a.model.as_ref().map_or(Value::Null, |m| {
                json!({
                    "ontic_count": m.ontic_count(),
                    "noise_level": m.r.to_json(),
                    "epistemic_states": m.epistemic.to_json(),
                    "response_functions": m.response.to_json(),
                    "response_support": m.response_support(tol),
                })
            }),
        );
        out.insert(
            "model_check".into(),
            a.model_check.as_ref().map_or(Value::Null, |c| {
                residuals.insert("model".into(), c.max_residual.to_json());
                json!({
                    "max_residual": c.max_residual.to_json(),
                    "violations": c.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                })
            }),
        );
    }
    diagnostics.insert("residuals".into(), Value::Object(residuals));
    diagnostics.insert("warnings".into(), json!(a.warnings));
    out.insert("diagnostics".into(), Value::Object(diagnostics));
    Report {
        verdict: a.verdict,
        robustness,
        json: Value::Object(out),
    }
}

fn embedding_json<T: Scalar>(simplex: bool, ts: &Matrix<T>, te: &Matrix<T>) -> Value {
    json!({
        "simplex": simplex,
        "ontic_count": ts.nrows(),
        "tau_states": ts.to_json(),
        "tau_effects": te.to_json(),
    })
}
