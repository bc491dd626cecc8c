//! Python bindings for the GHZ secret-sharing simulator.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use qss_core::adversary::{cheat_tradeoff_sweep, CheatUnitaryParams, SweepConfig};
use qss_core::protocol::{
    self, calibrated_phases, write_transcript_jsonl, AdversaryPrior, AttackMode, Ordering, SecurityReport,
};
use qss_core::quantum::{Ensemble, PauliString};
use qss_core::witness::{self, Normalization, Variant, WitnessSpec};
use qss_core::QssError;

fn err(e: QssError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr<Err = QssError>>(s: &str) -> PyResult<T> {
    s.parse().map_err(err)
}

fn parse_ordering(s: &str) -> PyResult<Ordering> {
    match s {
        "naive" => Ok(Ordering::Naive),
        "reversed" => Ok(Ordering::Reversed),
        other => Err(PyValueError::new_err(format!("unknown ordering '{other}'"))),
    }
}

fn parse_prior(s: &str) -> PyResult<AdversaryPrior> {
    match s {
        "assume_psi" => Ok(AdversaryPrior::AssumePsi),
        "bayesian" => Ok(AdversaryPrior::Bayesian),
        other => Err(PyValueError::new_err(format!("unknown adversary prior '{other}'"))),
    }
}

fn parse_attack(s: &str, unitary: Option<Vec<f64>>) -> PyResult<AttackMode> {
    match (s, unitary) {
        ("none", None) => Ok(AttackMode::None),
        ("intercept", None) => Ok(AttackMode::InterceptEntangle),
        ("unitary", angles) => Ok(AttackMode::ParamUnitary(match angles {
            Some(a) => CheatUnitaryParams::from_flat(&a).map_err(err)?,
            None => CheatUnitaryParams::identity(),
        })),
        (_, Some(_)) => Err(PyValueError::new_err("unitary angles need attack='unitary'")),
        (other, None) => Err(PyValueError::new_err(format!("unknown attack '{other}'"))),
    }
}

/// Protocol parameters.
#[pyclass(name = "ProtocolConfig", module = "qss")]
#[derive(Clone)]
struct PyProtocolConfig {
    inner: protocol::ProtocolConfig,
}

#[pymethods]
impl PyProtocolConfig {
    #[new]
    #[pyo3(signature = (
        n_parties = 3, num_rounds = 10_000, q_z = 0.2, p_psi = 0.5, test_fraction = 0.5,
        ordering = "naive", attack = "none", unitary = None, prior = "assume_psi", k_sigma = 3.0,
        seed = 0, witness_check = true, normalization = "published"
    ))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        n_parties: usize,
        num_rounds: u64,
        q_z: f64,
        p_psi: f64,
        test_fraction: f64,
        ordering: &str,
        attack: &str,
        unitary: Option<Vec<f64>>,
        prior: &str,
        k_sigma: f64,
        seed: u64,
        witness_check: bool,
        normalization: &str,
    ) -> PyResult<Self> {
        let inner = protocol::ProtocolConfig {
            n_parties,
            num_rounds,
            q_z,
            p_psi,
            test_fraction,
            ordering: parse_ordering(ordering)?,
            attack: parse_attack(attack, unitary)?,
            adversary_prior: parse_prior(prior)?,
            k_sigma,
            seed,
            witness_check,
            witness_normalization: parse(normalization)?,
            ..Default::default()
        };
        inner.validate().map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n_parties(&self) -> usize {
        self.inner.n_parties
    }

    #[getter]
    fn num_rounds(&self) -> u64 {
        self.inner.num_rounds
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("config serializes")
    }

    fn __repr__(&self) -> String {
        format!("ProtocolConfig({})", self.to_json())
    }
}

/// Outcome of a protocol run.
#[pyclass(name = "SecurityReport", module = "qss", frozen)]
struct PyReport {
    inner: SecurityReport,
}

#[pymethods]
impl PyReport {
    /// "accept", "abort", "inconclusive" or "unchecked".
    #[getter]
    fn decision(&self) -> &'static str {
        self.inner.decision.label()
    }

    /// `(value, standard_error)` of the I1 estimate.
    #[getter]
    fn i1(&self) -> Option<(f64, f64)> {
        self.inner.i1.as_ref().map(|e| (e.value, e.standard_error))
    }

    #[getter]
    fn i2(&self) -> Option<(f64, f64)> {
        self.inner.i2.as_ref().map(|e| (e.value, e.standard_error))
    }

    #[getter]
    fn qber(&self) -> Option<f64> {
        self.inner.qber
    }

    #[getter]
    fn key_length(&self) -> usize {
        self.inner.key_length
    }

    #[getter]
    fn key_bits(&self) -> String {
        self.inner.key_bits.clone()
    }

    #[getter]
    fn sift_rate(&self) -> f64 {
        self.inner.sift.sift_rate
    }

    #[getter]
    fn adversary_accuracy(&self) -> Option<f64> {
        self.inner.adversary_accuracy
    }

    /// Exact witness values on the attacked state, `(I1, I2)`.
    #[getter]
    fn attacked_witness_values(&self) -> Option<(f64, f64)> {
        self.inner.attack_analysis.as_ref().map(|a| (a.mixture_i1, a.mixture_i2))
    }

    fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.inner).expect("report serializes")
    }

    fn __repr__(&self) -> String {
        format!("SecurityReport(decision={:?}, key_length={})", self.decision(), self.inner.key_length)
    }
}

/// Full run: events, per-round records and the report.
#[pyclass(name = "Transcript", module = "qss", frozen)]
struct PyTranscript {
    inner: protocol::Transcript,
}

#[pymethods]
impl PyTranscript {
    #[getter]
    fn report(&self) -> PyReport {
        PyReport { inner: self.inner.report.clone() }
    }

    #[getter]
    fn num_events(&self) -> usize {
        self.inner.events.len()
    }

    #[getter]
    fn num_rounds(&self) -> usize {
        self.inner.records.len()
    }

    fn to_jsonl(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        write_transcript_jsonl(&self.inner, &mut buf).map_err(err)?;
        Ok(String::from_utf8(buf).expect("json is utf-8"))
    }
}

#[pyfunction]
fn run_protocol(py: Python<'_>, config: &PyProtocolConfig) -> PyResult<PyTranscript> {
    let cfg = config.inner.clone();
    let inner = py.allow_threads(|| protocol::run_protocol(&cfg)).map_err(err)?;
    Ok(PyTranscript { inner })
}

/// A Pauli-sum witness with exact rational coefficients.
#[pyclass(name = "Witness", module = "qss", frozen)]
struct PyWitness {
    inner: WitnessSpec,
}

#[pymethods]
impl PyWitness {
    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits
    }

    #[getter]
    fn variant(&self) -> String {
        self.inner.variant.to_string()
    }

    /// `(numerator, denominator, string)` per term.
    #[getter]
    fn terms(&self) -> Vec<(i64, i64, String)> {
        self.inner
            .terms()
            .iter()
            .map(|t| (*t.coefficient.numer(), *t.coefficient.denom(), t.string.to_string()))
            .collect()
    }

    fn to_table(&self) -> String {
        self.inner.to_table()
    }

    /// Exact value on a state vector given as a list of complex amplitudes.
    fn evaluate(&self, amplitudes: Vec<Complex64>) -> PyResult<f64> {
        let state = qss_core::quantum::PureState::new(self.inner.n_qubits, amplitudes).map_err(err)?;
        witness::evaluate_exact(&self.inner, &Ensemble::pure(state)).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.terms().len()
    }
}

#[pyfunction]
#[pyo3(signature = (n_qubits, variant, normalization = "published"))]
fn build_witness(n_qubits: usize, variant: &str, normalization: &str) -> PyResult<PyWitness> {
    let variant: Variant = parse(variant)?;
    let normalization: Normalization = parse(normalization)?;
    let inner = witness::build_witness_with(n_qubits, variant, normalization).map_err(err)?;
    Ok(PyWitness { inner })
}

/// `(chosen_phase, value)` of the calibrated GHZ state for a witness.
#[pyfunction]
#[pyo3(signature = (n_qubits, variant, normalization = "published"))]
fn calibrate_phase(n_qubits: usize, variant: &str, normalization: &str) -> PyResult<(f64, f64)> {
    let c = witness::calibrate_phase_with(n_qubits, parse(variant)?, parse(normalization)?).map_err(err)?;
    Ok((c.chosen_phase, c.value))
}

/// Amplitudes of `(|0…0> + e^{i phase}|1…1>)/√2`.
#[pyfunction]
#[pyo3(signature = (n_qubits, phase = 0.0))]
fn ghz_state(n_qubits: usize, phase: f64) -> PyResult<Vec<Complex64>> {
    Ok(qss_core::quantum::ghz_state(n_qubits, phase).map_err(err)?.amplitudes().to_vec())
}

/// Expectation of a Pauli string such as `"xyy"` or `"z1z"`.
#[pyfunction]
fn expectation(amplitudes: Vec<Complex64>, pauli: &str) -> PyResult<f64> {
    let p: PauliString = parse(pauli)?;
    let state = qss_core::quantum::PureState::new(p.len(), amplitudes).map_err(err)?;
    state.expectation(&p).map_err(err)
}

/// `(alice, bob, charlie)` eigenstate labels for all 16 X/Y outcome pairs.
#[pyfunction]
fn truth_table() -> PyResult<Vec<(String, String, String)>> {
    Ok(protocol::truth_table()
        .map_err(err)?
        .into_iter()
        .map(|e| (e.alice.label(), e.bob.label(), e.charlie.label()))
        .collect())
}

/// Random search over cheat unitaries. Returns `(identity, best, points)`
/// where each point is `(i1, i2)`.
#[pyfunction]
#[pyo3(signature = (samples = 10_000, seed = 0, p_psi = 0.5, n_parties = 3, refine = true, normalization = "published"))]
#[allow(clippy::type_complexity)]
fn sweep(
    py: Python<'_>,
    samples: usize,
    seed: u64,
    p_psi: f64,
    n_parties: usize,
    refine: bool,
    normalization: &str,
) -> PyResult<((f64, f64), (f64, f64), Vec<(f64, f64)>)> {
    let normalization: Normalization = parse(normalization)?;
    let cfg = SweepConfig { n_parties, samples, p_psi, seed, refine, normalization };
    let r = py
        .allow_threads(|| {
            let (phases, _) = calibrated_phases(n_parties, normalization)?;
            cheat_tradeoff_sweep(&cfg, phases, Default::default())
        })
        .map_err(err)?;
    let best = r.best();
    Ok((
        (r.identity.i1, r.identity.i2),
        (best.i1, best.i2),
        r.points.iter().map(|p| (p.i1, p.i2)).collect(),
    ))
}

#[pymodule]
fn qss(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyProtocolConfig>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyTranscript>()?;
    m.add_class::<PyWitness>()?;
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(build_witness, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate_phase, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_state, m)?)?;
    m.add_function(wrap_pyfunction!(expectation, m)?)?;
    m.add_function(wrap_pyfunction!(truth_table, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
