//! Biseparability witnesses for n-qubit GHZ correlations.
//!
//! Each witness is a linear combination of Pauli-string correlators:
//!
//! ```text
//! W = a Σ_{s ∈ {x,y}^n, parity(#y)}  sign(s) · s
//!   - b [ (2^{n-1} - 1) · 1…1  -  Σ_{s ∈ {1,z}^n, #z even ≥ 2} s ]
//! ```
//!
//! With [`Normalization::Published`] (`a = 1/8`, `b = 1/16` for every `n`)
//! the GHZ value is `2^{n-1}/8`. That scaling is not non-positive on all
//! biseparable states: a Bell pair on two qubits times `|x+>` on the third
//! scores `+1/8` on the three-qubit `I1`. Linearizing
//! `|ρ_{0…0,1…1}| ≤ Σ √(ρ_ii ρ_jj)` with `√(uv) ≤ (u+v)/2` gives
//! [`Normalization::Sound`] (`a = b = 2^{-n}`), which is non-positive on
//! every biseparable state and scores `1/2` on the GHZ state for every `n`.
//!
//! Variant [`Variant::I1`] uses the strings with an even number of `y`
//! letters and is violated by the real GHZ state; [`Variant::I2`] uses the
//! odd strings and is violated by the imaginary-phase GHZ state.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::quantum::{ghz_state_with_cap, Basis, Ensemble, Pauli, PauliString, QubitCap};

/// Coefficient scaling of the xy- and z-parts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `1/8` and `1/16` for every `n`.
    #[default]
    Published,
    /// `2^{-n}` for both parts.
    Sound,
}

impl Normalization {
    fn coefficients(self, n_qubits: usize) -> (Rational64, Rational64) {
        match self {
            Normalization::Published => (Rational64::new(1, 8), Rational64::new(1, 16)),
            Normalization::Sound => {
                let c = Rational64::new(1, 1i64 << n_qubits);
                (c, c)
            }
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Normalization::Published => write!(f, "published"),
            Normalization::Sound => write!(f, "sound"),
        }
    }
}

impl std::str::FromStr for Normalization {
    type Err = QssError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "published" => Ok(Normalization::Published),
            "sound" => Ok(Normalization::Sound),
            other => Err(QssError::Argument(format!("unknown normalization '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Variant {
    I1,
    I2,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::I1 => write!(f, "I1"),
            Variant::I2 => write!(f, "I2"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = QssError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "i1" | "1" => Ok(Variant::I1),
            "i2" | "2" => Ok(Variant::I2),
            other => Err(QssError::Argument(format!("unknown witness variant '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessTerm {
    pub coefficient: Rational64,
    pub string: PauliString,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub n_qubits: usize,
    pub variant: Variant,
    #[serde(default)]
    pub normalization: Normalization,
    pub terms: Vec<WitnessTerm>,
}

impl WitnessSpec {
    pub fn terms(&self) -> &[WitnessTerm] {
        &self.terms
    }

    /// Same witness with every string extended by identity letters, for
    /// evaluation on registers that carry extra (e.g. ancilla) qubits.
    pub fn padded(&self, n_qubits: usize) -> WitnessSpec {
        WitnessSpec {
            n_qubits: n_qubits.max(self.n_qubits),
            variant: self.variant,
            normalization: self.normalization,
            terms: self
                .terms
                .iter()
                .map(|t| WitnessTerm { coefficient: t.coefficient, string: t.string.padded(n_qubits) })
                .collect(),
        }
    }

    /// Coefficient lookup by string.
    pub fn coefficient_map(&self) -> BTreeMap<PauliString, Rational64> {
        self.terms.iter().map(|t| (t.string.clone(), t.coefficient)).collect()
    }

    /// Plain-text audit table, one `coefficient<TAB>string` row per term.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "# witness {} n={} normalization={}\n# coefficient\tstring\n",
            self.variant, self.n_qubits, self.normalization
        );
        for t in &self.terms {
            out.push_str(&format!("{}\t{}\n", t.coefficient, t.string));
        }
        out
    }
}

fn xy_sign(variant: Variant, string: &[Pauli]) -> i64 {
    let ys = string.iter().filter(|&&p| p == Pauli::Y).count();
    let xs = string.len() - ys;
    let exponent = match variant {
        Variant::I1 => ys / 2,
        // Every I2 term has the same relative sign under this rule; the
        // overall orientation is fixed by phase calibration.
        Variant::I2 => xs.div_ceil(2),
    };
    if exponent % 2 == 0 {
        1
    } else {
        -1
    }
}

fn strings_over(n: usize, zero: Pauli, one: Pauli) -> impl Iterator<Item = Vec<Pauli>> {
    (0..1usize << n).map(move |m| {
        (0..n)
            .map(|q| if (m >> (n - 1 - q)) & 1 == 1 { one } else { zero })
            .collect()
    })
}

/// Build the witness of the given variant for `n_qubits ≥ 3` parties with
/// the published coefficients.
pub fn build_witness(n_qubits: usize, variant: Variant) -> Result<WitnessSpec> {
    build_witness_with(n_qubits, variant, Normalization::Published)
}

pub fn build_witness_with(n_qubits: usize, variant: Variant, normalization: Normalization) -> Result<WitnessSpec> {
    if n_qubits < 3 {
        return Err(QssError::Argument(format!("witnesses need at least 3 qubits, got {n_qubits}")));
    }
    QubitCap::default().check(n_qubits)?;
    let wanted_parity = match variant {
        Variant::I1 => 0,
        Variant::I2 => 1,
    };

    let mut xy: Vec<Vec<Pauli>> = strings_over(n_qubits, Pauli::X, Pauli::Y)
        .filter(|s| s.iter().filter(|&&p| p == Pauli::Y).count() % 2 == wanted_parity)
        .collect();
    // Order by number of y letters, then y before x.
    xy.sort_by_key(|s| {
        let ys = s.iter().filter(|&&p| p == Pauli::Y).count();
        (ys, s.iter().map(|&p| if p == Pauli::Y { 0u8 } else { 1 }).collect::<Vec<_>>())
    });

    let mut zs: Vec<Vec<Pauli>> = strings_over(n_qubits, Pauli::I, Pauli::Z)
        .filter(|s| {
            let w = s.iter().filter(|&&p| p == Pauli::Z).count();
            w >= 2 && w % 2 == 0
        })
        .collect();
    zs.sort_by_key(|s| {
        let w = s.iter().filter(|&&p| p == Pauli::Z).count();
        (w, s.iter().map(|&p| if p == Pauli::Z { 0u8 } else { 1 }).collect::<Vec<_>>())
    });

    let (xy_coef, z_coef) = normalization.coefficients(n_qubits);
    let mut terms = Vec::with_capacity(xy.len() + zs.len() + 1);
    for s in xy {
        let sign = xy_sign(variant, &s);
        terms.push(WitnessTerm { coefficient: xy_coef * sign, string: PauliString::new(s) });
    }
    let identity_weight = (1i64 << (n_qubits - 1)) - 1;
    terms.push(WitnessTerm { coefficient: -z_coef * identity_weight, string: PauliString::identity(n_qubits) });
    for s in zs {
        terms.push(WitnessTerm { coefficient: z_coef, string: PauliString::new(s) });
    }
    Ok(WitnessSpec { n_qubits, variant, normalization, terms })
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Exact witness value `Σ coefficient · <string>` on an ensemble.
pub fn evaluate_exact(spec: &WitnessSpec, ensemble: &Ensemble) -> Result<f64> {
    if ensemble.n_qubits() != spec.n_qubits {
        return Err(QssError::Argument(format!(
            "witness on {} qubits evaluated on a {}-qubit ensemble",
            spec.n_qubits,
            ensemble.n_qubits()
        )));
    }
    spec.terms
        .iter()
        .try_fold(0.0, |acc, t| Ok(acc + to_f64(t.coefficient) * ensemble.expectation(&t.string)?))
}

/// Result of the phase-calibration step for one witness variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCalibration {
    pub variant: Variant,
    pub n_qubits: usize,
    /// `(phase, exact witness value on the GHZ state with that phase)`.
    pub candidates: Vec<(f64, f64)>,
    pub chosen_phase: f64,
    pub value: f64,
}

/// Fix the GHZ phase the protocol prepares for a witness variant.
///
/// `I1` is bound to phase 0. For `I2` both `±π/2` are evaluated exactly and
/// the one giving the larger (positive) violation is chosen, which removes
/// the dependence on the sign convention of `σ_y`.
pub fn calibrate_phase(n_qubits: usize, variant: Variant) -> Result<PhaseCalibration> {
    calibrate_phase_with(n_qubits, variant, Normalization::Published)
}

pub fn calibrate_phase_with(n_qubits: usize, variant: Variant, normalization: Normalization) -> Result<PhaseCalibration> {
    let spec = build_witness_with(n_qubits, variant, normalization)?;
    let phases: &[f64] = match variant {
        Variant::I1 => &[0.0],
        Variant::I2 => &[FRAC_PI_2, -FRAC_PI_2],
    };
    let candidates = phases
        .iter()
        .map(|&phase| {
            let ghz = ghz_state_with_cap(n_qubits, phase, QubitCap::default())?;
            Ok((phase, evaluate_exact(&spec, &Ensemble::pure(ghz))?))
        })
        .collect::<Result<Vec<_>>>()?;
    let &(chosen_phase, value) = candidates
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one candidate phase");
    Ok(PhaseCalibration { variant, n_qubits, candidates, chosen_phase, value })
}

/// Classical view of a round as needed by the estimator.
pub trait AnnouncedRound {
    fn announced_bases(&self) -> &[Basis];
    /// Announced bits, `0` for the `+` eigenstate and `1` for `-`.
    fn announced_bits(&self) -> &[u8];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessEstimate {
    pub value: f64,
    pub standard_error: f64,
    pub per_term_counts: BTreeMap<PauliString, usize>,
}

#[derive(Default, Clone, Copy)]
struct Tally {
    count: usize,
    sum: i64,
}

impl Tally {
    fn push(&mut self, sign: i64) {
        self.count += 1;
        self.sum += sign;
    }

    fn mean(&self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    /// Variance of the sample mean of ±1 samples.
    fn mean_variance(&self) -> f64 {
        if self.count < 2 {
            return 1.0;
        }
        let n = self.count as f64;
        let m = self.mean();
        (n * (1.0 - m * m) / (n - 1.0)) / n
    }
}

/// Estimate a witness from announced bases and outcomes.
///
/// A round contributes to a term when every party on the term's support
/// announced the term's basis letter; the sample is the product of those
/// parties' announced signs. Identity positions accept any basis. Per-term
/// means are combined with their coefficients and the standard error is
/// propagated assuming independent terms.
pub fn estimate_from_rounds<'a, R, I>(spec: &WitnessSpec, records: I) -> Result<WitnessEstimate>
where
    R: AnnouncedRound + 'a,
    I: IntoIterator<Item = &'a R>,
{
    let n = spec.n_qubits;
    let mut tallies = vec![Tally::default(); spec.terms.len()];
    let mut xy_index: HashMap<&PauliString, usize> = HashMap::new();
    let mut z_terms: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, t) in spec.terms.iter().enumerate() {
        if t.string.is_identity() {
            continue;
        }
        if t.string.letters().iter().all(|p| matches!(p, Pauli::X | Pauli::Y)) {
            xy_index.insert(&t.string, i);
        } else {
            let support = t
                .string
                .letters()
                .iter()
                .enumerate()
                .filter(|(_, &p)| p != Pauli::I)
                .map(|(q, _)| q)
                .collect();
            z_terms.push((i, support));
        }
    }
    let z_only = z_terms.iter().all(|(i, _)| {
        spec.terms[*i].string.letters().iter().all(|p| matches!(p, Pauli::I | Pauli::Z))
    });
    if !z_only {
        return Err(QssError::Argument("witness mixes identity with x/y letters".into()));
    }

    for r in records {
        let bases = r.announced_bases();
        let bits = r.announced_bits();
        if bases.len() != n || bits.len() != n {
            return Err(QssError::Argument(format!(
                "round announces {} bases / {} bits for a {n}-party witness",
                bases.len(),
                bits.len()
            )));
        }
        let sign_of = |q: usize| if bits[q] & 1 == 0 { 1i64 } else { -1 };
        if bases.iter().all(|b| *b != Basis::Z) {
            let key = PauliString::from_bases(bases);
            if let Some(&i) = xy_index.get(&key) {
                tallies[i].push((0..n).map(sign_of).product());
            }
        } else if bases.iter().filter(|b| **b == Basis::Z).count() >= 2 {
            for (i, support) in &z_terms {
                if support.iter().all(|&q| bases[q] == Basis::Z) {
                    tallies[*i].push(support.iter().map(|&q| sign_of(q)).product());
                }
            }
        }
    }

    let mut value = 0.0;
    let mut variance = 0.0;
    let mut per_term_counts = BTreeMap::new();
    for (t, tally) in spec.terms.iter().zip(&tallies) {
        let c = to_f64(t.coefficient);
        if t.string.is_identity() {
            value += c;
            continue;
        }
        if tally.count == 0 {
            return Err(QssError::InsufficientData { term: t.string.to_string() });
        }
        value += c * tally.mean();
        variance += c * c * tally.mean_variance();
        per_term_counts.insert(t.string.clone(), tally.count);
    }
    Ok(WitnessEstimate { value, standard_error: variance.sqrt(), per_term_counts })
}

/// Number of rounds prepared with each GHZ phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagCounts {
    pub psi: usize,
    pub phi: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Abort { failed: Vec<Variant>, reason: String },
    /// Not enough witness data to decide.
    Inconclusive { reason: String },
    /// The witness check was switched off for this run.
    Unchecked,
}

impl Decision {
    pub fn label(&self) -> &'static str {
        match self {
            Decision::Accept => "accept",
            Decision::Abort { .. } => "abort",
            Decision::Inconclusive { .. } => "inconclusive",
            Decision::Unchecked => "unchecked",
        }
    }
}

/// Accept iff, for every state that was actually prepared, the matching
/// witness estimate lies more than `k_sigma` standard errors above zero.
///
/// `I1` is matched to the real GHZ preparation and `I2` to the imaginary
/// one; a variant whose state was never prepared is not required.
pub fn decide_secure(
    i1: Option<&WitnessEstimate>,
    i2: Option<&WitnessEstimate>,
    tag_counts: TagCounts,
    k_sigma: f64,
) -> Result<Decision> {
    if !(k_sigma > 0.0) {
        return Err(QssError::Argument(format!("k_sigma must be positive, got {k_sigma}")));
    }
    if tag_counts.psi == 0 && tag_counts.phi == 0 {
        return Err(QssError::InsufficientData { term: "no witness rounds".into() });
    }
    let mut failed = Vec::new();
    let mut reasons = Vec::new();
    for (variant, estimate, prepared) in [(Variant::I1, i1, tag_counts.psi), (Variant::I2, i2, tag_counts.phi)] {
        if prepared == 0 {
            continue;
        }
        let est = estimate.ok_or_else(|| QssError::InsufficientData { term: format!("{variant} estimate") })?;
        let threshold = k_sigma * est.standard_error;
        if !(est.value > threshold) {
            failed.push(variant);
            reasons.push(format!(
                "{variant} not violated: {:.6} <= {k_sigma}·{:.6}",
                est.value, est.standard_error
            ));
        }
    }
    if failed.is_empty() {
        Ok(Decision::Accept)
    } else {
        Ok(Decision::Abort { failed, reason: reasons.join("; ") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{ghz_state, PureState};

    fn c(re: f64) -> num_complex::Complex64 {
        num_complex::Complex64::new(re, 0.0)
    }

    fn est(value: f64, se: f64) -> WitnessEstimate {
        WitnessEstimate { value, standard_error: se, per_term_counts: BTreeMap::new() }
    }

    #[test]
    fn small_n_rejected() {
        assert!(matches!(build_witness(2, Variant::I1), Err(QssError::Argument(_))));
        assert!(matches!(build_witness(21, Variant::I1), Err(QssError::Capacity { .. })));
    }

    #[test]
    fn five_qubit_term_counts() {
        let w = build_witness(5, Variant::I1).unwrap();
        let xy = w.terms.iter().filter(|t| t.string.count(Pauli::X) + t.string.count(Pauli::Y) == 5).count();
        let id: Vec<_> = w.terms.iter().filter(|t| t.string.is_identity()).collect();
        let z = w.terms.iter().filter(|t| t.string.count(Pauli::Z) > 0).count();
        assert_eq!((xy, id.len(), z), (16, 1, 15));
        assert_eq!(id[0].coefficient, Rational64::new(-15, 16));
    }

    #[test]
    fn product_state_scores_zero() {
        let w = build_witness(3, Variant::I1).unwrap();
        let v = evaluate_exact(&w, &Ensemble::pure(PureState::zero(3).unwrap())).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let w = build_witness(3, Variant::I1).unwrap();
        let e = Ensemble::pure(ghz_state(4, 0.0).unwrap());
        assert!(matches!(evaluate_exact(&w, &e), Err(QssError::Argument(_))));
        assert!(evaluate_exact(&w.padded(4), &e).is_ok());
    }

    #[test]
    fn i2_calibrates_to_positive_half() {
        for n in [3, 4, 5] {
            let cal = calibrate_phase(n, Variant::I2).unwrap();
            let expected = (1u64 << (n - 1)) as f64 / 8.0;
            assert!((cal.value - expected).abs() < 1e-10, "n={n}: {cal:?}");
        }
    }

    #[test]
    fn decisions() {
        let both = TagCounts { psi: 10, phi: 10 };
        assert_eq!(decide_secure(Some(&est(0.49, 0.01)), Some(&est(0.5, 0.01)), both, 3.0).unwrap(), Decision::Accept);
        match decide_secure(Some(&est(-0.1, 0.01)), Some(&est(0.02, 0.01)), both, 3.0).unwrap() {
            Decision::Abort { failed, .. } => assert_eq!(failed, vec![Variant::I1, Variant::I2]),
            d => panic!("{d:?}"),
        }
        let single = TagCounts { psi: 10, phi: 0 };
        assert_eq!(decide_secure(Some(&est(0.5, 0.0)), None, single, 3.0).unwrap(), Decision::Accept);
        assert!(matches!(
            decide_secure(Some(&est(0.5, 0.0)), None, both, 3.0),
            Err(QssError::InsufficientData { .. })
        ));
        assert!(decide_secure(None, None, both, 0.0).is_err());
    }

    struct R(Vec<Basis>, Vec<u8>);
    impl AnnouncedRound for R {
        fn announced_bases(&self) -> &[Basis] {
            &self.0
        }
        fn announced_bits(&self) -> &[u8] {
            &self.1
        }
    }

    #[test]
    fn estimator_requires_every_term() {
        let w = build_witness(3, Variant::I1).unwrap();
        let empty: Vec<R> = vec![];
        assert!(matches!(estimate_from_rounds(&w, &empty), Err(QssError::InsufficientData { .. })));
        let no_z: Vec<R> = ["xxx", "yyx", "yxy", "xyy"]
            .iter()
            .map(|s| R(s.chars().map(|c| c.to_string().parse().unwrap()).collect(), vec![0, 0, 0]))
            .collect();
        match estimate_from_rounds(&w, &no_z) {
            Err(QssError::InsufficientData { term }) => assert!(term.contains('z')),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn table_lists_rationals() {
        let t = build_witness(3, Variant::I1).unwrap().to_table();
        assert!(t.contains("-3/16\t111"));
        assert!(t.contains("1/8\txxx"));
        assert!(t.contains("-1/8\tyyx"));
    }

    #[test]
    fn bell_pair_times_x_plus() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let bell = PureState::new(2, vec![c(h), c(0.0), c(0.0), c(h)]).unwrap();
        let x_plus = PureState::eigenstate(Basis::X, crate::quantum::Outcome::Plus);
        let state = Ensemble::pure(bell.tensor(&x_plus));
        let published = evaluate_exact(&build_witness(3, Variant::I1).unwrap(), &state).unwrap();
        assert!((published - 0.125).abs() < 1e-12);
        let sound = evaluate_exact(&build_witness_with(3, Variant::I1, Normalization::Sound).unwrap(), &state).unwrap();
        assert!(sound.abs() < 1e-12);
    }

    #[test]
    fn sound_ghz_value_is_half() {
        for n in 3..=6 {
            for variant in [Variant::I1, Variant::I2] {
                let cal = calibrate_phase_with(n, variant, Normalization::Sound).unwrap();
                assert!((cal.value - 0.5).abs() < 1e-10, "n={n} {variant}");
            }
        }
    }
}
