use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::{Basis, Outcome};
use super::gate::Gate;
use super::pauli::PauliString;
use crate::error::{QssError, Result};

pub const NORM_TOL: f64 = 1e-9;

/// Branches with less weight than this are treated as unreachable.
const DEGENERATE_BRANCH: f64 = 1e-15;

/// Upper bound on register size, guarding against accidental `2^n` blowup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitCap(pub usize);

impl Default for QubitCap {
    fn default() -> Self {
        QubitCap(20)
    }
}

impl QubitCap {
    pub fn check(self, n_qubits: usize) -> Result<()> {
        if n_qubits > self.0 {
            Err(QssError::Capacity { requested: n_qubits, cap: self.0 })
        } else {
            Ok(())
        }
    }
}

/// Normalized amplitude vector over `n_qubits` qubits.
///
/// Qubit 0 is the most significant bit of the basis index, so index `0b011`
/// of a 3-qubit register is `|011>` read left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

/// Global-index offsets for every local configuration of `qubits`, and for
/// every configuration of the remaining qubits (ascending qubit order).
pub(crate) fn split_offsets(n: usize, qubits: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let place = |qs: &[usize]| -> Vec<usize> {
        let k = qs.len();
        (0..1usize << k)
            .map(|local| {
                qs.iter()
                    .enumerate()
                    .filter(|(j, _)| (local >> (k - 1 - j)) & 1 == 1)
                    .fold(0, |acc, (_, &q)| acc | (1 << (n - 1 - q)))
            })
            .collect()
    };
    let rest: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
    (place(qubits), place(&rest))
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

impl PureState {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(QssError::Argument("a state needs at least one qubit".into()));
        }
        if amps.len() != 1usize << n_qubits {
            return Err(QssError::Argument(format!(
                "{} amplitudes do not describe {n_qubits} qubits",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(QssError::Validation(format!("state norm^2 is {norm}, expected 1")));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Normalize an arbitrary non-zero vector.
    pub fn from_unnormalized(n_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < DEGENERATE_BRANCH {
            return Err(QssError::Argument("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(n_qubits, amps)
    }

    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n_qubits];
        *amps
            .get_mut(index)
            .ok_or_else(|| QssError::Argument(format!("basis index {index} out of range")))? =
            Complex64::new(1.0, 0.0);
        Self::new(n_qubits, amps)
    }

    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis_state(n_qubits, 0)
    }

    /// Single-qubit eigenstate of `basis`.
    pub fn eigenstate(basis: Basis, outcome: Outcome) -> Self {
        Self { n_qubits: 1, amps: basis.eigenvector(outcome).to_vec() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState { n_qubits: self.n_qubits + other.n_qubits, amps }
    }

    /// Append `k` qubits in `|0>` after the existing ones.
    pub fn with_zero_ancillas(&self, k: usize, cap: QubitCap) -> Result<PureState> {
        cap.check(self.n_qubits + k)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim() << k];
        for (i, a) in self.amps.iter().enumerate() {
            amps[i << k] = *a;
        }
        Ok(PureState { n_qubits: self.n_qubits + k, amps })
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<()> {
        for (j, &q) in qubits.iter().enumerate() {
            if q >= self.n_qubits {
                return Err(QssError::Argument(format!(
                    "qubit index {q} out of range for {} qubits",
                    self.n_qubits
                )));
            }
            if qubits[..j].contains(&q) {
                return Err(QssError::Argument(format!("qubit index {q} repeated")));
            }
        }
        Ok(())
    }

    /// Apply a one- or two-qubit unitary to the given target qubits.
    pub fn apply_gate(&self, gate: &Gate, targets: &[usize]) -> Result<PureState> {
        if targets.len() != gate.num_qubits() {
            return Err(QssError::Argument(format!(
                "gate acts on {} qubit(s) but {} target(s) given",
                gate.num_qubits(),
                targets.len()
            )));
        }
        self.check_qubits(targets)?;
        let (local, rest) = split_offsets(self.n_qubits, targets);
        let d = gate.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        let mut buf = vec![Complex64::new(0.0, 0.0); d];
        for &r in &rest {
            for (l, off) in local.iter().enumerate() {
                buf[l] = self.amps[r | off];
            }
            for (row, off) in local.iter().enumerate() {
                out[r | off] = (0..d).map(|col| gate.at(row, col) * buf[col]).sum();
            }
        }
        Ok(PureState { n_qubits: self.n_qubits, amps: out })
    }

    /// `<ψ|P|ψ>` for a Pauli string over all qubits.
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        if pauli.len() != self.n_qubits {
            return Err(QssError::Argument(format!(
                "Pauli string '{pauli}' has {} letters, state has {} qubits",
                pauli.len(),
                self.n_qubits
            )));
        }
        let n = self.n_qubits;
        let mask = pauli.flip_mask();
        let letters = pauli.letters();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let mut phase = Complex64::new(1.0, 0.0);
            for (q, p) in letters.iter().enumerate() {
                phase *= p.act((i >> (n - 1 - q)) & 1).1;
            }
            acc += self.amps[i ^ mask].conj() * phase * a;
        }
        Ok(acc.re)
    }

    /// Unnormalized state of the remaining qubits after projecting each of
    /// `qubits` onto the matching single-qubit vector.
    ///
    /// Returns `(probability, amplitudes)`; the remaining qubits keep their
    /// relative (ascending) order.
    pub fn condition_on(&self, qubits: &[usize], vectors: &[[Complex64; 2]]) -> Result<(f64, Vec<Complex64>)> {
        if qubits.len() != vectors.len() {
            return Err(QssError::Argument("one projection vector per qubit required".into()));
        }
        self.check_qubits(qubits)?;
        let (local, rest) = split_offsets(self.n_qubits, qubits);
        let k = qubits.len();
        // Bra coefficients of the product vector for every local configuration.
        let bra: Vec<Complex64> = (0..local.len())
            .map(|l| {
                vectors
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v[(l >> (k - 1 - j)) & 1].conj())
                    .product()
            })
            .collect();
        let out: Vec<Complex64> = rest
            .iter()
            .map(|&r| local.iter().zip(&bra).map(|(&off, b)| b * self.amps[r | off]).sum())
            .collect();
        let prob = out.iter().map(|a| a.norm_sqr()).sum();
        Ok((prob, out))
    }

    /// Born-rule measurement of one qubit.
    ///
    /// The outcome is `+` iff `randomness < prob(+)`. The returned state is
    /// the renormalized post-measurement state on all qubits.
    pub fn measure(&self, qubit: usize, basis: Basis, randomness: f64) -> Result<(Outcome, PureState)> {
        self.check_qubits(&[qubit])?;
        let plus = basis.eigenvector(Outcome::Plus);
        let (p_plus, _) = self.condition_on(&[qubit], &[plus])?;
        let outcome = if randomness < p_plus { Outcome::Plus } else { Outcome::Minus };
        let v = basis.eigenvector(outcome);
        let (p, rest_amps) = self.condition_on(&[qubit], &[v])?;
        if p < DEGENERATE_BRANCH {
            return Err(QssError::Internal(format!(
                "measurement of qubit {qubit} in {basis} selected a branch of weight {p:.3e} (randomness {randomness})"
            )));
        }
        let (local, rest) = split_offsets(self.n_qubits, &[qubit]);
        let scale = 1.0 / p.sqrt();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (&r, a) in rest.iter().zip(&rest_amps) {
            for (l, off) in local.iter().enumerate() {
                amps[r | off] = v[l] * a * scale;
            }
        }
        Ok((outcome, PureState { n_qubits: self.n_qubits, amps }))
    }

    /// Born-rule probabilities of the outcomes of a projective measurement of
    /// `qubits` in an orthonormal basis of that subsystem.
    pub fn subsystem_probabilities(&self, qubits: &[usize], basis: &[PureState]) -> Result<Vec<f64>> {
        self.check_subsystem_basis(qubits, basis)?;
        let (local, rest) = split_offsets(self.n_qubits, qubits);
        let mut probs = vec![0.0; basis.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); local.len()];
        for &r in &rest {
            for (l, off) in local.iter().enumerate() {
                buf[l] = self.amps[r | off];
            }
            for (k, b) in basis.iter().enumerate() {
                probs[k] += inner(b.amplitudes(), &buf).norm_sqr();
            }
        }
        Ok(probs)
    }

    /// Projective measurement of `qubits` in the given orthonormal basis.
    ///
    /// Selects the first index whose cumulative probability exceeds
    /// `randomness` and returns it with the renormalized post-measurement state.
    pub fn measure_subsystem(&self, qubits: &[usize], basis: &[PureState], randomness: f64) -> Result<(usize, PureState)> {
        let probs = self.subsystem_probabilities(qubits, basis)?;
        let mut acc = 0.0;
        let mut chosen = probs.len() - 1;
        for (k, p) in probs.iter().enumerate() {
            acc += p;
            if randomness < acc {
                chosen = k;
                break;
            }
        }
        let p = probs[chosen];
        if p < DEGENERATE_BRANCH {
            return Err(QssError::Internal(format!(
                "subsystem measurement selected outcome {chosen} of weight {p:.3e} (randomness {randomness})"
            )));
        }
        let b = basis[chosen].amplitudes();
        let (local, rest) = split_offsets(self.n_qubits, qubits);
        let scale = 1.0 / p.sqrt();
        let mut amps = vec![Complex64::new(0.0, 0.0); self.dim()];
        let mut buf = vec![Complex64::new(0.0, 0.0); local.len()];
        for &r in &rest {
            for (l, off) in local.iter().enumerate() {
                buf[l] = self.amps[r | off];
            }
            let overlap = inner(b, &buf) * scale;
            for (l, off) in local.iter().enumerate() {
                amps[r | off] = b[l] * overlap;
            }
        }
        Ok((chosen, PureState { n_qubits: self.n_qubits, amps }))
    }

    fn check_subsystem_basis(&self, qubits: &[usize], basis: &[PureState]) -> Result<()> {
        self.check_qubits(qubits)?;
        let dim = 1usize << qubits.len();
        if basis.len() != dim || basis.iter().any(|b| b.dim() != dim) {
            return Err(QssError::Argument(format!(
                "measurement basis must hold {dim} vectors of dimension {dim}"
            )));
        }
        Ok(())
    }
}

impl fmt::Display for PureState {
    /// Ket notation listing non-negligible amplitudes, e.g. `0.7071|000> + 0.7071i|111>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let ket = format!("{:0width$b}", i, width = self.n_qubits);
            if a.im.abs() < 1e-12 {
                write!(f, "{:.4}|{ket}>", a.re)?;
            } else if a.re.abs() < 1e-12 {
                write!(f, "{:.4}i|{ket}>", a.im)?;
            } else {
                write!(f, "({:.4}{:+.4}i)|{ket}>", a.re, a.im)?;
            }
        }
        Ok(())
    }
}

/// `(|0…0> + e^{i·phase}|1…1>)/√2` under the default qubit cap.
pub fn ghz_state(n_qubits: usize, phase: f64) -> Result<PureState> {
    ghz_state_with_cap(n_qubits, phase, QubitCap::default())
}

pub fn ghz_state_with_cap(n_qubits: usize, phase: f64, cap: QubitCap) -> Result<PureState> {
    if n_qubits < 2 {
        return Err(QssError::Argument(format!("GHZ state needs at least 2 qubits, got {n_qubits}")));
    }
    cap.check(n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] = Complex64::new(h, 0.0);
    amps[dim - 1] = Complex64::from_polar(h, phase);
    PureState::new(n_qubits, amps)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn ghz_amplitudes() {
        let g = ghz_state(3, 0.0).unwrap();
        assert!(close(g.amplitude(0), Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!(close(g.amplitude(7), Complex64::new(FRAC_1_SQRT_2, 0.0)));
        assert!((1..7).all(|i| g.amplitude(i).norm() == 0.0));

        let phi = ghz_state(3, FRAC_PI_2).unwrap();
        assert!(close(phi.amplitude(7), Complex64::new(0.0, FRAC_1_SQRT_2)));
    }

    #[test]
    fn ghz_two_qubits_is_bell_state() {
        let bell = ghz_state(2, 0.0).unwrap();
        let expected = PureState::from_unnormalized(
            2,
            vec![Complex64::new(1.0, 0.0), 0.0.into(), 0.0.into(), Complex64::new(1.0, 0.0)],
        )
        .unwrap();
        assert!((bell.fidelity(&expected) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_range_errors() {
        assert!(matches!(ghz_state(1, 0.0), Err(QssError::Argument(_))));
        assert!(matches!(ghz_state(21, 0.0), Err(QssError::Capacity { requested: 21, cap: 20 })));
        assert!(ghz_state_with_cap(5, 0.0, QubitCap(4)).is_err());
    }

    #[test]
    fn hadamard_on_zero_is_x_plus() {
        let s = PureState::zero(1).unwrap().apply_gate(&Gate::hadamard(), &[0]).unwrap();
        let xp = PureState::eigenstate(Basis::X, Outcome::Plus);
        assert!((s.fidelity(&xp) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_gate_leaves_state() {
        let g = ghz_state(3, 0.4).unwrap();
        assert_eq!(g.apply_gate(&Gate::identity(1), &[1]).unwrap(), g);
        assert_eq!(g.apply_gate(&Gate::identity(2), &[2, 0]).unwrap(), g);
    }

    #[test]
    fn gate_argument_errors() {
        let g = ghz_state(3, 0.0).unwrap();
        assert!(matches!(g.apply_gate(&Gate::cnot(), &[1, 1]), Err(QssError::Argument(_))));
        assert!(matches!(g.apply_gate(&Gate::hadamard(), &[3]), Err(QssError::Argument(_))));
        assert!(matches!(g.apply_gate(&Gate::hadamard(), &[0, 1]), Err(QssError::Argument(_))));
    }

    #[test]
    fn cnot_control_is_first_target() {
        // |10> on qubits (0,1) -> CNOT(0->1) -> |11>
        let s = PureState::basis_state(2, 0b10).unwrap();
        let t = s.apply_gate(&Gate::cnot(), &[0, 1]).unwrap();
        assert!(close(t.amplitude(0b11), 1.0.into()));
        // reversed roles: control qubit 1 is |0>, nothing happens
        let t = s.apply_gate(&Gate::cnot(), &[1, 0]).unwrap();
        assert!(close(t.amplitude(0b10), 1.0.into()));
    }

    #[test]
    fn measuring_eigenstate_is_deterministic() {
        let xp = PureState::eigenstate(Basis::X, Outcome::Plus);
        for r in [0.0, 0.5, 0.999_999] {
            let (o, post) = xp.measure(0, Basis::X, r).unwrap();
            assert_eq!(o.bit(), 0);
            assert!((post.fidelity(&xp) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_x_measurements_collapse_third_qubit() {
        let g = ghz_state(3, 0.0).unwrap();
        let (oa, s) = g.measure(0, Basis::X, 0.1).unwrap();
        let (ob, s) = s.measure(1, Basis::X, 0.1).unwrap();
        assert_eq!((oa, ob), (Outcome::Plus, Outcome::Plus));
        let (pc, _) = s.condition_on(&[2], &[Basis::X.eigenvector(Outcome::Plus)]).unwrap();
        assert!((pc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ghz_z_marginal_is_half() {
        let g = ghz_state(3, 0.0).unwrap();
        let (o, _) = g.measure(0, Basis::Z, 0.4999).unwrap();
        assert_eq!(o, Outcome::Plus);
        let (o, post) = g.measure(0, Basis::Z, 0.5001).unwrap();
        assert_eq!(o, Outcome::Minus);
        assert!(close(post.amplitude(7), 1.0.into()));
    }

    #[test]
    fn degenerate_branch_is_internal_error() {
        let z0 = PureState::zero(1).unwrap();
        // prob(+) is exactly 1, so no randomness in [0,1) selects '-'; force it.
        let err = z0.measure(0, Basis::Z, 1.0).unwrap_err();
        assert!(matches!(err, QssError::Internal(_)));
    }

    #[test]
    fn ancillas_append_after_existing_qubits() {
        let s = PureState::basis_state(2, 0b11).unwrap();
        let t = s.with_zero_ancillas(2, QubitCap::default()).unwrap();
        assert_eq!(t.n_qubits(), 4);
        assert!(close(t.amplitude(0b1100), 1.0.into()));
        assert!(s.with_zero_ancillas(3, QubitCap(4)).is_err());
    }

    #[test]
    fn subsystem_measurement_matches_single_qubit() {
        let g = ghz_state(3, 0.0).unwrap();
        let basis = vec![
            PureState::eigenstate(Basis::X, Outcome::Plus),
            PureState::eigenstate(Basis::X, Outcome::Minus),
        ];
        let probs = g.subsystem_probabilities(&[1], &basis).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-12);
        let (k, post) = g.measure_subsystem(&[1], &basis, 0.2).unwrap();
        let (o, post1) = g.measure(1, Basis::X, 0.2).unwrap();
        assert_eq!(k as u8, o.bit());
        assert!((post.fidelity(&post1) - 1.0).abs() < 1e-12);
    }
}
