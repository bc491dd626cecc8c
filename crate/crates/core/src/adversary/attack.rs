use crate::error::{QssError, Result};
use crate::quantum::{ghz_state_with_cap, Ensemble, Gate, PureState, QubitCap};

/// Which qubits the dishonest party intercepts and where its ancillas live.
///
/// The adversary is the last party. It intercepts the channels of every
/// non-dealer party except itself and keeps one ancilla per channel, appended
/// after the parties' qubits in interception order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackLayout {
    pub n_parties: usize,
    pub adversary: usize,
    pub targets: Vec<usize>,
    pub ancillas: Vec<usize>,
}

impl AttackLayout {
    pub fn new(n_parties: usize) -> Result<Self> {
        if n_parties < 3 {
            return Err(QssError::Argument(format!("attack needs at least 3 parties, got {n_parties}")));
        }
        let targets: Vec<usize> = (1..n_parties - 1).collect();
        let ancillas = (n_parties..n_parties + targets.len()).collect();
        Ok(Self { n_parties, adversary: n_parties - 1, targets, ancillas })
    }

    pub fn total_qubits(&self) -> usize {
        self.n_parties + self.ancillas.len()
    }

    /// Honest parties in party order.
    pub fn honest(&self) -> Vec<usize> {
        (0..self.n_parties).filter(|&p| p != self.adversary).collect()
    }

    /// Qubits in the adversary's hands: its own, then the ancillas.
    pub fn held(&self) -> Vec<usize> {
        std::iter::once(self.adversary).chain(self.ancillas.iter().copied()).collect()
    }
}

/// Entangle each intercepted qubit with a fresh `|0>` ancilla: Hadamard on
/// the target, then CNOT from the target onto its ancilla.
pub fn intercept_entangle(state: &PureState, targets: &[usize], cap: QubitCap) -> Result<PureState> {
    let n = state.n_qubits();
    let mut s = state.with_zero_ancillas(targets.len(), cap)?;
    let h = Gate::hadamard();
    let cnot = Gate::cnot();
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(QssError::Argument(format!("intercept target {t} out of range")));
        }
        s = s.apply_gate(&h, &[t])?;
        s = s.apply_gate(&cnot, &[t, n + i])?;
    }
    Ok(s)
}

/// GHZ state with the given phase after the intercept-entangle attack.
pub fn attacked_ghz(layout: &AttackLayout, phase: f64, cap: QubitCap) -> Result<PureState> {
    let ghz = ghz_state_with_cap(layout.n_parties, phase, cap)?;
    intercept_entangle(&ghz, &layout.targets, cap)
}

/// Mixture `p·attacked(psi) + (1-p)·attacked(phi)` over parties and ancillas.
pub fn attacked_mixture(layout: &AttackLayout, p_psi: f64, psi_phase: f64, phi_phase: f64, cap: QubitCap) -> Result<Ensemble> {
    Ensemble::mix(p_psi, attacked_ghz(layout, psi_phase, cap)?, attacked_ghz(layout, phi_phase, cap)?)
}
