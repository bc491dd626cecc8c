use std::fmt;

use serde::{Deserialize, Serialize};

use crate::adversary::CheatUnitaryParams;
use crate::error::{QssError, Result};
use crate::quantum::QubitCap;
use crate::witness::Normalization;

/// Which GHZ state the dealer prepared for a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StateTag {
    /// `(|0…0> + |1…1>)/√2`
    PsiStandard,
    /// `(|0…0> + e^{iφ}|1…1>)/√2` with the calibrated imaginary phase.
    PhiImaginary,
}

impl fmt::Display for StateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateTag::PsiStandard => write!(f, "psi"),
            StateTag::PhiImaginary => write!(f, "phi"),
        }
    }
}

/// Order of classical announcements within a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering {
    /// All bases in party order, then all results in party order.
    Naive,
    /// All results in party order, then bases in reverse party order.
    Reversed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackMode {
    None,
    /// Hadamard + CNOT onto a fresh ancilla for every intercepted channel,
    /// followed by a delayed discriminating measurement.
    InterceptEntangle,
    /// Intercept-entangle, then a two-qubit unitary on the adversary's
    /// qubit and its first ancilla; the adversary then measures and
    /// reports its qubit honestly.
    ParamUnitary(CheatUnitaryParams),
}

impl AttackMode {
    pub fn is_active(&self) -> bool {
        !matches!(self, AttackMode::None)
    }
}

/// The adversary's belief about which state was prepared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdversaryPrior {
    AssumePsi,
    /// Weigh both preparations by the dealer's mixing probability.
    Bayesian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub n_parties: usize,
    pub num_rounds: u64,
    /// Probability that a party measures in Z.
    pub q_z: f64,
    /// Probability that the dealer prepares the real GHZ state.
    pub p_psi: f64,
    /// Fraction of rounds sacrificed for the witness test.
    pub test_fraction: f64,
    pub ordering: Ordering,
    pub attack: AttackMode,
    pub adversary_prior: AdversaryPrior,
    pub k_sigma: f64,
    pub seed: u64,
    pub witness_check: bool,
    #[serde(default)]
    pub witness_normalization: Normalization,
    pub qubit_cap: QubitCap,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            n_parties: 3,
            num_rounds: 10_000,
            q_z: 0.2,
            p_psi: 0.5,
            test_fraction: 0.5,
            ordering: Ordering::Naive,
            attack: AttackMode::None,
            adversary_prior: AdversaryPrior::AssumePsi,
            k_sigma: 3.0,
            seed: 0,
            witness_check: true,
            witness_normalization: Normalization::Published,
            qubit_cap: QubitCap::default(),
        }
    }
}

fn probability(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(QssError::Argument(format!("{name} must lie in [0, 1], got {v}")))
    }
}

impl ProtocolConfig {
    /// Index of the dishonest party when an attack is active.
    pub fn adversary_party(&self) -> usize {
        self.n_parties - 1
    }

    /// Qubits the simulation needs, ancillas included.
    pub fn register_size(&self) -> usize {
        if self.attack.is_active() {
            2 * self.n_parties - 2
        } else {
            self.n_parties
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_parties < 3 {
            return Err(QssError::Argument(format!("need at least 3 parties, got {}", self.n_parties)));
        }
        if self.num_rounds == 0 {
            return Err(QssError::Argument("num_rounds must be positive".into()));
        }
        probability("q_z", self.q_z)?;
        probability("p_psi", self.p_psi)?;
        if !(self.test_fraction > 0.0 && self.test_fraction <= 1.0) {
            return Err(QssError::Argument(format!(
                "test_fraction must lie in (0, 1], got {}",
                self.test_fraction
            )));
        }
        if !(self.k_sigma > 0.0) {
            return Err(QssError::Argument(format!("k_sigma must be positive, got {}", self.k_sigma)));
        }
        self.qubit_cap.check(self.register_size())
    }
}
