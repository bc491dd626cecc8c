use super::gate::Gate;
use super::pauli::PauliString;
use super::state::{PureState, NORM_TOL};
use crate::error::{QssError, Result};

/// Convex mixture of pure states with a common register size.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(QssError::Argument("ensemble must have at least one member".into()));
        };
        let n = first.n_qubits();
        if let Some((_, s)) = members.iter().find(|(_, s)| s.n_qubits() != n) {
            return Err(QssError::Argument(format!(
                "ensemble mixes {n}-qubit and {}-qubit states",
                s.n_qubits()
            )));
        }
        if let Some((w, _)) = members.iter().find(|(w, _)| !(*w >= 0.0) || *w > 1.0 + NORM_TOL) {
            return Err(QssError::Validation(format!("ensemble weight {w} outside [0, 1]")));
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(QssError::Validation(format!("ensemble weights sum to {total}, expected 1")));
        }
        Ok(Self { members })
    }

    pub fn pure(state: PureState) -> Self {
        Self { members: vec![(1.0, state)] }
    }

    /// Two-component mixture `p·a + (1-p)·b`.
    pub fn mix(p: f64, a: PureState, b: PureState) -> Result<Self> {
        Self::new(vec![(p, a), (1.0 - p, b)])
    }

    pub fn n_qubits(&self) -> usize {
        self.members[0].1.n_qubits()
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    /// `Σ_j w_j <ψ_j|P|ψ_j>`.
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        if pauli.is_identity() && pauli.len() == self.n_qubits() {
            return Ok(1.0);
        }
        self.members
            .iter()
            .try_fold(0.0, |acc, (w, s)| Ok(acc + w * s.expectation(pauli)?))
    }

    /// Apply the same gate to every member.
    pub fn apply_gate(&self, gate: &Gate, targets: &[usize]) -> Result<Ensemble> {
        let members = self
            .members
            .iter()
            .map(|(w, s)| Ok((*w, s.apply_gate(gate, targets)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { members })
    }
}

impl From<PureState> for Ensemble {
    fn from(state: PureState) -> Self {
        Ensemble::pure(state)
    }
}

/// Expectation of a Pauli string on an ensemble; free-function form of
/// [`Ensemble::expectation`].
pub fn expectation(ensemble: &Ensemble, pauli: &PauliString) -> Result<f64> {
    ensemble.expectation(pauli)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::ghz_state;

    #[test]
    fn weights_validated() {
        let g = ghz_state(3, 0.0).unwrap();
        assert!(Ensemble::new(vec![]).is_err());
        assert!(Ensemble::new(vec![(0.5, g.clone())]).is_err());
        assert!(Ensemble::new(vec![(1.2, g.clone()), (-0.2, g.clone())]).is_err());
        assert!(Ensemble::new(vec![(0.5, g.clone()), (0.5, ghz_state(2, 0.0).unwrap())]).is_err());
        assert!(Ensemble::mix(0.3, g.clone(), g).is_ok());
    }

    #[test]
    fn identity_string_is_exactly_one() {
        let e = Ensemble::mix(0.3, ghz_state(3, 0.0).unwrap(), ghz_state(3, 1.0).unwrap()).unwrap();
        assert_eq!(e.expectation(&"111".parse().unwrap()).unwrap(), 1.0);
    }

    #[test]
    fn length_mismatch_is_argument_error() {
        let e = Ensemble::pure(ghz_state(3, 0.0).unwrap());
        assert!(matches!(e.expectation(&"xx".parse().unwrap()), Err(QssError::Argument(_))));
        assert!(matches!(e.expectation(&"1111".parse().unwrap()), Err(QssError::Argument(_))));
    }
}
