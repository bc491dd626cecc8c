use num_complex::Complex64;

use super::state::PureState;
use crate::error::{QssError, Result};

pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Orthonormal basis whose leading vectors are the (normalized) inputs,
/// completed by Gram–Schmidt against the computational basis.
///
/// Measuring in this basis identifies each input state with certainty.
pub fn discriminating_basis(states: &[PureState]) -> Result<Vec<PureState>> {
    let Some(first) = states.first() else {
        return Err(QssError::Argument("no states to discriminate".into()));
    };
    let n = first.n_qubits();
    let dim = first.dim();
    if states.iter().any(|s| s.n_qubits() != n) {
        return Err(QssError::Argument("states to discriminate differ in dimension".into()));
    }
    if states.len() > dim {
        return Err(QssError::Argument(format!(
            "{} states cannot be orthogonal in dimension {dim}",
            states.len()
        )));
    }
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let overlap = states[i].inner(&states[j]).norm();
            if overlap > ORTHOGONALITY_TOL {
                return Err(QssError::DiscriminationImpossible { i, j, overlap });
            }
        }
    }

    let mut basis: Vec<Vec<Complex64>> = states.iter().map(|s| s.amplitudes().to_vec()).collect();
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[e] = Complex64::new(1.0, 0.0);
        // Two passes of modified Gram–Schmidt for numerical stability.
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                v.iter_mut().zip(b).for_each(|(y, x)| *y -= proj * x);
            }
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    if basis.len() != dim {
        return Err(QssError::Internal("Gram–Schmidt completion fell short".into()));
    }
    basis.into_iter().map(|v| PureState::new(n, v)).collect()
}
