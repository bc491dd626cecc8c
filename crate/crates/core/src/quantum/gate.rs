use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{QssError, Result};

pub const UNITARY_TOL: f64 = 1e-9;

/// A validated unitary acting on one or two qubits.
///
/// The matrix is row-major. For two-qubit gates the local index is
/// `2 * bit(targets[0]) + bit(targets[1])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    dim: usize,
    matrix: Vec<Complex64>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Gate {
    pub fn new(matrix: Vec<Complex64>) -> Result<Self> {
        let dim = match matrix.len() {
            4 => 2,
            16 => 4,
            len => {
                return Err(QssError::Validation(format!(
                    "gate matrix must be 2x2 or 4x4, got {len} entries"
                )))
            }
        };
        let deviation = unitarity_deviation(&matrix, dim);
        if deviation > UNITARY_TOL {
            return Err(QssError::Validation(format!(
                "gate is not unitary: max |U†U - I| entry = {deviation:.3e}"
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_qubits(&self) -> usize {
        if self.dim == 2 {
            1
        } else {
            2
        }
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    #[inline]
    pub(crate) fn at(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim + col]
    }

    pub fn identity(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        let mut matrix = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = c(1.0, 0.0);
        }
        Self { dim, matrix }
    }

    pub fn hadamard() -> Self {
        let h = FRAC_1_SQRT_2;
        Self { dim: 2, matrix: vec![c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0)] }
    }

    pub fn pauli_x() -> Self {
        Self { dim: 2, matrix: vec![c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)] }
    }

    /// Phase gate `diag(1, e^{iθ})`.
    pub fn phase(theta: f64) -> Self {
        Self { dim: 2, matrix: vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, theta)] }
    }

    /// `|0><0| ⊗ I + |1><1| ⊗ X`, control on `targets[0]`.
    pub fn cnot() -> Self {
        let mut matrix = vec![c(0.0, 0.0); 16];
        matrix[0] = c(1.0, 0.0);
        matrix[5] = c(1.0, 0.0);
        matrix[2 * 4 + 3] = c(1.0, 0.0);
        matrix[3 * 4 + 2] = c(1.0, 0.0);
        Self { dim: 4, matrix }
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut matrix = vec![c(0.0, 0.0); d * d];
        for r in 0..d {
            for col in 0..d {
                matrix[col * d + r] = self.matrix[r * d + col].conj();
            }
        }
        Self { dim: d, matrix }
    }
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_deviation(matrix: &[Complex64], dim: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = c(0.0, 0.0);
            for k in 0..dim {
                acc += matrix[k * dim + i].conj() * matrix[k * dim + j];
            }
            if i == j {
                acc -= 1.0;
            }
            worst = worst.max(acc.norm());
        }
    }
    worst
}
