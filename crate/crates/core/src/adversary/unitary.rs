use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QssError, Result};
use crate::quantum::Gate;

const D: usize = 4;

/// Sixteen angles of the composite parametrization of `U(4)`:
///
/// ```text
/// U = [ Π_{m<n} exp(i P_n λ[n][m]) · exp(i Y_{mn} λ[m][n]) ] · Π_l exp(i P_l λ[l][l])
/// ```
///
/// with `P_l = |l><l|` and `Y_{mn} = -i|m><n| + i|n><m|`. Diagonal entries
/// are global/local phases in `[0, 2π)`, upper-triangle entries rotation
/// angles in `[0, π/2]`, lower-triangle entries relative phases in `[0, 2π)`.
/// All zeros gives the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheatUnitaryParams {
    pub lambda: [[f64; D]; D],
}

fn matmul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); D * D];
    for i in 0..D {
        for k in 0..D {
            let aik = a[i * D + k];
            if aik.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..D {
                out[i * D + j] += aik * b[k * D + j];
            }
        }
    }
    out
}

fn identity() -> Vec<Complex64> {
    let mut m = vec![Complex64::new(0.0, 0.0); D * D];
    for i in 0..D {
        m[i * D + i] = Complex64::new(1.0, 0.0);
    }
    m
}

fn phase_on(l: usize, angle: f64) -> Vec<Complex64> {
    let mut m = identity();
    m[l * D + l] = Complex64::from_polar(1.0, angle);
    m
}

/// `exp(i Y_{mn} θ)`, a real rotation in the `(m, n)` plane.
fn rotation(m: usize, n: usize, theta: f64) -> Vec<Complex64> {
    let mut r = identity();
    let (s, c) = theta.sin_cos();
    r[m * D + m] = Complex64::new(c, 0.0);
    r[n * D + n] = Complex64::new(c, 0.0);
    r[m * D + n] = Complex64::new(s, 0.0);
    r[n * D + m] = Complex64::new(-s, 0.0);
    r
}

impl CheatUnitaryParams {
    pub fn identity() -> Self {
        Self { lambda: [[0.0; D]; D] }
    }

    pub fn from_flat(values: &[f64]) -> Result<Self> {
        if values.len() != D * D {
            return Err(QssError::Argument(format!("expected 16 unitary parameters, got {}", values.len())));
        }
        let mut lambda = [[0.0; D]; D];
        for (i, v) in values.iter().enumerate() {
            lambda[i / D][i % D] = *v;
        }
        Ok(Self { lambda })
    }

    pub fn flat(&self) -> [f64; D * D] {
        let mut out = [0.0; D * D];
        for (i, v) in out.iter_mut().enumerate() {
            *v = self.lambda[i / D][i % D];
        }
        out
    }

    /// Uniform draw over the parameter box.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut lambda = [[0.0; D]; D];
        for (m, row) in lambda.iter_mut().enumerate() {
            for (n, v) in row.iter_mut().enumerate() {
                let range = if m < n { FRAC_PI_2 } else { TAU };
                *v = rng.random::<f64>() * range;
            }
        }
        Self { lambda }
    }

    pub fn matrix(&self) -> Vec<Complex64> {
        let mut u = identity();
        for m in 0..D - 1 {
            for n in (m + 1)..D {
                u = matmul(&u, &phase_on(n, self.lambda[n][m]));
                u = matmul(&u, &rotation(m, n, self.lambda[m][n]));
            }
        }
        for l in 0..D {
            u = matmul(&u, &phase_on(l, self.lambda[l][l]));
        }
        u
    }

    /// The validated two-qubit gate.
    pub fn gate(&self) -> Result<Gate> {
        Gate::new(self.matrix())
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::quantum::unitarity_deviation;

    #[test]
    fn zeros_give_identity() {
        let m = CheatUnitaryParams::identity().matrix();
        for (a, b) in m.iter().zip(identity()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn random_points_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = CheatUnitaryParams::random(&mut rng);
            assert!(unitarity_deviation(&p.matrix(), 4) < 1e-12);
            assert!(p.gate().is_ok());
        }
    }

    #[test]
    fn flat_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = CheatUnitaryParams::random(&mut rng);
        assert_eq!(CheatUnitaryParams::from_flat(&p.flat()).unwrap(), p);
        assert!(CheatUnitaryParams::from_flat(&[0.0; 15]).is_err());
    }
}
