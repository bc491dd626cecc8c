use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::QssError;

/// Single-qubit measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub const ALL: [Basis; 3] = [Basis::X, Basis::Y, Basis::Z];

    /// Eigenvector for the given outcome, as `[<0|v>, <1|v>]`.
    ///
    /// `|x±> = (|0> ± |1>)/√2`, `|y±> = (|0> ± i|1>)/√2`, `|z+> = |0>`, `|z-> = |1>`.
    pub fn eigenvector(self, outcome: Outcome) -> [Complex64; 2] {
        let h = FRAC_1_SQRT_2;
        let s = outcome.sign() as f64;
        match self {
            Basis::X => [Complex64::new(h, 0.0), Complex64::new(s * h, 0.0)],
            Basis::Y => [Complex64::new(h, 0.0), Complex64::new(0.0, s * h)],
            Basis::Z => match outcome {
                Outcome::Plus => [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                Outcome::Minus => [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            },
        }
    }

    pub fn letter(self) -> char {
        match self {
            Basis::X => 'x',
            Basis::Y => 'y',
            Basis::Z => 'z',
        }
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter().to_ascii_uppercase())
    }
}

impl FromStr for Basis {
    type Err = QssError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "x" | "X" => Ok(Basis::X),
            "y" | "Y" => Ok(Basis::Y),
            "z" | "Z" => Ok(Basis::Z),
            other => Err(QssError::Argument(format!("unknown basis '{other}'"))),
        }
    }
}

/// Result of a single-qubit projective measurement.
///
/// The `+` eigenstate maps to bit 0 and the `-` eigenstate to bit 1, so
/// `bit = (1 - sign) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn sign(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Outcome::Plus => 0,
            Outcome::Minus => 1,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

/// Format a basis list as a compact lowercase string, e.g. `xyz`.
pub fn bases_to_string(bases: &[Basis]) -> String {
    bases.iter().map(|b| b.letter()).collect()
}
