use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::basis::Basis;
use crate::error::QssError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Action on a computational basis bit: `P|bit> = phase |bit ^ flip>`.
    #[inline]
    pub(crate) fn act(self, bit: usize) -> (usize, Complex64) {
        match self {
            Pauli::I => (0, Complex64::new(1.0, 0.0)),
            Pauli::X => (1, Complex64::new(1.0, 0.0)),
            // Y|0> = i|1>, Y|1> = -i|0>
            Pauli::Y => (1, Complex64::new(0.0, if bit == 0 { 1.0 } else { -1.0 })),
            Pauli::Z => (0, Complex64::new(if bit == 0 { 1.0 } else { -1.0 }, 0.0)),
        }
    }

    /// Dense 2x2 matrix, row-major.
    pub fn matrix(self) -> [Complex64; 4] {
        let z = Complex64::new(0.0, 0.0);
        let o = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [o, z, z, o],
            Pauli::X => [z, o, o, z],
            Pauli::Y => [z, -i, i, z],
            Pauli::Z => [o, z, z, -o],
        }
    }

    pub fn letter(self) -> char {
        match self {
            Pauli::I => '1',
            Pauli::X => 'x',
            Pauli::Y => 'y',
            Pauli::Z => 'z',
        }
    }

    pub fn from_basis(basis: Basis) -> Self {
        match basis {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }

    /// The measurement basis this letter is read out in, `None` for identity.
    pub fn basis(self) -> Option<Basis> {
        match self {
            Pauli::I => None,
            Pauli::X => Some(Basis::X),
            Pauli::Y => Some(Basis::Y),
            Pauli::Z => Some(Basis::Z),
        }
    }
}

/// Tensor product of single-qubit Paulis, one letter per qubit.
///
/// Displays in the compact correlator notation `xyz1` where `1` is identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { letters }
    }

    pub fn identity(n: usize) -> Self {
        Self { letters: vec![Pauli::I; n] }
    }

    pub fn from_bases(bases: &[Basis]) -> Self {
        Self { letters: bases.iter().map(|&b| Pauli::from_basis(b)).collect() }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn count(&self, p: Pauli) -> usize {
        self.letters.iter().filter(|&&l| l == p).count()
    }

    /// Pad with identity letters up to `n` qubits (e.g. to cover ancillas).
    pub fn padded(&self, n: usize) -> Self {
        let mut letters = self.letters.clone();
        letters.resize(n.max(letters.len()), Pauli::I);
        Self { letters }
    }

    /// Bitmask of qubits flipped by the string, in the MSB-first index convention.
    pub(crate) fn flip_mask(&self) -> usize {
        let n = self.letters.len();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, p)| matches!(p, Pauli::X | Pauli::Y))
            .fold(0, |m, (q, _)| m | (1 << (n - 1 - q)))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = QssError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .map(|c| match c {
                '1' | 'i' | 'I' => Ok(Pauli::I),
                'x' | 'X' => Ok(Pauli::X),
                'y' | 'Y' => Ok(Pauli::Y),
                'z' | 'Z' => Ok(Pauli::Z),
                other => Err(QssError::Argument(format!("invalid Pauli letter '{other}' in '{s}'"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if letters.is_empty() {
            return Err(QssError::Argument("empty Pauli string".into()));
        }
        Ok(Self { letters })
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        let p: PauliString = "xy1z".parse().unwrap();
        assert_eq!(p.letters(), &[Pauli::X, Pauli::Y, Pauli::I, Pauli::Z]);
        assert_eq!(p.to_string(), "xy1z");
        assert!("xq".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn flip_mask_is_msb_first() {
        let p: PauliString = "x1y".parse().unwrap();
        assert_eq!(p.flip_mask(), 0b101);
        let p: PauliString = "1x1".parse().unwrap();
        assert_eq!(p.flip_mask(), 0b010);
    }
}
