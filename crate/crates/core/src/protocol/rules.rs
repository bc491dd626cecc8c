use std::collections::HashMap;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use super::config::StateTag;
use super::record::{RoundRecord, SiftSummary, Usage};
use crate::error::{QssError, Result};
use crate::quantum::{bases_to_string, ghz_state, Basis, PauliString};

/// GHZ phase used for each preparation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TagPhases {
    pub psi: f64,
    pub phi: f64,
}

impl TagPhases {
    pub fn phase(&self, tag: StateTag) -> f64 {
        match tag {
            StateTag::PsiStandard => self.psi,
            StateTag::PhiImaginary => self.phi,
        }
    }
}

/// True iff an all-X/Y basis combination carries key correlations for the
/// prepared state: an even number of Y for the real GHZ state, odd for the
/// imaginary one. Any Z disqualifies the round.
pub fn valid_combo(bases: &[Basis], tag: StateTag) -> bool {
    if bases.contains(&Basis::Z) {
        return false;
    }
    let ys = bases.iter().filter(|b| **b == Basis::Y).count();
    match tag {
        StateTag::PsiStandard => ys % 2 == 0,
        StateTag::PhiImaginary => ys % 2 == 1,
    }
}

/// Parity of all parties' bits on a key round, read off the sign of the
/// exact GHZ correlator for the basis combination. Results are memoized.
#[derive(Debug)]
pub struct ParityOracle {
    phases: TagPhases,
    cache: RwLock<HashMap<(Vec<Basis>, StateTag), u8>>,
}

impl ParityOracle {
    pub fn new(phases: TagPhases) -> Self {
        Self { phases, cache: RwLock::new(HashMap::new()) }
    }

    pub fn phases(&self) -> TagPhases {
        self.phases
    }

    /// `0` if the correlator is `+1`, `1` if it is `-1`.
    pub fn parity_bit(&self, bases: &[Basis], tag: StateTag) -> Result<u8> {
        let key = (bases.to_vec(), tag);
        if let Some(&bit) = self.cache.read().expect("parity cache poisoned").get(&key) {
            return Ok(bit);
        }
        let ghz = ghz_state(bases.len(), self.phases.phase(tag))?;
        let value = ghz.expectation(&PauliString::from_bases(bases))?;
        let bit = if (value - 1.0).abs() < 1e-9 {
            0
        } else if (value + 1.0).abs() < 1e-9 {
            1
        } else {
            return Err(QssError::InconsistentCombo { bases: bases_to_string(bases), value });
        };
        self.cache.write().expect("parity cache poisoned").insert(key, bit);
        Ok(bit)
    }

    /// Dealer bit from the other parties' bits: `XOR(others) ⊕ parity`.
    pub fn reconstruct_dealer_bit(&self, bases: &[Basis], tag: StateTag, other_bits: &[u8]) -> Result<u8> {
        if other_bits.len() + 1 != bases.len() {
            return Err(QssError::Argument(format!(
                "{} bases but {} non-dealer bits",
                bases.len(),
                other_bits.len()
            )));
        }
        let parity = self.parity_bit(bases, tag)?;
        Ok(other_bits.iter().fold(parity, |acc, b| acc ^ (b & 1)))
    }
}

/// Assign every round's usage: designated test rounds first, then key
/// rounds by [`valid_combo`] on the announced bases and revealed tag.
pub fn sift(records: &mut [RoundRecord], is_test: impl Fn(u64) -> bool) -> SiftSummary {
    let mut summary = SiftSummary::default();
    for r in records.iter_mut() {
        r.usage = if is_test(r.round_id) {
            summary.test_rounds += 1;
            Usage::WitnessTest
        } else if valid_combo(&r.announced_bases, r.state_tag) {
            summary.key_rounds += 1;
            Usage::Key
        } else {
            summary.discarded_rounds += 1;
            Usage::Discarded
        };
    }
    let eligible = summary.key_rounds + summary.discarded_rounds;
    summary.sift_rate = if eligible == 0 { 0.0 } else { summary.key_rounds as f64 / eligible as f64 };
    summary
}

/// Fraction of key rounds whose reconstructed dealer bit (from announced
/// bits) differs from the dealer's true bit; `None` without key rounds.
pub fn compute_qber<'a>(records: impl IntoIterator<Item = &'a RoundRecord>, oracle: &ParityOracle) -> Result<Option<f64>> {
    let mut total = 0u64;
    let mut errors = 0u64;
    for r in records {
        let reconstructed = oracle.reconstruct_dealer_bit(&r.announced_bases, r.state_tag, &r.announced_outcomes[1..])?;
        total += 1;
        if reconstructed != r.true_outcomes[0] {
            errors += 1;
        }
    }
    Ok((total > 0).then(|| errors as f64 / total as f64))
}
