use serde::{Deserialize, Serialize};

use super::config::{ProtocolConfig, StateTag};
use crate::adversary::AdversaryKnowledge;
use crate::quantum::Basis;
use crate::witness::{AnnouncedRound, Decision, PhaseCalibration, TagCounts, WitnessEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Usage {
    /// Not yet designated; only seen before the dealer's reveal phase.
    Pending,
    Key,
    WitnessTest,
    Discarded,
}

/// Classical record of one protocol round.
///
/// For honest parties the announced values equal the true ones. For an
/// intercepting adversary there is no single-qubit measurement; its true
/// entries mirror its announcements and its quantum record is kept in
/// `adversary`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round_id: u64,
    pub state_tag: StateTag,
    pub true_bases: Vec<Basis>,
    pub true_outcomes: Vec<u8>,
    pub announced_bases: Vec<Basis>,
    pub announced_outcomes: Vec<u8>,
    pub usage: Usage,
    pub attacked: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<AdversaryKnowledge>,
}

impl AnnouncedRound for RoundRecord {
    fn announced_bases(&self) -> &[Basis] {
        &self.announced_bases
    }

    fn announced_bits(&self) -> &[u8] {
        &self.announced_outcomes
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventContent {
    Basis { basis: Basis },
    Result { bit: u8 },
    /// Dealer reveals the prepared state and designates the round's use.
    Reveal { tag: StateTag, usage: Usage },
}

/// One classical message on the public log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub round: u64,
    pub party: usize,
    #[serde(flatten)]
    pub content: EventContent,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SiftSummary {
    pub key_rounds: u64,
    pub test_rounds: u64,
    pub discarded_rounds: u64,
    /// Key rounds divided by rounds not designated for testing.
    pub sift_rate: f64,
}

/// Exact witness values for an attacked configuration, next to the closed
/// forms `-1/2 - p` and `1/2 - p` claimed for the three-party attack.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackAnalysis {
    /// Matched variant on the announced statistics: I1 over psi rounds.
    pub announced_i1_psi: f64,
    /// Matched variant on the announced statistics: I2 over phi rounds.
    pub announced_i2_phi: f64,
    /// Both variants on the announced statistics of all rounds, tags pooled.
    pub announced_i1_pooled: f64,
    pub announced_i2_pooled: f64,
    /// Both variants on the parties' reduced state of the attacked mixture.
    pub mixture_i1: f64,
    pub mixture_i2: f64,
    pub claimed_i1: f64,
    pub claimed_i2: f64,
}

pub const REPORT_SCHEMA: &str = "qss-report/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecurityReport {
    pub schema: String,
    pub seed: u64,
    pub config: ProtocolConfig,
    pub phase_calibration: Vec<PhaseCalibration>,
    pub i1: Option<WitnessEstimate>,
    pub i2: Option<WitnessEstimate>,
    /// Why an estimate is missing, if it is.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub estimate_errors: Vec<String>,
    pub tag_counts: TagCounts,
    pub decision: Decision,
    pub qber: Option<f64>,
    pub sift: SiftSummary,
    pub key_length: usize,
    /// Dealer bits of the key rounds, as a `0`/`1` string.
    pub key_bits: String,
    pub adversary_accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attack_analysis: Option<AttackAnalysis>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transcript {
    pub events: Vec<Event>,
    pub records: Vec<RoundRecord>,
    pub report: SecurityReport,
}
