//! The n-party sharing protocol: round execution, announcements, sifting,
//! reconstruction and the witness-based security decision.

mod config;
mod io;
mod record;
mod rules;
mod run;
mod table;

pub use config::{AdversaryPrior, AttackMode, Ordering, ProtocolConfig, StateTag};
pub use io::{read_transcript_jsonl, write_summary_json, write_transcript_jsonl, TranscriptLine, TRANSCRIPT_SCHEMA};
pub use record::{
    AttackAnalysis, Event, EventContent, RoundRecord, SecurityReport, SiftSummary, Transcript, Usage, REPORT_SCHEMA,
};
pub use rules::{compute_qber, sift, valid_combo, ParityOracle, TagPhases};
pub use run::{attack_analysis, calibrated_phases, designate_test_rounds, round_base_seq, round_rng, run_protocol};
pub use table::{render_truth_table, truth_table, Eigen, TruthEntry};
