use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{AttackMode, Ordering, ProtocolConfig, StateTag};
use super::record::{AttackAnalysis, Event, EventContent, RoundRecord, SecurityReport, Transcript, Usage, REPORT_SCHEMA};
use super::rules::{compute_qber, sift, ParityOracle, TagPhases};
use crate::adversary::{infer_dealer_bit, intercept_entangle, AdversaryModel, AdversaryView, Visible, VisibleEvent};
use crate::error::{QssError, Result};
use crate::quantum::{ghz_state_with_cap, Ensemble};
use crate::witness::{
    build_witness_with, calibrate_phase_with, decide_secure, estimate_from_rounds, evaluate_exact, Decision, PhaseCalibration,
    Normalization, TagCounts, Variant, WitnessEstimate,
};

/// Stream reserved for the dealer's test-round designation.
const DESIGNATION_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Basis(usize),
    Result(usize),
}

/// Announcement slots of one round, in order.
fn announcement_slots(n: usize, ordering: Ordering) -> Vec<Slot> {
    match ordering {
        Ordering::Naive => (0..n).map(Slot::Basis).chain((0..n).map(Slot::Result)).collect(),
        Ordering::Reversed => (0..n).map(Slot::Result).chain((0..n).rev().map(Slot::Basis)).collect(),
    }
}

/// Sequence number of the first event of a round.
pub fn round_base_seq(round: u64, n_parties: usize) -> u64 {
    round * 2 * n_parties as u64
}

/// Per-round generator: the run seed on a stream numbered by the round.
pub fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

fn draw_tag<R: Rng + ?Sized>(p_psi: f64, rng: &mut R) -> StateTag {
    if rng.random::<f64>() < p_psi {
        StateTag::PsiStandard
    } else {
        StateTag::PhiImaginary
    }
}

struct Context<'a> {
    config: &'a ProtocolConfig,
    phases: TagPhases,
    adversary: Option<&'a AdversaryModel>,
}

fn run_round(ctx: &Context<'_>, round: u64) -> Result<(RoundRecord, Vec<Event>)> {
    let cfg = ctx.config;
    let n = cfg.n_parties;
    let mut rng = round_rng(cfg.seed, round);

    let tag = draw_tag(cfg.p_psi, &mut rng);
    let bases: Vec<_> = (0..n).map(|_| AdversaryModel::draw_basis(cfg.q_z, &mut rng)).collect();

    let mut state = ghz_state_with_cap(n, ctx.phases.phase(tag), cfg.qubit_cap)?;
    if let Some(adv) = ctx.adversary {
        state = intercept_entangle(&state, &adv.layout().targets, cfg.qubit_cap)?;
    }
    let honest_count = if ctx.adversary.is_some() { n - 1 } else { n };
    let mut bits = vec![0u8; n];
    for p in 0..honest_count {
        let (outcome, next) = state.measure(p, bases[p], rng.random())?;
        bits[p] = outcome.bit();
        state = next;
    }

    let base = round_base_seq(round, n);
    let mut events = Vec::with_capacity(2 * n);
    let mut knowledge = None;
    for (i, slot) in announcement_slots(n, cfg.ordering).into_iter().enumerate() {
        let seq = base + i as u64;
        let content = match slot {
            Slot::Basis(p) => EventContent::Basis { basis: bases[p] },
            Slot::Result(p) => {
                if let (Some(adv), true) = (ctx.adversary, p == n - 1) {
                    let view = AdversaryView {
                        round,
                        events: events
                            .iter()
                            .map(|e: &Event| VisibleEvent {
                                seq: e.seq,
                                party: e.party,
                                info: match e.content {
                                    EventContent::Basis { basis } => Visible::Basis(basis),
                                    _ => Visible::SealedResult,
                                },
                            })
                            .collect(),
                    };
                    let resp = adv.respond(&view, &state, bases[p], seq, &mut rng)?;
                    bits[p] = resp.bit;
                    knowledge = resp.knowledge;
                }
                EventContent::Result { bit: bits[p] }
            }
        };
        let party = match slot {
            Slot::Basis(p) | Slot::Result(p) => p,
        };
        events.push(Event { seq, round, party, content });
    }

    let record = RoundRecord {
        round_id: round,
        state_tag: tag,
        true_bases: bases.clone(),
        true_outcomes: bits.clone(),
        announced_bases: bases,
        announced_outcomes: bits,
        usage: Usage::Pending,
        attacked: ctx.adversary.is_some(),
        adversary: knowledge,
    };
    Ok((record, events))
}

/// Phases fixed by calibrating both witness variants.
pub fn calibrated_phases(n_parties: usize, normalization: Normalization) -> Result<(TagPhases, Vec<PhaseCalibration>)> {
    let c1 = calibrate_phase_with(n_parties, Variant::I1, normalization)?;
    let c2 = calibrate_phase_with(n_parties, Variant::I2, normalization)?;
    Ok((TagPhases { psi: c1.chosen_phase, phi: c2.chosen_phase }, vec![c1, c2]))
}

/// Indices of the rounds the dealer designates for the witness test.
pub fn designate_test_rounds(config: &ProtocolConfig) -> Vec<bool> {
    let n = config.num_rounds as usize;
    let mut flags = vec![false; n];
    if !config.witness_check {
        return flags;
    }
    let count = ((config.test_fraction * n as f64).round() as usize).min(n);
    let mut rng = round_rng(config.seed, DESIGNATION_STREAM);
    for i in sample(&mut rng, n, count) {
        flags[i] = true;
    }
    flags
}

/// Exact witness values the attack produces, for the report.
pub fn attack_analysis(config: &ProtocolConfig, model: &AdversaryModel) -> Result<AttackAnalysis> {
    let n = config.n_parties;
    let total = model.layout().total_qubits();
    let i1 = build_witness_with(n, Variant::I1, config.witness_normalization)?;
    let i2 = build_witness_with(n, Variant::I2, config.witness_normalization)?;
    let mixture = Ensemble::mix(
        config.p_psi,
        model.attacked_state(StateTag::PsiStandard).clone(),
        model.attacked_state(StateTag::PhiImaginary).clone(),
    )?;
    let p = config.p_psi;
    let announced = |spec, tag| model.announced_witness(spec, tag, config.ordering);
    let i1_psi = announced(&i1, StateTag::PsiStandard)?;
    let i2_phi = announced(&i2, StateTag::PhiImaginary)?;
    Ok(AttackAnalysis {
        announced_i1_psi: i1_psi,
        announced_i2_phi: i2_phi,
        announced_i1_pooled: p * i1_psi + (1.0 - p) * announced(&i1, StateTag::PhiImaginary)?,
        announced_i2_pooled: p * announced(&i2, StateTag::PsiStandard)? + (1.0 - p) * i2_phi,
        mixture_i1: evaluate_exact(&i1.padded(total), &mixture)?,
        mixture_i2: evaluate_exact(&i2.padded(total), &mixture)?,
        claimed_i1: -0.5 - config.p_psi,
        claimed_i2: 0.5 - config.p_psi,
    })
}

fn estimate(
    config: &ProtocolConfig,
    records: &[RoundRecord],
    variant: Variant,
    tag: StateTag,
    errors: &mut Vec<String>,
) -> Result<Option<WitnessEstimate>> {
    let spec = build_witness_with(config.n_parties, variant, config.witness_normalization)?;
    let rounds = records.iter().filter(|r| r.usage == Usage::WitnessTest && r.state_tag == tag);
    match estimate_from_rounds(&spec, rounds) {
        Ok(e) => Ok(Some(e)),
        Err(QssError::InsufficientData { term }) => {
            errors.push(format!("{variant}: no {tag} test rounds matched term {term}"));
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

/// Execute the whole protocol for a configuration.
///
/// Rounds run in parallel; each round draws from its own generator, so the
/// transcript depends only on the configuration.
pub fn run_protocol(config: &ProtocolConfig) -> Result<Transcript> {
    config.validate()?;
    let n = config.n_parties;
    let (phases, phase_calibration) = calibrated_phases(n, config.witness_normalization)?;
    let model = AdversaryModel::from_config(config, phases)?;
    let ctx = Context { config, phases, adversary: model.as_ref() };

    let rounds = (0..config.num_rounds)
        .into_par_iter()
        .map(|r| run_round(&ctx, r))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::with_capacity(rounds.len());
    let mut events = Vec::with_capacity(rounds.len() * (2 * n + 1));
    for (rec, ev) in rounds {
        records.push(rec);
        events.extend(ev);
    }

    let test_flags = designate_test_rounds(config);
    let sift_summary = sift(&mut records, |r| test_flags[r as usize]);
    let reveal_base = round_base_seq(config.num_rounds, n);
    events.extend(records.iter().map(|r| Event {
        seq: reveal_base + r.round_id,
        round: r.round_id,
        party: 0,
        content: EventContent::Reveal { tag: r.state_tag, usage: r.usage },
    }));

    let mut estimate_errors = Vec::new();
    let mut tag_counts = TagCounts::default();
    for r in records.iter().filter(|r| r.usage == Usage::WitnessTest) {
        match r.state_tag {
            StateTag::PsiStandard => tag_counts.psi += 1,
            StateTag::PhiImaginary => tag_counts.phi += 1,
        }
    }
    let (i1, i2) = if config.witness_check {
        (
            estimate(config, &records, Variant::I1, StateTag::PsiStandard, &mut estimate_errors)?,
            estimate(config, &records, Variant::I2, StateTag::PhiImaginary, &mut estimate_errors)?,
        )
    } else {
        (None, None)
    };
    let decision = if !config.witness_check {
        Decision::Unchecked
    } else {
        match decide_secure(i1.as_ref(), i2.as_ref(), tag_counts, config.k_sigma) {
            Ok(d) => d,
            Err(QssError::InsufficientData { term }) => Decision::Inconclusive { reason: format!("missing {term}") },
            Err(e) => return Err(e),
        }
    };

    let oracle = ParityOracle::new(phases);
    let key: Vec<&RoundRecord> = records.iter().filter(|r| r.usage == Usage::Key).collect();
    let qber = compute_qber(key.iter().copied(), &oracle)?;
    let key_bits: String = key.iter().map(|r| if r.true_outcomes[0] == 0 { '0' } else { '1' }).collect();
    let adversary_accuracy = match (&config.attack, key.is_empty()) {
        (AttackMode::InterceptEntangle, false) => {
            let mut hits = 0usize;
            for r in &key {
                if infer_dealer_bit(r.round_id, r.adversary.as_ref())? == r.true_outcomes[0] {
                    hits += 1;
                }
            }
            Some(hits as f64 / key.len() as f64)
        }
        _ => None,
    };
    let attack_analysis = model.as_ref().map(|m| attack_analysis(config, m)).transpose()?;

    let report = SecurityReport {
        schema: REPORT_SCHEMA.to_string(),
        seed: config.seed,
        config: config.clone(),
        phase_calibration,
        i1,
        i2,
        estimate_errors,
        tag_counts,
        decision,
        qber,
        sift: sift_summary,
        key_length: key.len(),
        key_bits,
        adversary_accuracy,
        attack_analysis,
    };
    Ok(Transcript { events, records, report })
}
