use proptest::prelude::*;
use qss_core::protocol::*;
use qss_core::quantum::Basis;
use qss_core::witness::Decision;

fn cfg(rounds: u64, seed: u64) -> ProtocolConfig {
    ProtocolConfig { num_rounds: rounds, seed, ..Default::default() }
}

fn key_fraction_band(t: &Transcript, q_z: f64, n: i32) -> (f64, f64) {
    let eligible = (t.report.sift.key_rounds + t.report.sift.discarded_rounds) as f64;
    let p = (1.0 - q_z).powi(n) / 2.0;
    (p, 4.0 * (p * (1.0 - p) / eligible).sqrt())
}

#[test]
fn honest_run_accepts_with_zero_qber() {
    let t = run_protocol(&cfg(100_000, 42)).unwrap();
    assert_eq!(t.report.decision, Decision::Accept);
    assert_eq!(t.report.qber, Some(0.0));
    let (p, band) = key_fraction_band(&t, 0.2, 3);
    assert!((t.report.sift.sift_rate - p).abs() <= band);
    assert_eq!(t.report.key_bits.len(), t.report.key_length);
}

#[test]
fn honest_key_rounds_satisfy_parity() {
    let t = run_protocol(&cfg(20_000, 8)).unwrap();
    let oracle = ParityOracle::new(TagPhases {
        psi: t.report.phase_calibration[0].chosen_phase,
        phi: t.report.phase_calibration[1].chosen_phase,
    });
    for r in t.records.iter().filter(|r| r.usage == Usage::Key) {
        let xor = r.announced_outcomes.iter().fold(0, |a, b| a ^ b);
        assert_eq!(xor, oracle.parity_bit(&r.announced_bases, r.state_tag).unwrap());
        assert_eq!(r.announced_outcomes, r.true_outcomes);
    }
}

#[test]
fn without_z_half_the_rounds_are_key() {
    let c = ProtocolConfig { q_z: 0.0, witness_check: false, ..cfg(40_000, 1) };
    let t = run_protocol(&c).unwrap();
    let (p, band) = key_fraction_band(&t, 0.0, 3);
    assert!((p - 0.5).abs() < 1e-15);
    assert!((t.report.sift.sift_rate - p).abs() <= band * 3.0 / 4.0);
}

#[test]
fn all_z_or_all_test_gives_no_key() {
    let t = run_protocol(&ProtocolConfig { q_z: 1.0, ..cfg(2_000, 2) }).unwrap();
    assert_eq!(t.report.key_length, 0);
    assert_eq!(t.report.qber, None);
    let t = run_protocol(&ProtocolConfig { test_fraction: 1.0, ..cfg(2_000, 2) }).unwrap();
    assert_eq!(t.report.key_length, 0);
    assert_eq!(t.report.sift.test_rounds, 2_000);
}

#[test]
fn zero_rounds_rejected() {
    assert!(run_protocol(&cfg(0, 0)).is_err());
}

#[test]
fn random_adversary_bits_give_half_qber() {
    let mut t = run_protocol(&ProtocolConfig { witness_check: false, ..cfg(40_000, 5) }).unwrap();
    let oracle = ParityOracle::new(TagPhases {
        psi: t.report.phase_calibration[0].chosen_phase,
        phi: t.report.phase_calibration[1].chosen_phase,
    });
    let mut state = 0x9e37_79b9_7f4a_7c15u64;
    for r in t.records.iter_mut() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        r.announced_outcomes[2] = (state & 1) as u8;
    }
    let key: Vec<_> = t.records.iter().filter(|r| r.usage == Usage::Key).collect();
    let q = compute_qber(key.iter().copied(), &oracle).unwrap().unwrap();
    assert!((q - 0.5).abs() < 4.0 * (0.25 / key.len() as f64).sqrt());
}

fn check_ordering(t: &Transcript, n: usize, ordering: Ordering) {
    for (r, events) in t.events.chunks(2 * n).take(t.records.len()).enumerate() {
        let base = round_base_seq(r as u64, n);
        for (i, e) in events.iter().enumerate() {
            assert_eq!(e.seq, base + i as u64);
            let (is_basis, party) = match ordering {
                Ordering::Naive => (i < n, i % n),
                Ordering::Reversed => (i >= n, if i < n { i } else { 2 * n - 1 - i }),
            };
            assert_eq!(e.party, party);
            assert_eq!(matches!(e.content, EventContent::Basis { .. }), is_basis);
        }
    }
    let reveals = &t.events[2 * n * t.records.len()..];
    assert!(reveals.iter().all(|e| matches!(e.content, EventContent::Reveal { .. })));
}

#[test]
fn event_order_follows_policy() {
    for ordering in [Ordering::Naive, Ordering::Reversed] {
        for attack in [AttackMode::None, AttackMode::InterceptEntangle] {
            let n = 4;
            let c = ProtocolConfig { n_parties: n, ordering, attack, ..cfg(300, 3) };
            check_ordering(&run_protocol(&c).unwrap(), n, ordering);
        }
    }
}

#[test]
fn transcripts_are_byte_identical() {
    let c = ProtocolConfig { attack: AttackMode::InterceptEntangle, ..cfg(5_000, 77) };
    let bytes = |c: &ProtocolConfig| {
        let mut buf = Vec::new();
        write_transcript_jsonl(&run_protocol(c).unwrap(), &mut buf).unwrap();
        buf
    };
    let a = bytes(&c);
    let b = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(|| bytes(&c));
    assert_eq!(a, b);
    assert_ne!(a, bytes(&ProtocolConfig { seed: 78, ..c.clone() }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn honest_runs_never_err(seed in any::<u64>(), n in 3usize..6, q_z in 0.0f64..1.0, p in 0.0f64..1.0) {
        let c = ProtocolConfig { n_parties: n, q_z, p_psi: p, ..cfg(400, seed) };
        let t = run_protocol(&c).unwrap();
        prop_assert!(t.report.qber.is_none_or(|q| q == 0.0));
        for r in &t.records {
            prop_assert!(r.usage != Usage::Pending);
            if r.usage == Usage::Key {
                prop_assert!(r.announced_bases.iter().all(|b| *b != Basis::Z));
            }
        }
    }
}
