mod common;

use common::TRUTH_TABLE;
use num_complex::Complex64;
use qss_core::protocol::truth_table;

const LABELS: [&str; 4] = ["x+", "x-", "y+", "y-"];

/// Components of an eigenstate on |0>, |1>.
fn ket(label: &str) -> [Complex64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let one = match label {
        "x+" => Complex64::new(s, 0.0),
        "x-" => Complex64::new(-s, 0.0),
        "y+" => Complex64::new(0.0, s),
        "y-" => Complex64::new(0.0, -s),
        _ => unreachable!(),
    };
    [Complex64::new(s, 0.0), one]
}

/// Charlie's state after projecting (|000> + |111>)/sqrt2 onto <a|<b|.
fn oracle(alice: &str, bob: &str) -> &'static str {
    let (a, b) = (ket(alice), ket(bob));
    let c = [a[0].conj() * b[0].conj(), a[1].conj() * b[1].conj()];
    let norm = (c[0].norm_sqr() + c[1].norm_sqr()).sqrt();
    LABELS
        .into_iter()
        .find(|l| {
            let k = ket(l);
            let overlap = (k[0].conj() * c[0] + k[1].conj() * c[1]).norm() / norm;
            (overlap - 1.0).abs() < 1e-12
        })
        .unwrap()
}

#[test]
fn collapse_matches_direct_projection() {
    let t = truth_table().unwrap();
    for (i, e) in t.iter().enumerate() {
        let (bob, alice) = (LABELS[i / 4], LABELS[i % 4]);
        assert_eq!(e.alice.label(), alice);
        assert_eq!(e.bob.label(), bob);
        assert_eq!(e.charlie.label(), oracle(alice, bob), "A={alice} B={bob}");
    }
}

#[test]
fn table_is_symmetric_in_alice_and_bob() {
    for a in LABELS {
        for b in LABELS {
            assert_eq!(oracle(a, b), oracle(b, a));
        }
    }
}

#[test]
fn published_table_differs_only_in_mixed_block() {
    let mut differing = Vec::new();
    for (r, bob) in LABELS.iter().enumerate() {
        for (c, alice) in LABELS.iter().enumerate() {
            if TRUTH_TABLE[r][c] != oracle(alice, bob) {
                differing.push((*alice, *bob));
            }
        }
    }
    assert_eq!(differing, vec![("y+", "x+"), ("y-", "x+"), ("y+", "x-"), ("y-", "x-")]);
    // The printed table is not symmetric, so it cannot describe a symmetric state.
    assert_ne!(TRUTH_TABLE[0][2], TRUTH_TABLE[2][0]);
}
