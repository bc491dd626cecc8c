//! Independent reference implementations used by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use num_rational::Rational64;
use qss_core::quantum::{Ensemble, PureState};
use rand::Rng;

pub type C = Complex64;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn pauli_matrix(letter: char) -> [[C; 2]; 2] {
    match letter {
        '1' => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        'x' => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        'y' => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        'z' => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        other => panic!("bad letter {other}"),
    }
}

/// Dense Kronecker product of the letters, first letter most significant.
pub fn dense_pauli(s: &str) -> Vec<Vec<C>> {
    let mut m = vec![vec![c(1.0, 0.0)]];
    for letter in s.chars() {
        let p = pauli_matrix(letter);
        let d = m.len();
        let mut next = vec![vec![c(0.0, 0.0); 2 * d]; 2 * d];
        for i in 0..d {
            for j in 0..d {
                for a in 0..2 {
                    for b in 0..2 {
                        next[2 * i + a][2 * j + b] = m[i][j] * p[a][b];
                    }
                }
            }
        }
        m = next;
    }
    m
}

pub fn dense_expectation(amps: &[C], s: &str) -> f64 {
    let m = dense_pauli(s);
    let mut total = c(0.0, 0.0);
    for (i, row) in m.iter().enumerate() {
        let mv: C = row.iter().zip(amps).map(|(a, b)| a * b).sum();
        total += amps[i].conj() * mv;
    }
    total.re
}

pub fn all_strings(n: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| ['1', 'x', 'y', 'z'].into_iter().map(move |l| format!("{p}{l}")))
            .collect();
    }
    out
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Haar-random amplitudes on `n` qubits.
pub fn random_amps<R: Rng>(n: usize, rng: &mut R) -> Vec<C> {
    let v: Vec<C> = (0..1usize << n).map(|_| c(gaussian(rng), gaussian(rng))).collect();
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|a| a / norm).collect()
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> PureState {
    PureState::new(n, random_amps(n, rng)).unwrap()
}

/// A pure state of the form (pair on `pair`) ⊗ (single on `single`).
pub fn cut_product(pair: (usize, usize), single: usize, two: &[C], one: &[C]) -> PureState {
    let mut amps = vec![c(0.0, 0.0); 8];
    for (idx, a) in amps.iter_mut().enumerate() {
        let bit = |q: usize| (idx >> (2 - q)) & 1;
        *a = two[2 * bit(pair.0) + bit(pair.1)] * one[bit(single)];
    }
    PureState::new(3, amps).unwrap()
}

/// Random mixture of states separable across one of the three cuts.
pub fn random_biseparable<R: Rng>(rng: &mut R) -> Ensemble {
    let cuts = [((0, 1), 2), ((1, 2), 0), ((0, 2), 1)];
    let k = rng.random_range(1..=6);
    let raw: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let members = raw
        .iter()
        .map(|w| {
            let (pair, single) = cuts[rng.random_range(0..3)];
            (w / total, cut_product(pair, single, &random_amps(2, rng), &random_amps(1, rng)))
        })
        .collect();
    Ensemble::new(members).unwrap()
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn fixture(xy: &[(i64, &str)], identity: i64, z: &[&str]) -> Vec<(Rational64, String)> {
    let n = xy[0].1.len();
    let mut out: Vec<(Rational64, String)> = xy.iter().map(|(s, t)| (r(*s, 8), t.to_string())).collect();
    out.push((r(-identity, 16), "1".repeat(n)));
    out.extend(z.iter().map(|t| (r(1, 16), t.to_string())));
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

const Z3: [&str; 3] = ["zz1", "z1z", "1zz"];
const Z4: [&str; 7] = ["zz11", "z11z", "11zz", "z1z1", "1z1z", "1zz1", "zzzz"];

/// Three-party witnesses as printed in the source.
pub fn three_party(variant: &str) -> Vec<(Rational64, String)> {
    match variant {
        "I1" => fixture(&[(1, "xxx"), (-1, "yyx"), (-1, "yxy"), (-1, "xyy")], 3, &Z3),
        _ => fixture(&[(1, "yyy"), (-1, "xxy"), (-1, "xyx"), (-1, "yxx")], 3, &Z3),
    }
}

/// Four-party witnesses as printed in the source.
pub fn four_party(variant: &str) -> Vec<(Rational64, String)> {
    match variant {
        "I1" => fixture(
            &[
                (1, "xxxx"),
                (-1, "yyxx"),
                (-1, "yxyx"),
                (-1, "xyyx"),
                (-1, "xxyy"),
                (-1, "xyxy"),
                (-1, "yxxy"),
                (1, "yyyy"),
            ],
            7,
            &Z4,
        ),
        _ => fixture(
            &[
                (1, "xxxy"),
                (1, "xxyx"),
                (1, "xyxx"),
                (1, "yxxx"),
                (-1, "xyyy"),
                (-1, "yxyy"),
                (-1, "yyxy"),
                (-1, "yyyx"),
            ],
            7,
            &Z4,
        ),
    }
}

/// Table of Charlie's state: rows are Bob's outcome, columns Alice's,
/// both in the order x+, x-, y+, y-.
pub const TRUTH_TABLE: [[&str; 4]; 4] = [
    ["x+", "x-", "y+", "y-"],
    ["x-", "x+", "y-", "y+"],
    ["y-", "y+", "x-", "x+"],
    ["y+", "y-", "x+", "x-"],
];

/// Exact witness value from a fixture and the dense oracle.
pub fn dense_witness(terms: &[(Rational64, String)], amps: &[C]) -> f64 {
    terms
        .iter()
        .map(|(k, s)| (*k.numer() as f64 / *k.denom() as f64) * dense_expectation(amps, s))
        .sum()
}

/// Witness spec terms as `(coefficient, string)` sorted by string.
pub fn spec_terms(spec: &qss_core::witness::WitnessSpec) -> Vec<(Rational64, String)> {
    let mut out: Vec<(Rational64, String)> = spec.terms().iter().map(|t| (t.coefficient, t.string.to_string())).collect();
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}
