use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::attack::{attacked_ghz, AttackLayout};
use super::unitary::CheatUnitaryParams;
use crate::error::{QssError, Result};
use crate::protocol::TagPhases;
use crate::quantum::{Ensemble, PureState, QubitCap};
use crate::witness::{build_witness_with, evaluate_exact, Normalization, Variant, WitnessSpec};

const REFINE_STEPS: [f64; 5] = [0.1, 0.03, 0.01, 0.003, 0.001];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub params: CheatUnitaryParams,
    pub i1: f64,
    pub i2: f64,
}

impl SweepPoint {
    pub fn min_value(&self) -> f64 {
        self.i1.min(self.i2)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n_parties: usize,
    pub samples: usize,
    pub p_psi: f64,
    pub seed: u64,
    /// Coordinate search around the best random point.
    pub refine: bool,
    #[serde(default)]
    pub normalization: Normalization,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { n_parties: 3, samples: 10_000, p_psi: 0.5, seed: 0, refine: true, normalization: Normalization::Published }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub identity: SweepPoint,
    pub points: Vec<SweepPoint>,
    /// Result of the coordinate search, if it ran.
    pub refined: Option<SweepPoint>,
}

impl SweepResult {
    /// Largest `min(I1, I2)` among sampled and refined points.
    pub fn best(&self) -> &SweepPoint {
        self.points
            .iter()
            .chain(self.refined.as_ref())
            .chain(std::iter::once(&self.identity))
            .max_by(|a, b| a.min_value().total_cmp(&b.min_value()))
            .expect("identity point always present")
    }

    /// Points whose I1 beats the identity's.
    pub fn i1_improvements(&self) -> impl Iterator<Item = &SweepPoint> {
        let base = self.identity.i1;
        self.points.iter().filter(move |p| p.i1 > base + 1e-12)
    }

    /// Tab-separated table: 16 parameters, I1, I2. One header line.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let names: Vec<String> = (0..16).map(|i| format!("l{}{}", i / 4, i % 4)).collect();
        out.push_str(&names.join("\t"));
        out.push_str("\ti1\ti2\n");
        for p in std::iter::once(&self.identity).chain(&self.points).chain(self.refined.as_ref()) {
            for v in p.params.flat() {
                out.push_str(&format!("{v:.12}\t"));
            }
            out.push_str(&format!("{:.12e}\t{:.12e}\n", p.i1, p.i2));
        }
        out
    }
}

/// Exact witnesses on the parties' reduced state of the attacked mixture
/// after a cheat unitary on the adversary's qubit and first ancilla.
#[derive(Debug)]
pub struct CheatEvaluator {
    layout: AttackLayout,
    p_psi: f64,
    states: [PureState; 2],
    specs: [WitnessSpec; 2],
}

impl CheatEvaluator {
    pub fn new(n_parties: usize, p_psi: f64, phases: TagPhases, normalization: Normalization, cap: QubitCap) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_psi) {
            return Err(QssError::Argument(format!("p_psi must lie in [0, 1], got {p_psi}")));
        }
        let layout = AttackLayout::new(n_parties)?;
        let total = layout.total_qubits();
        let states = [attacked_ghz(&layout, phases.psi, cap)?, attacked_ghz(&layout, phases.phi, cap)?];
        let specs = [
            build_witness_with(n_parties, Variant::I1, normalization)?.padded(total),
            build_witness_with(n_parties, Variant::I2, normalization)?.padded(total),
        ];
        Ok(Self { layout, p_psi, states, specs })
    }

    pub fn evaluate(&self, params: &CheatUnitaryParams) -> Result<SweepPoint> {
        let gate = params.gate()?;
        let targets = [self.layout.adversary, self.layout.ancillas[0]];
        let mixture = Ensemble::mix(
            self.p_psi,
            self.states[0].apply_gate(&gate, &targets)?,
            self.states[1].apply_gate(&gate, &targets)?,
        )?;
        Ok(SweepPoint {
            params: *params,
            i1: evaluate_exact(&self.specs[0], &mixture)?,
            i2: evaluate_exact(&self.specs[1], &mixture)?,
        })
    }
}

fn wrap(m: usize, n: usize, v: f64) -> f64 {
    if m < n {
        v.clamp(0.0, std::f64::consts::FRAC_PI_2)
    } else {
        v.rem_euclid(std::f64::consts::TAU)
    }
}

fn refine(eval: &CheatEvaluator, start: &SweepPoint) -> Result<SweepPoint> {
    let mut best = start.clone();
    for step in REFINE_STEPS {
        let mut improved = true;
        while improved {
            improved = false;
            for idx in 0..16 {
                for dir in [-1.0, 1.0] {
                    let mut p = best.params;
                    let (m, n) = (idx / 4, idx % 4);
                    p.lambda[m][n] = wrap(m, n, p.lambda[m][n] + dir * step);
                    let cand = eval.evaluate(&p)?;
                    if cand.min_value() > best.min_value() + 1e-15 {
                        best = cand;
                        improved = true;
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Random search over cheat unitaries. Point `i` is drawn from a generator
/// seeded with `seed` on stream `i`, so results do not depend on threading.
pub fn cheat_tradeoff_sweep(config: &SweepConfig, phases: TagPhases, cap: QubitCap) -> Result<SweepResult> {
    let eval = CheatEvaluator::new(config.n_parties, config.p_psi, phases, config.normalization, cap)?;
    let identity = eval.evaluate(&CheatUnitaryParams::identity())?;
    let points = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(i as u64);
            eval.evaluate(&CheatUnitaryParams::random(&mut rng))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut result = SweepResult { config: config.clone(), identity, points, refined: None };
    if config.refine {
        let start = result.best().clone();
        result.refined = Some(refine(&eval, &start)?);
    }
    Ok(result)
}
