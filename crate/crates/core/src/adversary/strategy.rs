use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::attack::{attacked_ghz, AttackLayout};
use crate::error::{QssError, Result};
use crate::protocol::{AdversaryPrior, AttackMode, Ordering, ProtocolConfig, StateTag, TagPhases};
use crate::quantum::{discriminating_basis, Basis, Gate, Outcome, Pauli, PauliString, PureState, QubitCap};
use crate::witness::WitnessSpec;

/// A public event as the adversary sees it: bases in clear, results sealed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visible {
    Basis(Basis),
    SealedResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VisibleEvent {
    pub seq: u64,
    pub party: usize,
    pub info: Visible,
}

/// Transcript prefix available to the adversary at its announcement turn.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdversaryView {
    pub round: u64,
    pub events: Vec<VisibleEvent>,
}

/// What the adversary learned in one round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdversaryKnowledge {
    /// Honest bases the discriminating measurement was built for.
    pub honest_bases: Vec<Basis>,
    /// True when the honest bases were not yet public and had to be guessed.
    pub bases_guessed: bool,
    /// Whether the conditional states were pairwise orthogonal.
    pub orthogonal: bool,
    pub measured_index: usize,
    /// Most likely honest outcomes, in party order.
    pub inferred_outcomes: Vec<u8>,
    /// Sequence numbers of the events the decision was computed from.
    pub consumed_events: Vec<u64>,
    pub announce_seq: u64,
}

/// The dealer's bit as inferred by the adversary from its own measurement.
pub fn infer_dealer_bit(round: u64, knowledge: Option<&AdversaryKnowledge>) -> Result<u8> {
    knowledge
        .and_then(|k| k.inferred_outcomes.first().copied())
        .ok_or(QssError::NoKnowledge { round })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub basis: Basis,
    pub bit: u8,
    pub knowledge: Option<AdversaryKnowledge>,
}

/// Measurement and response tables for one honest basis combination.
#[derive(Debug)]
pub struct Discriminator {
    pub basis: Vec<PureState>,
    pub orthogonal: bool,
    /// Most likely honest outcome combination for each measured index.
    inferred: Vec<Vec<u8>>,
    /// `[P(bit 0), P(bit 1)]` per own basis (X, Y, Z) and measured index.
    responses: [Vec<[f64; 2]>; 3],
}

impl Discriminator {
    pub fn inferred(&self, index: usize) -> &[u8] {
        &self.inferred[index]
    }

    pub fn response(&self, own: Basis, index: usize) -> [f64; 2] {
        self.responses[basis_slot(own)][index]
    }
}

fn basis_slot(b: Basis) -> usize {
    match b {
        Basis::X => 0,
        Basis::Y => 1,
        Basis::Z => 2,
    }
}

fn bits_of(combo: usize, width: usize) -> Vec<u8> {
    (0..width).map(|j| ((combo >> (width - 1 - j)) & 1) as u8).collect()
}

/// Probability of a full outcome vector when every party measures the GHZ
/// state with the given phase in the given bases.
pub fn ghz_outcome_probability(bases: &[Basis], bits: &[u8], phase: f64) -> f64 {
    let mut zeros = Complex64::new(1.0, 0.0);
    let mut ones = Complex64::new(1.0, 0.0);
    for (b, bit) in bases.iter().zip(bits) {
        let e = b.eigenvector(Outcome::from_bit(*bit));
        zeros *= e[0].conj();
        ones *= e[1].conj();
    }
    (zeros + Complex64::from_polar(1.0, phase) * ones).norm_sqr() / 2.0
}

/// Two-party marginal of a GHZ state with at least three parties.
fn ghz_pair_probability(a: (Basis, u8), b: (Basis, u8)) -> f64 {
    let ea = a.0.eigenvector(Outcome::from_bit(a.1));
    let eb = b.0.eigenvector(Outcome::from_bit(b.1));
    (ea[0].norm_sqr() * eb[0].norm_sqr() + ea[1].norm_sqr() * eb[1].norm_sqr()) / 2.0
}

/// Distribution of an honest last party's bit given the others' outcomes.
/// Outcome combinations the GHZ state never produces fall back to a sum of
/// pairwise likelihoods.
fn honest_predictive(honest_bases: &[Basis], honest_bits: &[u8], own: Basis, phase: f64) -> [f64; 2] {
    let mut bases = honest_bases.to_vec();
    bases.push(own);
    let mut w = [0.0; 2];
    for c in 0..2u8 {
        let mut bits = honest_bits.to_vec();
        bits.push(c);
        w[c as usize] = ghz_outcome_probability(&bases, &bits, phase);
    }
    if w[0] + w[1] < 1e-12 {
        for c in 0..2u8 {
            w[c as usize] = honest_bases
                .iter()
                .zip(honest_bits)
                .map(|(&b, &bit)| ghz_pair_probability((b, bit), (own, c)))
                .sum();
        }
    }
    let total = w[0] + w[1];
    [w[0] / total, w[1] / total]
}

fn ml_bit(w: [f64; 2]) -> [f64; 2] {
    if (w[0] - w[1]).abs() < 1e-12 {
        [0.5, 0.5]
    } else if w[0] > w[1] {
        [1.0, 0.0]
    } else {
        [0.0, 1.0]
    }
}

/// Orthonormalize in order, dropping (near-)dependent vectors.
fn gram_schmidt(vectors: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let proj: Complex64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                w.iter_mut().zip(b).for_each(|(y, x)| *y -= proj * x);
            }
        }
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            w.iter_mut().for_each(|x| *x /= norm);
            out.push(w);
        }
    }
    out
}

#[derive(Debug)]
enum Strategy {
    /// Discriminating measurement and crafted announcement.
    Discriminate,
    /// Honest single-qubit measurement after a cheat unitary.
    HonestAfterUnitary,
}

/// The dishonest last party: its layout, beliefs and cached measurements.
#[derive(Debug)]
pub struct AdversaryModel {
    layout: AttackLayout,
    strategy: Strategy,
    prior: AdversaryPrior,
    p_psi: f64,
    q_z: f64,
    phases: TagPhases,
    /// Register after the attack for each preparation (psi, phi).
    attacked: [PureState; 2],
    cache: RwLock<HashMap<Vec<Basis>, Arc<Discriminator>>>,
}

fn tag_slot(tag: StateTag) -> usize {
    match tag {
        StateTag::PsiStandard => 0,
        StateTag::PhiImaginary => 1,
    }
}

impl AdversaryModel {
    /// `None` when the configuration has no attack.
    pub fn from_config(config: &ProtocolConfig, phases: TagPhases) -> Result<Option<Self>> {
        let strategy = match &config.attack {
            AttackMode::None => return Ok(None),
            AttackMode::InterceptEntangle => (Strategy::Discriminate, None),
            AttackMode::ParamUnitary(p) => (Strategy::HonestAfterUnitary, Some(p.gate()?)),
        };
        Self::new(
            config.n_parties,
            strategy.0,
            strategy.1,
            config.adversary_prior,
            config.p_psi,
            config.q_z,
            phases,
            config.qubit_cap,
        )
        .map(Some)
    }

    #[allow(clippy::too_many_arguments)]
    fn new(
        n_parties: usize,
        strategy: Strategy,
        cheat: Option<Gate>,
        prior: AdversaryPrior,
        p_psi: f64,
        q_z: f64,
        phases: TagPhases,
        cap: QubitCap,
    ) -> Result<Self> {
        let layout = AttackLayout::new(n_parties)?;
        let prepare = |phase: f64| -> Result<PureState> {
            let s = attacked_ghz(&layout, phase, cap)?;
            match &cheat {
                Some(g) => s.apply_gate(g, &[layout.adversary, layout.ancillas[0]]),
                None => Ok(s),
            }
        };
        let attacked = [prepare(phases.psi)?, prepare(phases.phi)?];
        Ok(Self { layout, strategy, prior, p_psi, q_z, phases, attacked, cache: RwLock::new(HashMap::new()) })
    }

    /// Intercept-entangle adversary with the given prior.
    pub fn intercept(n_parties: usize, prior: AdversaryPrior, p_psi: f64, q_z: f64, phases: TagPhases, cap: QubitCap) -> Result<Self> {
        Self::new(n_parties, Strategy::Discriminate, None, prior, p_psi, q_z, phases, cap)
    }

    pub fn layout(&self) -> &AttackLayout {
        &self.layout
    }

    /// The register after the attack for a given preparation.
    pub fn attacked_state(&self, tag: StateTag) -> &PureState {
        &self.attacked[tag_slot(tag)]
    }

    fn basis_weight(&self, b: Basis) -> f64 {
        match b {
            Basis::Z => self.q_z,
            Basis::X | Basis::Y => (1.0 - self.q_z) / 2.0,
        }
    }

    /// Draw a basis with the honest parties' distribution.
    pub fn draw_basis<R: Rng + ?Sized>(q_z: f64, rng: &mut R) -> Basis {
        let u: f64 = rng.random();
        if u < q_z {
            Basis::Z
        } else if u < q_z + (1.0 - q_z) / 2.0 {
            Basis::X
        } else {
            Basis::Y
        }
    }

    /// Conditional (unnormalized) states of the held qubits for every honest
    /// outcome combination, in combination order.
    pub fn conditional_states(&self, tag: StateTag, honest_bases: &[Basis]) -> Result<Vec<Vec<Complex64>>> {
        let honest = self.layout.honest();
        if honest_bases.len() != honest.len() {
            return Err(QssError::Argument(format!(
                "{} honest bases given, {} honest parties",
                honest_bases.len(),
                honest.len()
            )));
        }
        let h = honest.len();
        (0..1usize << h)
            .map(|combo| {
                let vectors: Vec<[Complex64; 2]> = bits_of(combo, h)
                    .iter()
                    .zip(honest_bases)
                    .map(|(&bit, b)| b.eigenvector(Outcome::from_bit(bit)))
                    .collect();
                Ok(self.attacked_state(tag).condition_on(&honest, &vectors)?.1)
            })
            .collect()
    }

    /// Discriminating measurement for a set of honest bases (memoized).
    pub fn discriminator(&self, honest_bases: &[Basis]) -> Result<Arc<Discriminator>> {
        if let Some(d) = self.cache.read().expect("discriminator cache poisoned").get(honest_bases) {
            return Ok(Arc::clone(d));
        }
        let d = Arc::new(self.build_discriminator(honest_bases)?);
        self.cache
            .write()
            .expect("discriminator cache poisoned")
            .insert(honest_bases.to_vec(), Arc::clone(&d));
        Ok(d)
    }

    fn build_discriminator(&self, honest_bases: &[Basis]) -> Result<Discriminator> {
        let h = honest_bases.len();
        let held_n = self.layout.held().len();
        let conds = [
            self.conditional_states(StateTag::PsiStandard, honest_bases)?,
            self.conditional_states(StateTag::PhiImaginary, honest_bases)?,
        ];

        // Measurement basis from the psi-conditional states.
        let psi_states: Vec<PureState> = conds[0]
            .iter()
            .filter(|v| v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-12)
            .map(|v| PureState::from_unnormalized(held_n, v.clone()))
            .collect::<Result<_>>()?;
        let (basis, orthogonal) = match discriminating_basis(&psi_states) {
            Ok(b) => (b, true),
            Err(QssError::DiscriminationImpossible { .. }) => {
                let ortho = gram_schmidt(&psi_states.iter().map(|s| s.amplitudes().to_vec()).collect::<Vec<_>>());
                let states = ortho
                    .into_iter()
                    .map(|v| PureState::new(held_n, v))
                    .collect::<Result<Vec<_>>>()?;
                (discriminating_basis(&states)?, false)
            }
            Err(e) => return Err(e),
        };
        debug_assert!(orthogonal || psi_states.len() > 1);

        // P(tag, honest outcomes, index) up to the prior.
        let prior = match self.prior {
            AdversaryPrior::AssumePsi => [1.0, 0.0],
            AdversaryPrior::Bayesian => [self.p_psi, 1.0 - self.p_psi],
        };
        let combos = 1usize << h;
        let mut inferred = Vec::with_capacity(basis.len());
        let mut responses: [Vec<[f64; 2]>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        for b in &basis {
            let bk = b.amplitudes();
            let mut posterior = vec![[0.0; 2]; combos];
            for (t, cond) in conds.iter().enumerate() {
                for (o, v) in cond.iter().enumerate() {
                    let amp: Complex64 = bk.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                    posterior[o][t] = prior[t] * amp.norm_sqr();
                }
            }
            let best = (0..combos)
                .max_by(|&a, &b| {
                    let pa = posterior[a][0] + posterior[a][1];
                    let pb = posterior[b][0] + posterior[b][1];
                    pa.total_cmp(&pb).then(b.cmp(&a))
                })
                .expect("at least one outcome combination");
            inferred.push(bits_of(best, h));

            for own in Basis::ALL {
                let mut w = [0.0; 2];
                for (o, post) in posterior.iter().enumerate() {
                    let bits = bits_of(o, h);
                    for (t, phase) in [self.phases.psi, self.phases.phi].into_iter().enumerate() {
                        if post[t] == 0.0 {
                            continue;
                        }
                        let pred = honest_predictive(honest_bases, &bits, own, phase);
                        w[0] += post[t] * pred[0];
                        w[1] += post[t] * pred[1];
                    }
                }
                responses[basis_slot(own)].push(ml_bit(w));
            }
        }
        Ok(Discriminator { basis, orthogonal, inferred, responses })
    }

    /// The adversary's announcement at its result turn.
    ///
    /// `state` is the round's register after the honest parties measured.
    /// Honest bases are read from `view`; any that are not yet public are
    /// guessed from the honest basis distribution.
    pub fn respond<R: Rng + ?Sized>(
        &self,
        view: &AdversaryView,
        state: &PureState,
        own_basis: Basis,
        announce_seq: u64,
        rng: &mut R,
    ) -> Result<Response> {
        if let Some(e) = view.events.iter().find(|e| e.seq >= announce_seq) {
            return Err(QssError::Internal(format!(
                "adversary view contains event {} at or after its own turn {announce_seq}",
                e.seq
            )));
        }
        match self.strategy {
            Strategy::HonestAfterUnitary => {
                let (outcome, _) = state.measure(self.layout.adversary, own_basis, rng.random())?;
                Ok(Response { basis: own_basis, bit: outcome.bit(), knowledge: None })
            }
            Strategy::Discriminate => {
                let mut consumed = Vec::new();
                let mut guessed = false;
                let honest_bases: Vec<Basis> = self
                    .layout
                    .honest()
                    .into_iter()
                    .map(|p| {
                        let seen = view.events.iter().find_map(|e| match e.info {
                            Visible::Basis(b) if e.party == p => Some((e.seq, b)),
                            _ => None,
                        });
                        match seen {
                            Some((seq, b)) => {
                                consumed.push(seq);
                                b
                            }
                            None => {
                                guessed = true;
                                Self::draw_basis(self.q_z, rng)
                            }
                        }
                    })
                    .collect();
                let disc = self.discriminator(&honest_bases)?;
                let (k, _) = state.measure_subsystem(&self.layout.held(), &disc.basis, rng.random())?;
                let dist = disc.response(own_basis, k);
                let bit = if rng.random::<f64>() < dist[0] { 0 } else { 1 };
                Ok(Response {
                    basis: own_basis,
                    bit,
                    knowledge: Some(AdversaryKnowledge {
                        honest_bases,
                        bases_guessed: guessed,
                        orthogonal: disc.orthogonal,
                        measured_index: k,
                        inferred_outcomes: disc.inferred(k).to_vec(),
                        consumed_events: consumed,
                        announce_seq,
                    }),
                })
            }
        }
    }

    /// Exact distribution of all parties' announced bits for a preparation,
    /// honest bases and the adversary's own basis.
    ///
    /// Under [`Ordering::Reversed`] the adversary announces its result before
    /// any basis is public, so the distribution averages over its guesses.
    pub fn announced_distribution(
        &self,
        tag: StateTag,
        honest_bases: &[Basis],
        own_basis: Basis,
        ordering: Ordering,
    ) -> Result<Vec<(Vec<u8>, f64)>> {
        let h = honest_bases.len();
        let combos = 1usize << h;
        let mut dist: HashMap<Vec<u8>, f64> = HashMap::new();
        match self.strategy {
            Strategy::HonestAfterUnitary => {
                let mut all = honest_bases.to_vec();
                all.push(own_basis);
                let qubits: Vec<usize> = (0..self.layout.n_parties).collect();
                for combo in 0..(combos << 1) {
                    let bits = bits_of(combo, h + 1);
                    let vectors: Vec<[Complex64; 2]> = bits
                        .iter()
                        .zip(&all)
                        .map(|(&bit, b)| b.eigenvector(Outcome::from_bit(bit)))
                        .collect();
                    let (p, _) = self.attacked_state(tag).condition_on(&qubits, &vectors)?;
                    dist.insert(bits, p);
                }
            }
            Strategy::Discriminate => {
                let conds = self.conditional_states(tag, honest_bases)?;
                let guesses: Vec<(Vec<Basis>, f64)> = match ordering {
                    Ordering::Naive => vec![(honest_bases.to_vec(), 1.0)],
                    Ordering::Reversed => (0..3usize.pow(h as u32))
                        .map(|mut g| {
                            let mut bases = vec![Basis::X; h];
                            for slot in bases.iter_mut().rev() {
                                *slot = Basis::ALL[g % 3];
                                g /= 3;
                            }
                            let w = bases.iter().map(|&b| self.basis_weight(b)).product();
                            (bases, w)
                        })
                        .filter(|(_, w)| *w > 0.0)
                        .collect(),
                };
                for (guess, weight) in guesses {
                    let disc = self.discriminator(&guess)?;
                    for (o, v) in conds.iter().enumerate() {
                        for (k, bk) in disc.basis.iter().enumerate() {
                            let amp: Complex64 = bk.amplitudes().iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                            let p = weight * amp.norm_sqr();
                            if p == 0.0 {
                                continue;
                            }
                            let resp = disc.response(own_basis, k);
                            for c in 0..2u8 {
                                if resp[c as usize] == 0.0 {
                                    continue;
                                }
                                let mut bits = bits_of(o, h);
                                bits.push(c);
                                *dist.entry(bits).or_insert(0.0) += p * resp[c as usize];
                            }
                        }
                    }
                }
            }
        }
        let mut out: Vec<(Vec<u8>, f64)> = dist.into_iter().collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Exact expectation of an announced correlator on rounds with the given
    /// preparation. Identity letters average over the basis distribution.
    pub fn announced_correlator(&self, tag: StateTag, string: &PauliString, ordering: Ordering) -> Result<f64> {
        let n = self.layout.n_parties;
        if string.len() != n {
            return Err(QssError::Argument(format!("correlator '{string}' is not over {n} parties")));
        }
        let options: Vec<Vec<(Basis, f64)>> = string
            .letters()
            .iter()
            .map(|p| match p.basis() {
                Some(b) => vec![(b, 1.0)],
                None => Basis::ALL
                    .iter()
                    .map(|&b| (b, self.basis_weight(b)))
                    .filter(|(_, w)| *w > 0.0)
                    .collect(),
            })
            .collect();
        let mut total = 0.0;
        let mut stack = vec![(Vec::with_capacity(n), 1.0)];
        while let Some((prefix, w)) = stack.pop() {
            if prefix.len() == n {
                let (honest, own) = prefix.split_at(n - 1);
                for (bits, p) in self.announced_distribution(tag, honest, own[0], ordering)? {
                    let sign: i32 = string
                        .letters()
                        .iter()
                        .zip(&bits)
                        .filter(|(l, _)| **l != Pauli::I)
                        .map(|(_, &b)| if b == 0 { 1 } else { -1 })
                        .product();
                    total += w * p * sign as f64;
                }
                continue;
            }
            for &(b, bw) in &options[prefix.len()] {
                let mut next = prefix.clone();
                next.push(b);
                stack.push((next, w * bw));
            }
        }
        Ok(total)
    }

    /// Exact witness value on the announced statistics of one preparation.
    pub fn announced_witness(&self, spec: &WitnessSpec, tag: StateTag, ordering: Ordering) -> Result<f64> {
        spec.terms().iter().try_fold(0.0, |acc, t| {
            let c = *t.coefficient.numer() as f64 / *t.coefficient.denom() as f64;
            let v = if t.string.is_identity() { 1.0 } else { self.announced_correlator(tag, &t.string, ordering)? };
            Ok(acc + c * v)
        })
    }
}
