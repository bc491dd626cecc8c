//! The dishonest last party: intercept-entangle attack, delayed
//! discrimination, crafted announcements and the cheat-unitary sweep.

mod attack;
mod strategy;
mod sweep;
mod unitary;

pub use attack::{attacked_ghz, attacked_mixture, intercept_entangle, AttackLayout};
pub use strategy::{
    ghz_outcome_probability, infer_dealer_bit, AdversaryKnowledge, AdversaryModel, AdversaryView, Discriminator, Response,
    Visible, VisibleEvent,
};
pub use sweep::{cheat_tradeoff_sweep, CheatEvaluator, SweepConfig, SweepPoint, SweepResult};
pub use unitary::CheatUnitaryParams;
