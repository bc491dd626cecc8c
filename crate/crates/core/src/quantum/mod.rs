//! Exact pure-state simulation of small qubit registers.
//!
//! States are immutable values; every operation returns a new state and all
//! randomness is supplied by the caller as a uniform number in `[0, 1)`.

mod basis;
mod discriminate;
mod ensemble;
mod gate;
mod pauli;
mod state;

pub use basis::{bases_to_string, Basis, Outcome};
pub use discriminate::{discriminating_basis, ORTHOGONALITY_TOL};
pub use ensemble::{expectation, Ensemble};
pub use gate::{unitarity_deviation, Gate, UNITARY_TOL};
pub use pauli::{Pauli, PauliString};
pub use state::{ghz_state, ghz_state_with_cap, PureState, QubitCap, NORM_TOL};
