use std::fmt::Write;

use crate::error::{QssError, Result};
use crate::quantum::{ghz_state, Basis, Outcome, PureState};

/// An X/Y eigenstate label such as `x+`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Eigen {
    pub basis: Basis,
    pub outcome: Outcome,
}

impl Eigen {
    pub const XY: [Eigen; 4] = [
        Eigen { basis: Basis::X, outcome: Outcome::Plus },
        Eigen { basis: Basis::X, outcome: Outcome::Minus },
        Eigen { basis: Basis::Y, outcome: Outcome::Plus },
        Eigen { basis: Basis::Y, outcome: Outcome::Minus },
    ];

    pub fn label(&self) -> String {
        let sign = match self.outcome {
            Outcome::Plus => '+',
            Outcome::Minus => '-',
        };
        format!("{}{sign}", self.basis.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TruthEntry {
    pub alice: Eigen,
    pub bob: Eigen,
    pub charlie: Eigen,
}

/// Charlie's post-measurement state for every pair of Alice/Bob X/Y
/// outcomes on the three-party real GHZ state, rows indexed by Bob.
pub fn truth_table() -> Result<Vec<TruthEntry>> {
    let ghz = ghz_state(3, 0.0)?;
    let mut out = Vec::with_capacity(16);
    for bob in Eigen::XY {
        for alice in Eigen::XY {
            let vectors = [alice.basis.eigenvector(alice.outcome), bob.basis.eigenvector(bob.outcome)];
            let (_, rest) = ghz.condition_on(&[0, 1], &vectors)?;
            let rest = PureState::from_unnormalized(1, rest)?;
            let charlie = Eigen::XY
                .into_iter()
                .find(|e| rest.fidelity(&PureState::eigenstate(e.basis, e.outcome)) > 1.0 - 1e-9)
                .ok_or_else(|| QssError::Internal(format!("no X/Y eigenstate matches {rest}")))?;
            out.push(TruthEntry { alice, bob, charlie });
        }
    }
    Ok(out)
}

/// Plain-text grid: Alice across, Bob down.
pub fn render_truth_table(entries: &[TruthEntry]) -> String {
    let mut s = String::from("bob\\alice");
    for a in Eigen::XY {
        let _ = write!(s, "\t{}", a.label());
    }
    s.push('\n');
    for row in entries.chunks(4) {
        let _ = write!(s, "{}", row[0].bob.label());
        for e in row {
            let _ = write!(s, "\t{}", e.charlie.label());
        }
        s.push('\n');
    }
    s
}
