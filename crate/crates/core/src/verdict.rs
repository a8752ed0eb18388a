//! Three-valued results for checks that are not decidable in general.

use serde::{Deserialize, Serialize};

use crate::name::VertexName;

/// Finite evidence attached to a failed check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// The empty space where a non-empty one was required.
    Empty,
    Simplex { simplex: Vec<VertexName> },
    Simplices { simplices: Vec<Vec<VertexName>> },
    /// Representatives of two different connected components.
    Components { first: VertexName, second: VertexName },
    /// A non-vanishing homology group.
    Homology { degree: usize, betti: usize, torsion: Vec<u64> },
    /// An index subset on which two covers (or a carrier) disagree.
    IndexSubset { indices: Vec<VertexName> },
    /// A domain simplex of cover element `index` whose image leaves the assigned subcomplex.
    Carried { index: VertexName, simplex: Vec<VertexName> },
    /// A point given by its support and coordinates.
    Point { support: Vec<VertexName>, coords: Vec<String> },
    /// A failing simplex of the target subdivision together with the cause.
    Preimage { delta: Vec<VertexName>, cause: Box<Witness> },
    /// A failure located at one level or bond of a tower.
    Level { level: usize, cause: Box<Witness> },
    /// Several independent failures, in canonical order.
    All { failures: Vec<Witness> },
    /// Free-form description for failures that have no better shape.
    Note { text: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails { witness: Witness },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn fails(witness: Witness) -> Self {
        Verdict::Fails { witness }
    }

    pub fn inconclusive(reason: impl Into<String>) -> Self {
        Verdict::Inconclusive { reason: reason.into() }
    }

    pub fn from_bool(ok: bool, witness: impl FnOnce() -> Witness) -> Self {
        if ok {
            Verdict::Holds
        } else {
            Verdict::fails(witness())
        }
    }

    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn is_fails(&self) -> bool {
        matches!(self, Verdict::Fails { .. })
    }

    pub fn is_inconclusive(&self) -> bool {
        matches!(self, Verdict::Inconclusive { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Fails { witness } => Some(witness),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Verdict::Holds => 0,
            Verdict::Inconclusive { .. } => 1,
            Verdict::Fails { .. } => 2,
        }
    }

    /// Conjunction: `Fails` dominates `Inconclusive` dominates `Holds`. Among
    /// equals the left operand is kept, so the first witness propagates.
    pub fn and(self, other: Verdict) -> Verdict {
        if other.rank() > self.rank() {
            other
        } else {
            self
        }
    }

    pub fn and_then(self, next: impl FnOnce() -> Verdict) -> Verdict {
        if self.is_fails() {
            self
        } else {
            self.and(next())
        }
    }

    /// Wraps a failure witness, leaving other outcomes unchanged.
    pub fn map_witness(self, f: impl FnOnce(Witness) -> Witness) -> Verdict {
        match self {
            Verdict::Fails { witness } => Verdict::fails(f(witness)),
            v => v,
        }
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Holds => 0,
            Verdict::Fails { .. } => 1,
            Verdict::Inconclusive { .. } => 2,
        }
    }
}

pub fn all<I: IntoIterator<Item = Verdict>>(verdicts: I) -> Verdict {
    verdicts.into_iter().fold(Verdict::Holds, Verdict::and)
}

/// Conjunction that keeps every failure witness instead of only the first.
pub fn all_collecting<I: IntoIterator<Item = Verdict>>(verdicts: I) -> Verdict {
    let mut failures = Vec::new();
    let mut inconclusive = None;
    for v in verdicts {
        match v {
            Verdict::Fails { witness } => failures.push(witness),
            Verdict::Inconclusive { reason } => {
                inconclusive.get_or_insert(reason);
            }
            Verdict::Holds => {}
        }
    }
    match (failures.len(), inconclusive) {
        (0, None) => Verdict::Holds,
        (0, Some(r)) => Verdict::inconclusive(r),
        (1, _) => Verdict::fails(failures.pop().unwrap()),
        _ => Verdict::fails(Witness::All { failures }),
    }
}
