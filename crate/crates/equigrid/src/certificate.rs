use serde::{Deserialize, Serialize};

/// The first condition a verifier found violated, with enough data to
/// reproduce the failure by hand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Blocks do not partition the vertex set (a vertex missing or repeated).
    NotAPartition { vertex: usize },
    /// A block has the wrong size for its position.
    BlockSize { block: usize, size: usize, expected: String },
    /// The ordering inequality fails at block `block`, position `pos`
    /// (both zero-based): the vertex has `found` neighbours in earlier
    /// blocks but only `allowed` are permitted.
    OrderingBudget { block: usize, pos: usize, vertex: usize, found: usize, allowed: usize },
    /// A block repeats a colour, so it is not rainbow.
    NotRainbow { block: usize, colour: u32 },
    /// A vertex was coloured outside its list.
    ColourNotInList { vertex: usize, colour: u32 },
    /// Two adjacent vertices share a colour (independent-class mode only).
    MonochromaticEdge { u: usize, v: usize, colour: u32 },
    /// A colour class contains a cycle (acyclic-class mode only); `edge`
    /// is the edge whose insertion closed it.
    ClassCycle { colour: u32, edge: (usize, usize) },
    /// A colour class exceeds the ceiling bound.
    ClassTooLarge { colour: u32, size: usize, cap: usize },
    /// Class sizes are not within one of each other (exact balance mode).
    ClassImbalance { colour: u32, size: usize, low: usize, high: usize },
    /// A cycle of the host graph avoids every edge of the covering subgraph.
    UncoveredCycle { cycle: Vec<usize> },
    /// The covering subgraph uses an edge absent from the host graph.
    NotASubgraph { u: usize, v: usize },
    /// A component of the covering subgraph does not match its declared family.
    FamilyMismatch { component_root: usize, family: String, detail: String },
    /// Maximum degree exceeds the bound promised by the family.
    DegreeBound { vertex: usize, degree: usize, bound: usize },
    /// A catch-all for structural problems (sizes, index ranges).
    Malformed { detail: String },
}

/// Machine-checkable verdict produced by the verifiers.
///
/// `valid` is the verdict; on failure `violation` holds the first violated
/// condition. `caveats` records soundness limitations (for example that a
/// cover was only spot-checked, not exhaustively verified).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub valid: bool,
    pub checked: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub caveats: Vec<String>,
}

impl Certificate {
    pub fn pass(checked: impl Into<String>) -> Self {
        Certificate { valid: true, checked: checked.into(), violation: None, caveats: Vec::new() }
    }

    pub fn fail(checked: impl Into<String>, violation: Violation) -> Self {
        Certificate {
            valid: false,
            checked: checked.into(),
            violation: Some(violation),
            caveats: Vec::new(),
        }
    }

    pub fn with_caveat(mut self, caveat: impl Into<String>) -> Self {
        self.caveats.push(caveat.into());
        self
    }
}
