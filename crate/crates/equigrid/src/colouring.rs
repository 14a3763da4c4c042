//! Colour lists, colourings, and the verifier that every construction in
//! this crate is checked against before its result is returned.

use crate::certificate::{Certificate, Violation};
use crate::error::{Error, Result};
use crate::graph::Graph;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// What a colour class is required to induce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Classes are independent sets: a proper colouring.
    Proper,
    /// Classes induce forests: monochromatic edges are fine, cycles are not.
    Arbor,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Proper => "proper",
            Mode::Arbor => "arbor",
        })
    }
}

/// Which equitability condition class sizes must meet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SizeRule {
    /// Every class has at most `ceil(n / k)` vertices. This is the natural
    /// condition when colours come from lists: with fewer than k shared
    /// colours some classes may stay small or empty.
    AtMostCeil,
    /// Class sizes are `floor(n / k)` or `ceil(n / k)`, colours `0..k`.
    Balanced,
}

/// Per-vertex colour lists, all of the same size `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ListData", into = "ListData")]
pub struct ListAssignment {
    k: usize,
    lists: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ListData {
    k: usize,
    lists: Vec<Vec<u32>>,
}

impl TryFrom<ListData> for ListAssignment {
    type Error = Error;
    fn try_from(d: ListData) -> Result<Self> {
        ListAssignment::new(d.k, d.lists)
    }
}

impl From<ListAssignment> for ListData {
    fn from(l: ListAssignment) -> ListData {
        ListData { k: l.k, lists: l.lists }
    }
}

impl ListAssignment {
    /// Validates that every list holds exactly `k` distinct colours.
    /// Lists are stored sorted.
    pub fn new(k: usize, mut lists: Vec<Vec<u32>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::PreconditionViolated("list size k must be positive".into()));
        }
        for (v, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) || list.len() != k {
                return Err(Error::PreconditionViolated(format!(
                    "vertex {v}: expected {k} distinct colours, got {:?}",
                    list
                )));
            }
        }
        Ok(ListAssignment { k, lists })
    }

    /// The same `k` colours `0..k` on every vertex.
    pub fn identical(n: usize, k: usize) -> Self {
        let list: Vec<u32> = (0..k as u32).collect();
        ListAssignment { k, lists: vec![list; n] }
    }

    /// Pairwise disjoint lists: vertex `v` gets `v*k .. (v+1)*k`.
    pub fn disjoint(n: usize, k: usize) -> Self {
        let lists = (0..n)
            .map(|v| ((v * k) as u32..((v + 1) * k) as u32).collect())
            .collect();
        ListAssignment { k, lists }
    }

    /// Random `k`-subsets of `pool`, one per vertex.
    pub fn random_uniform(n: usize, k: usize, pool: &[u32], rng: &mut impl Rng) -> Self {
        assert!(pool.len() >= k, "pool of {} colours cannot fill lists of {k}", pool.len());
        let lists = (0..n)
            .map(|_| {
                let mut choice: Vec<u32> =
                    pool.choose_multiple(rng, k).copied().collect();
                choice.sort_unstable();
                choice
            })
            .collect();
        ListAssignment { k, lists }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.lists.len()
    }

    pub fn list(&self, v: usize) -> &[u32] {
        &self.lists[v]
    }

    pub fn contains(&self, v: usize, colour: u32) -> bool {
        self.lists[v].binary_search(&colour).is_ok()
    }
}

/// A colouring plus an optional partition witness: blocks that are pairwise
/// disjoint, cover every vertex, and each use every colour at most once.
/// A witness with `ceil(n / k)` blocks immediately bounds the class sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Colouring {
    pub colours: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_blocks: Option<Vec<Vec<usize>>>,
}

impl Colouring {
    pub fn new(colours: Vec<u32>) -> Self {
        Colouring { colours, witness_blocks: None }
    }

    pub fn with_witness(colours: Vec<u32>, blocks: Vec<Vec<usize>>) -> Self {
        Colouring { colours, witness_blocks: Some(blocks) }
    }

    pub fn class_sizes(&self) -> std::collections::BTreeMap<u32, usize> {
        let mut sizes = std::collections::BTreeMap::new();
        for &c in &self.colours {
            *sizes.entry(c).or_insert(0) += 1;
        }
        sizes
    }
}

pub fn ceil_div(n: usize, k: usize) -> usize {
    n.div_ceil(k)
}

/// Checks a colouring: structure, list membership, the class condition for
/// `mode`, the size rule, and the witness blocks when present. Returns a
/// certificate naming the first violated condition.
pub fn verify_colouring(
    g: &Graph,
    lists: Option<&ListAssignment>,
    colouring: &Colouring,
    mode: Mode,
    k: usize,
    size_rule: SizeRule,
) -> Certificate {
    let what = format!("{mode} colouring, k={k}");
    let n = g.n();
    if colouring.colours.len() != n {
        return Certificate::fail(
            what,
            Violation::Malformed {
                detail: format!("{} colours for {} vertices", colouring.colours.len(), n),
            },
        );
    }
    if k == 0 {
        return Certificate::fail(what, Violation::Malformed { detail: "k = 0".into() });
    }
    if let Some(l) = lists {
        if l.n() != n {
            return Certificate::fail(
                what,
                Violation::Malformed { detail: format!("{} lists for {n} vertices", l.n()) },
            );
        }
        for v in 0..n {
            if !l.contains(v, colouring.colours[v]) {
                return Certificate::fail(
                    what,
                    Violation::ColourNotInList { vertex: v, colour: colouring.colours[v] },
                );
            }
        }
    }
    match mode {
        Mode::Proper => {
            for (u, v) in g.edges() {
                if colouring.colours[u] == colouring.colours[v] {
                    return Certificate::fail(
                        what,
                        Violation::MonochromaticEdge { u, v, colour: colouring.colours[u] },
                    );
                }
            }
        }
        Mode::Arbor => {
            if let Some(violation) = find_class_cycle(g, &colouring.colours) {
                return Certificate::fail(what, violation);
            }
        }
    }
    let cap = ceil_div(n, k);
    let sizes = colouring.class_sizes();
    match size_rule {
        SizeRule::AtMostCeil => {
            for (&colour, &size) in &sizes {
                if size > cap {
                    return Certificate::fail(
                        what,
                        Violation::ClassTooLarge { colour, size, cap },
                    );
                }
            }
        }
        SizeRule::Balanced => {
            let low = n / k;
            let high = cap;
            if let Some((&colour, _)) = sizes.iter().find(|(&c, _)| c as usize >= k) {
                return Certificate::fail(
                    what,
                    Violation::Malformed {
                        detail: format!("colour {colour} outside 0..{k} in balanced mode"),
                    },
                );
            }
            for colour in 0..k as u32 {
                let size = sizes.get(&colour).copied().unwrap_or(0);
                if size < low || size > high {
                    return Certificate::fail(
                        what,
                        Violation::ClassImbalance { colour, size, low, high },
                    );
                }
            }
        }
    }
    if let Some(blocks) = &colouring.witness_blocks {
        if let Some(violation) = check_witness(n, k, &colouring.colours, blocks) {
            return Certificate::fail(what, violation);
        }
    }
    Certificate::pass(what)
}

/// Looks for a monochromatic cycle; reports the edge closing the first one.
fn find_class_cycle(g: &Graph, colours: &[u32]) -> Option<Violation> {
    let mut dsu = crate::graph::DisjointSets::new(g.n());
    for (u, v) in g.edges() {
        if colours[u] == colours[v] && !dsu.union(u, v) {
            return Some(Violation::ClassCycle { colour: colours[u], edge: (u, v) });
        }
    }
    None
}

/// Witness blocks must partition the vertex set into `ceil(n / k)` blocks of
/// size at most k, each rainbow under the colouring.
fn check_witness(
    n: usize,
    k: usize,
    colours: &[u32],
    blocks: &[Vec<usize>],
) -> Option<Violation> {
    let mut seen = vec![false; n];
    for (b, block) in blocks.iter().enumerate() {
        let mut used = Vec::with_capacity(block.len());
        for &v in block {
            if v >= n || seen[v] {
                return Some(Violation::NotAPartition { vertex: v });
            }
            seen[v] = true;
            if used.contains(&colours[v]) {
                return Some(Violation::NotRainbow { block: b, colour: colours[v] });
            }
            used.push(colours[v]);
        }
    }
    if let Some(v) = (0..n).find(|&v| !seen[v]) {
        return Some(Violation::NotAPartition { vertex: v });
    }
    if n > 0 && blocks.len() != ceil_div(n, k) {
        return Some(Violation::Malformed {
            detail: format!("{} witness blocks, expected {}", blocks.len(), ceil_div(n, k)),
        });
    }
    None
}
