//! Exhaustive search oracles for small instances.
//!
//! The constructive engines prove colourability only where a route applies.
//! This module decides the underlying question independently, by brute
//! force: [`exists_colouring`] settles a single list assignment through
//! backtracking, [`search_bad_assignment`] hunts for an assignment that
//! admits no colouring, and [`cross_check`] replays random instances through
//! both the dispatcher and the oracle, failing loudly on any disagreement.
//!
//! Everything here is exponential and intended for graphs of roughly two
//! dozen vertices. The budget caps keep larger inputs from hanging rather
//! than making them feasible. Verdicts are recorded per `k` and never
//! extrapolated across colour counts, because equitable colourability is not
//! monotone in the number of colours.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::colouring::{ceil_div, verify_colouring, Colouring, ListAssignment, Mode, SizeRule};
use crate::engines::{self, ArborOutcome};
use crate::error::{Error, Result};
use crate::graph::{Graph, RollbackDsu};
use crate::grid::GridSpec;

/// Colour permutations are quotiented out of exhaustive assignment searches
/// only while the pool stays this small; beyond it the factorial cost of the
/// canonical test outweighs the savings.
const PERMUTATION_POOL_CAP: usize = 6;

/// Caps and seeds for the oracle searches.
///
/// `node_cap` bounds the backtracking nodes of a single existence search and
/// doubles as the assignment count for [`search_bad_assignment`]: spaces no
/// larger than it are enumerated exhaustively, larger spaces are sampled at
/// most `node_cap` times. `time_cap` is a wall-clock limit in milliseconds.
/// Two runs with the same budget and seed explore their spaces in the same
/// order and, when neither hits a time limit, produce identical results.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub node_cap: usize,
    pub time_cap: u64,
    pub rng_seed: u64,
    /// Colours that sampled or enumerated lists draw from; `None` means
    /// `1..=2k`.
    pub colour_pool: Option<Vec<u32>>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { node_cap: 2_000_000, time_cap: 10_000, rng_seed: 0, colour_pool: None }
    }
}

impl SearchBudget {
    fn validate(&self) -> Result<()> {
        if self.node_cap == 0 || self.time_cap == 0 {
            return Err(Error::PreconditionViolated(
                "search budget caps must be positive".into(),
            ));
        }
        if self.colour_pool.as_ref().is_some_and(|pool| pool.is_empty()) {
            return Err(Error::PreconditionViolated("colour pool is empty".into()));
        }
        Ok(())
    }

    fn pool_for(&self, k: usize) -> Vec<u32> {
        let mut pool = self
            .colour_pool
            .clone()
            .unwrap_or_else(|| (1..=(2 * k) as u32).collect());
        pool.sort_unstable();
        pool.dedup();
        pool
    }
}

/// Outcome of an exhaustive existence search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum OracleVerdict {
    /// A colouring exists; the witness has passed the verifier.
    Yes { witness: Colouring },
    /// The whole space was searched and no colouring exists.
    No,
    /// A cap fired before the search finished; nothing is decided.
    BudgetExceeded,
}

/// Decides whether `g` admits a colouring from `lists` with the class
/// condition of `mode`, optionally under the equitable cap `ceil(n / k)`.
///
/// Vertices are assigned in degeneracy order and each list is tried in
/// ascending colour order, so the search is deterministic. A colour is
/// rejected as soon as its class is full (equitable runs), it appears on a
/// neighbour (proper mode), or it would close a cycle within its class
/// (arbor mode, detected incrementally by one union find per colour:
/// assigning `v` fails when two like-coloured neighbours of `v` are already
/// connected inside the class). `Yes` witnesses are re-verified before they
/// are returned; `No` is definitive because the backtracking, pruning
/// included, covers the whole space.
pub fn exists_colouring(
    g: &Graph,
    lists: &ListAssignment,
    k: usize,
    mode: Mode,
    equitable: bool,
    budget: &SearchBudget,
) -> Result<OracleVerdict> {
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be at least 1".into()));
    }
    if lists.k() != k {
        return Err(Error::PreconditionViolated(format!(
            "lists of size {} do not match k = {k}",
            lists.k()
        )));
    }
    if lists.n() != g.n() {
        return Err(Error::PreconditionViolated(format!(
            "{} lists for {} vertices",
            lists.n(),
            g.n()
        )));
    }
    budget.validate()?;

    let n = g.n();
    let (_, order) = g.degeneracy_order();
    let choices: Vec<Vec<u32>> = (0..n).map(|v| lists.list(v).to_vec()).collect();
    let mut forests = BTreeMap::new();
    if mode == Mode::Arbor {
        for list in &choices {
            for &c in list {
                forests.entry(c).or_insert_with(|| RollbackDsu::new(n));
            }
        }
    }
    let mut search = Search {
        g,
        order: &order,
        choices,
        cap: if equitable { ceil_div(n, k) } else { n.max(1) },
        mode,
        node_cap: budget.node_cap,
        deadline: Instant::now() + Duration::from_millis(budget.time_cap),
        nodes: 0,
        exceeded: false,
        colours: vec![None; n],
        class_sizes: BTreeMap::new(),
        forests,
    };
    if search.run(0) {
        let witness = Colouring::new(search.colours.iter().map(|c| c.unwrap()).collect());
        confirm_witness(g, lists, &witness, mode, k, equitable)?;
        Ok(OracleVerdict::Yes { witness })
    } else if search.exceeded {
        Ok(OracleVerdict::BudgetExceeded)
    } else {
        Ok(OracleVerdict::No)
    }
}

struct Search<'a> {
    g: &'a Graph,
    order: &'a [usize],
    choices: Vec<Vec<u32>>,
    cap: usize,
    mode: Mode,
    node_cap: usize,
    deadline: Instant,
    nodes: usize,
    exceeded: bool,
    colours: Vec<Option<u32>>,
    class_sizes: BTreeMap<u32, usize>,
    forests: BTreeMap<u32, RollbackDsu>,
}

impl Search<'_> {
    fn run(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let v = self.order[depth];
        for i in 0..self.choices[v].len() {
            let c = self.choices[v][i];
            self.nodes += 1;
            if self.nodes > self.node_cap
                || (self.nodes % 1024 == 0 && Instant::now() > self.deadline)
            {
                self.exceeded = true;
                return false;
            }
            if self.class_sizes.get(&c).copied().unwrap_or(0) == self.cap {
                continue;
            }
            let Some(mark) = self.try_place(v, c) else {
                continue;
            };
            self.colours[v] = Some(c);
            *self.class_sizes.entry(c).or_insert(0) += 1;
            if self.run(depth + 1) {
                return true;
            }
            self.colours[v] = None;
            *self.class_sizes.get_mut(&c).unwrap() -= 1;
            if let Some(m) = mark {
                self.forests.get_mut(&c).unwrap().rollback_to(m);
            }
            if self.exceeded {
                return false;
            }
        }
        false
    }

    /// Checks whether `v` can take colour `c` next to its already-coloured
    /// neighbours. Returns the rollback mark for arbor placements, `Some(None)`
    /// for proper ones, and `None` when the placement is rejected.
    fn try_place(&mut self, v: usize, c: u32) -> Option<Option<usize>> {
        match self.mode {
            Mode::Proper => {
                for &w in self.g.neighbours(v) {
                    if self.colours[w] == Some(c) {
                        return None;
                    }
                }
                Some(None)
            }
            Mode::Arbor => {
                let forest = self.forests.get_mut(&c).unwrap();
                let mark = forest.mark();
                for &w in self.g.neighbours(v) {
                    if self.colours[w] == Some(c) && !forest.union(v, w) {
                        forest.rollback_to(mark);
                        return None;
                    }
                }
                Some(Some(mark))
            }
        }
    }
}

fn confirm_witness(
    g: &Graph,
    lists: &ListAssignment,
    witness: &Colouring,
    mode: Mode,
    k: usize,
    equitable: bool,
) -> Result<()> {
    if equitable {
        let cert = verify_colouring(g, Some(lists), witness, mode, k, SizeRule::AtMostCeil);
        if !cert.valid {
            return Err(Error::VerificationFailed(format!(
                "oracle witness rejected: {:?}",
                cert.violation
            )));
        }
        return Ok(());
    }
    for (v, &c) in witness.colours.iter().enumerate() {
        if !lists.contains(v, c) {
            return Err(Error::VerificationFailed(format!(
                "oracle witness gives vertex {v} a colour outside its list"
            )));
        }
    }
    let sound = match mode {
        Mode::Proper => g.edges().iter().all(|&(u, v)| witness.colours[u] != witness.colours[v]),
        Mode::Arbor => {
            let mut classes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
            for (v, &c) in witness.colours.iter().enumerate() {
                classes.entry(c).or_default().push(v);
            }
            classes.values().all(|class| g.is_acyclic(class))
        }
    };
    if sound {
        Ok(())
    } else {
        Err(Error::VerificationFailed("oracle witness violates the class condition".into()))
    }
}

/// Result of a hunt for a list assignment that admits no colouring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "search", rename_all = "snake_case")]
pub enum SearchOutcome {
    /// An assignment for which [`exists_colouring`] returned a definitive
    /// `No`.
    Found { lists: ListAssignment },
    /// No bad assignment turned up. The note records exactly how far the
    /// search looked, because a miss over a restricted pool or a sampled
    /// space is not evidence that none exists.
    NotFound { note: String },
}

/// One examined assignment, as appended to JSON-line logs: the lists, the
/// verdict (witness included in a `Yes`), and for cross-check trials the
/// dispatcher's route.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignmentRecord {
    pub index: usize,
    pub lists: ListAssignment,
    pub verdict: OracleVerdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
}

/// Searches for a `k`-uniform list assignment over the budget's colour pool
/// for which no colouring of `g` exists.
///
/// When the raw space (one `k`-subset of the pool per vertex) has at most
/// `node_cap` points it is enumerated exhaustively, skipping assignments
/// that are mere colour renamings of an earlier one whenever the pool is
/// small enough to make that test cheap. Larger spaces are sampled with the
/// budget's seed. The first assignment whose existence search returns `No`
/// wins; searches that hit their own budget are counted and reported in the
/// `NotFound` note rather than treated as misses.
pub fn search_bad_assignment(
    g: &Graph,
    k: usize,
    mode: Mode,
    equitable: bool,
    budget: &SearchBudget,
) -> Result<SearchOutcome> {
    search_bad_assignment_logged(g, k, mode, equitable, budget, &mut |_| Ok(()))
}

/// [`search_bad_assignment`] with a sink that receives one record per
/// assignment actually examined, in search order. A sink error aborts the
/// search.
pub fn search_bad_assignment_logged(
    g: &Graph,
    k: usize,
    mode: Mode,
    equitable: bool,
    budget: &SearchBudget,
    log: &mut dyn FnMut(&AssignmentRecord) -> Result<()>,
) -> Result<SearchOutcome> {
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be at least 1".into()));
    }
    budget.validate()?;
    let pool = budget.pool_for(k);
    if pool.len() < k {
        return Err(Error::PreconditionViolated(format!(
            "pool of {} colours cannot fill lists of {k}",
            pool.len()
        )));
    }

    let n = g.n();
    let subsets = k_subsets(&pool, k);
    let deadline = Instant::now() + Duration::from_millis(budget.time_cap);
    let raw_count = u32::try_from(n)
        .ok()
        .and_then(|exp| subsets.len().checked_pow(exp));

    if raw_count.is_some_and(|t| t <= budget.node_cap) {
        let total = raw_count.unwrap();
        let perms = if pool.len() <= PERMUTATION_POOL_CAP {
            permutations(pool.len())
        } else {
            Vec::new()
        };
        let index: BTreeMap<u32, usize> =
            pool.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut idx = vec![0usize; n];
        let mut checked = 0usize;
        let mut skipped = 0usize;
        let mut timed_out = false;
        'enumerate: loop {
            if Instant::now() > deadline {
                timed_out = true;
                break;
            }
            let lists: Vec<Vec<u32>> = idx.iter().map(|&i| subsets[i].clone()).collect();
            if perms.is_empty() || is_canonical(&lists, &pool, &perms, &index) {
                checked += 1;
                let assignment = ListAssignment::new(k, lists)?;
                let verdict = exists_colouring(g, &assignment, k, mode, equitable, budget)?;
                let record =
                    AssignmentRecord { index: checked - 1, lists: assignment, verdict, route: None };
                log(&record)?;
                match record.verdict {
                    OracleVerdict::No => return Ok(SearchOutcome::Found { lists: record.lists }),
                    OracleVerdict::Yes { .. } => {}
                    OracleVerdict::BudgetExceeded => skipped += 1,
                }
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    break 'enumerate;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < subsets.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
        let mut note = if timed_out {
            format!(
                "time cap hit after {checked} of {total} assignments over pool {pool:?}; \
                 the enumeration is incomplete"
            )
        } else if perms.is_empty() {
            format!("exhausted all {total} assignments over pool {pool:?}")
        } else {
            format!(
                "exhausted {checked} assignments over pool {pool:?}, \
                 the rest of the {total} differ only by colour renaming"
            )
        };
        if skipped > 0 {
            note.push_str(&format!("; {skipped} existence searches hit the budget undecided"));
        }
        note.push_str("; pools larger than this one are not covered");
        Ok(SearchOutcome::NotFound { note })
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(budget.rng_seed);
        let mut sampled = 0usize;
        let mut skipped = 0usize;
        while sampled < budget.node_cap && Instant::now() <= deadline {
            let assignment = ListAssignment::random_uniform(n, k, &pool, &mut rng);
            sampled += 1;
            let verdict = exists_colouring(g, &assignment, k, mode, equitable, budget)?;
            let record =
                AssignmentRecord { index: sampled - 1, lists: assignment, verdict, route: None };
            log(&record)?;
            match record.verdict {
                OracleVerdict::No => return Ok(SearchOutcome::Found { lists: record.lists }),
                OracleVerdict::Yes { .. } => {}
                OracleVerdict::BudgetExceeded => skipped += 1,
            }
        }
        let mut note = format!(
            "sampled {sampled} assignments over pool {pool:?} with seed {}",
            budget.rng_seed
        );
        if skipped > 0 {
            note.push_str(&format!("; {skipped} existence searches hit the budget undecided"));
        }
        note.push_str("; absence of a find is not evidence that no bad assignment exists");
        Ok(SearchOutcome::NotFound { note })
    }
}

fn k_subsets(pool: &[u32], k: usize) -> Vec<Vec<u32>> {
    fn extend(pool: &[u32], k: usize, from: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let slack = pool.len() + current.len() - k;
        for i in from..=slack {
            current.push(pool[i]);
            extend(pool, k, i + 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    if pool.len() >= k {
        extend(pool, k, 0, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

fn permutations(p: usize) -> Vec<Vec<usize>> {
    fn extend(p: usize, used: &mut [bool], current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == p {
            out.push(current.clone());
            return;
        }
        for i in 0..p {
            if !used[i] {
                used[i] = true;
                current.push(i);
                extend(p, used, current, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(p, &mut vec![false; p], &mut Vec::with_capacity(p), &mut out);
    out
}

/// An assignment is canonical when no relabelling of the pool produces a
/// lexicographically smaller sequence of sorted lists.
fn is_canonical(
    lists: &[Vec<u32>],
    pool: &[u32],
    perms: &[Vec<usize>],
    index: &BTreeMap<u32, usize>,
) -> bool {
    for perm in perms {
        let relabeled: Vec<Vec<u32>> = lists
            .iter()
            .map(|list| {
                let mut mapped: Vec<u32> =
                    list.iter().map(|c| pool[perm[index[c]]]).collect();
                mapped.sort_unstable();
                mapped
            })
            .collect();
        if relabeled.as_slice() < lists {
            return false;
        }
    }
    true
}

/// Tally of a randomized comparison between the constructive dispatcher and
/// the exhaustive oracle. A report is only produced when no discrepancy was
/// found; disagreements abort with [`Error::Discrepancy`] instead.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub dims: Vec<usize>,
    pub k: usize,
    pub trials: usize,
    pub dispatcher_coloured: usize,
    pub dispatcher_declined: usize,
    pub oracle_yes: usize,
    pub oracle_no: usize,
    pub oracle_budget_exceeded: usize,
}

/// Runs `trials` random `k`-uniform assignments over `1..=2k` through both
/// the dispatcher and [`exists_colouring`], in equitable arbor mode.
///
/// Two situations are bugs and abort with [`Error::Discrepancy`]: the
/// dispatcher produced a colouring on an instance the oracle proves
/// uncolourable, and the dispatcher declined an instance although a
/// constructive route covers this `k` on these dims. An oracle `No` on a
/// declined instance is consistent and merely counted, as is a search that
/// outgrows its budget.
pub fn cross_check(spec: &GridSpec, k: usize, trials: usize, seed: u64) -> Result<CrossCheckReport> {
    cross_check_logged(spec, k, trials, seed, &mut |_| Ok(()))
}

/// [`cross_check`] with a sink that receives one record per trial, the
/// dispatcher's route included, before any discrepancy aborts the run.
pub fn cross_check_logged(
    spec: &GridSpec,
    k: usize,
    trials: usize,
    seed: u64,
    log: &mut dyn FnMut(&AssignmentRecord) -> Result<()>,
) -> Result<CrossCheckReport> {
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be at least 1".into()));
    }
    let g = spec.build();
    let pool: Vec<u32> = (1..=(2 * k) as u32).collect();
    let promised = engines::thresholds(spec)
        .constructive_from()
        .is_some_and(|k0| k0 <= k);
    let budget = SearchBudget::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = CrossCheckReport {
        dims: spec.dims().to_vec(),
        k,
        trials,
        dispatcher_coloured: 0,
        dispatcher_declined: 0,
        oracle_yes: 0,
        oracle_no: 0,
        oracle_budget_exceeded: 0,
    };
    for trial in 0..trials {
        let lists = ListAssignment::random_uniform(g.n(), k, &pool, &mut rng);
        let outcome = engines::equitable_list_arbor(spec, k, &lists, false)?;
        let verdict = exists_colouring(&g, &lists, k, Mode::Arbor, true, &budget)?;
        let route = match &outcome {
            ArborOutcome::Coloured { route, .. } => route.clone(),
            ArborOutcome::Heuristic { .. } => "heuristic".into(),
            ArborOutcome::GuaranteeOnly { .. } => "guarantee-only".into(),
            ArborOutcome::NoGuarantee { .. } => "declined".into(),
        };
        let record = AssignmentRecord { index: trial, lists, verdict, route: Some(route) };
        log(&record)?;
        let coloured = matches!(outcome, ArborOutcome::Coloured { .. });
        if coloured {
            report.dispatcher_coloured += 1;
        } else {
            report.dispatcher_declined += 1;
        }
        match record.verdict {
            OracleVerdict::Yes { .. } => report.oracle_yes += 1,
            OracleVerdict::No => {
                report.oracle_no += 1;
                if coloured {
                    return Err(Error::Discrepancy(format!(
                        "trial {trial} on dims {:?} at k = {k}: the dispatcher produced a \
                         colouring but exhaustive search proves none exists",
                        spec.dims()
                    )));
                }
            }
            OracleVerdict::BudgetExceeded => report.oracle_budget_exceeded += 1,
        }
        if promised && !coloured {
            return Err(Error::Discrepancy(format!(
                "trial {trial} on dims {:?} at k = {k}: a constructive route covers this k \
                 but the dispatcher declined",
                spec.dims()
            )));
        }
    }
    Ok(report)
}
