//! Special k-partitions, rainbow partitions, and the engine that turns a
//! verified partition into an equitable list colouring.
//!
//! A special k-partition splits the vertex set into blocks S_1..S_{eta+1}
//! where only S_1 may hold fewer than k vertices, and each later block is
//! ordered x_1..x_k so that x_i has at most i-1 neighbours in earlier
//! blocks (proper budgets) or at most 2i-1 (arbor budgets). Blocks with
//! that property can be coloured rainbow one after another from any lists
//! of size t >= k, and regrouping the rainbow blocks caps every colour
//! class at ceil(n / t). The builders at the bottom of the module peel
//! such partitions out of linear forests, ladder-like graphs, staircase
//! grids, and 4-dimensional grids.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Violation};
use crate::colouring::{ceil_div, verify_colouring, Colouring, ListAssignment, Mode, SizeRule};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::grid::GridSpec;
use crate::recognize;

/// Ordered blocks S_1..S_{eta+1}; every block after the first has exactly
/// `k` vertices, and the stored order within a block is the ordering the
/// budget inequality is checked against.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialPartition {
    pub k: usize,
    pub mode: Mode,
    pub blocks: Vec<Vec<usize>>,
}

fn budget(mode: Mode, pos: usize) -> usize {
    match mode {
        Mode::Proper => pos,
        Mode::Arbor => 2 * pos + 1,
    }
}

/// Checks that `p` partitions the vertices of `g`, that block sizes fit
/// the special shape, and that every ordered block meets its neighbour
/// budget. On failure the certificate names the first block and position
/// (scanning blocks, then positions, in ascending order) that violate the
/// inequality.
pub fn verify_special_partition(g: &Graph, p: &SpecialPartition) -> Certificate {
    let what = format!("special {}-partition, {} budgets", p.k, p.mode);
    let n = g.n();
    if p.k == 0 {
        return Certificate::fail(what, Violation::Malformed { detail: "k = 0".into() });
    }
    let mut seen = vec![false; n];
    for block in &p.blocks {
        for &v in block {
            if v >= n {
                return Certificate::fail(
                    what,
                    Violation::Malformed { detail: format!("vertex {v} out of range") },
                );
            }
            if seen[v] {
                return Certificate::fail(what, Violation::NotAPartition { vertex: v });
            }
            seen[v] = true;
        }
    }
    if let Some(v) = seen.iter().position(|&s| !s) {
        return Certificate::fail(what, Violation::NotAPartition { vertex: v });
    }
    for (j, block) in p.blocks.iter().enumerate() {
        let ok = if j == 0 { (1..=p.k).contains(&block.len()) } else { block.len() == p.k };
        if !ok {
            let expected = if j == 0 {
                format!("between 1 and {}", p.k)
            } else {
                format!("exactly {}", p.k)
            };
            return Certificate::fail(
                what,
                Violation::BlockSize { block: j, size: block.len(), expected },
            );
        }
    }
    let mut earlier = vec![false; n];
    for (j, block) in p.blocks.iter().enumerate() {
        if j > 0 {
            for (pos, &v) in block.iter().enumerate() {
                let found = g.neighbours(v).iter().filter(|&&u| earlier[u]).count();
                let allowed = budget(p.mode, pos);
                if found > allowed {
                    return Certificate::fail(
                        what,
                        Violation::OrderingBudget { block: j, pos, vertex: v, found, allowed },
                    );
                }
            }
        }
        for &v in block {
            earlier[v] = true;
        }
    }
    Certificate::pass(what)
}

/// A partition into blocks that each carry pairwise distinct colours under
/// the stored reference colouring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RainbowPartition {
    pub k: usize,
    pub blocks: Vec<Vec<usize>>,
    pub colours: Vec<u32>,
}

/// Builds a rainbow partition of `(g, c)` into exactly `ceil(n / k)`
/// blocks. Starting from singletons, the smallest block is repeatedly
/// drained: each of its vertices moves to the lowest-indexed other block
/// missing that vertex's colour, which exists as long as the block count
/// still exceeds the target.
pub fn find_rainbow_partition(g: &Graph, c: &Colouring, k: usize) -> Result<RainbowPartition> {
    let n = g.n();
    if k == 0 {
        return Err(Error::PreconditionViolated("k must be at least 1".into()));
    }
    if c.colours.len() != n {
        return Err(Error::PreconditionViolated(format!(
            "{} colours for {n} vertices",
            c.colours.len()
        )));
    }
    let cap = ceil_div(n, k);
    for (&colour, &size) in &c.class_sizes() {
        if size > cap {
            return Err(Error::PreconditionViolated(format!(
                "colour {colour} appears {size} times, above the ceiling {cap}"
            )));
        }
    }
    let mut blocks: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    while blocks.len() > cap {
        let donor = (0..blocks.len()).min_by_key(|&i| (blocks[i].len(), i)).unwrap();
        let moving = std::mem::take(&mut blocks[donor]);
        for v in moving {
            let colour = c.colours[v];
            let target = (0..blocks.len())
                .find(|&i| i != donor && blocks[i].iter().all(|&u| c.colours[u] != colour))
                .expect("a block missing the colour exists while the count is above the target");
            blocks[target].push(v);
        }
        blocks.remove(donor);
    }
    for block in &mut blocks {
        block.sort_unstable();
    }
    Ok(RainbowPartition { k, blocks, colours: c.colours.clone() })
}

/// Rechunks a special rainbow k-partition into a special rainbow
/// x-partition, `x <= k`. The blocks are concatenated with the short block
/// first; each next vertex is the lowest-numbered one from the current
/// block whose colour differs from the previous `min(k-1, placed)` list
/// entries, and the resulting list is cut into consecutive x-chunks.
pub fn downscale_partition(g: &Graph, rp: &RainbowPartition, x: usize) -> Result<RainbowPartition> {
    let k = rp.k;
    if x == 0 || x > k {
        return Err(Error::PreconditionViolated(format!("x = {x} must lie in 1..={k}")));
    }
    if rp.colours.len() != g.n() {
        return Err(Error::PreconditionViolated(format!(
            "{} colours for {} vertices",
            rp.colours.len(),
            g.n()
        )));
    }
    let mut short_blocks = 0usize;
    for block in &rp.blocks {
        if block.iter().any(|&v| v >= g.n()) {
            return Err(Error::PreconditionViolated("block vertex out of range".into()));
        }
        let distinct: BTreeSet<u32> = block.iter().map(|&v| rp.colours[v]).collect();
        if distinct.len() != block.len() {
            return Err(Error::PreconditionViolated("input block is not rainbow".into()));
        }
        if block.len() > k {
            return Err(Error::PreconditionViolated(format!(
                "block of size {} in a {k}-partition",
                block.len()
            )));
        }
        if block.len() < k {
            short_blocks += 1;
        }
    }
    if short_blocks > 1 {
        return Err(Error::PreconditionViolated(
            "more than one block is smaller than k".into(),
        ));
    }
    let mut ordered: Vec<&Vec<usize>> = Vec::with_capacity(rp.blocks.len());
    ordered.extend(rp.blocks.iter().filter(|b| b.len() < k));
    ordered.extend(rp.blocks.iter().filter(|b| b.len() == k));

    let mut seq: Vec<usize> = Vec::with_capacity(rp.blocks.iter().map(|b| b.len()).sum());
    for block in ordered {
        let mut remaining: BTreeSet<usize> = block.iter().copied().collect();
        while !remaining.is_empty() {
            let window = k.saturating_sub(1).min(seq.len());
            let recent: BTreeSet<u32> =
                seq[seq.len() - window..].iter().map(|&u| rp.colours[u]).collect();
            let v = remaining
                .iter()
                .copied()
                .find(|&v| !recent.contains(&rp.colours[v]))
                .ok_or_else(|| {
                    Error::ConstructionFailed("no vertex avoids the recent colours".into())
                })?;
            remaining.remove(&v);
            seq.push(v);
        }
    }
    let blocks: Vec<Vec<usize>> = seq.chunks(x).map(<[usize]>::to_vec).collect();
    for block in &blocks {
        let distinct: BTreeSet<u32> = block.iter().map(|&v| rp.colours[v]).collect();
        if distinct.len() != block.len() {
            return Err(Error::ConstructionFailed("a rechunked block repeats a colour".into()));
        }
    }
    Ok(RainbowPartition { k: x, blocks, colours: rp.colours.clone() })
}

const ENGINE_NODE_CAP: usize = 10_000;

/// Colours `g` from `lists` following a verified special partition, in the
/// partition's own mode. Every class ends up with at most `ceil(n / t)`
/// vertices, witnessed by a partition into `ceil(n / t)` rainbow blocks
/// that is returned inside the colouring.
///
/// The engine colours the first blocks (V1) one after another, keeping
/// each block rainbow and forcing the first r2 = n - floor((n-1)/t) * t
/// vertices to use pairwise distinct colours; those vertices form the
/// witness block R. The rest of V1 is rechunked into rainbow r-sets
/// T_1..T_beta via [`downscale_partition`], and the remaining blocks are
/// coloured in groups of gamma = (t - r) / k blocks, with the colours of
/// T_m and of earlier blocks in the same group removed from the lists, so
/// each T_m together with its group is rainbow of size t.
pub fn colour_via_partition(
    g: &Graph,
    p: &SpecialPartition,
    lists: &ListAssignment,
    t: usize,
) -> Result<Colouring> {
    let n = g.n();
    let k = p.k;
    if t < k {
        return Err(Error::PreconditionViolated(format!(
            "t = {t} is below the block size k = {k}"
        )));
    }
    if lists.k() != t {
        return Err(Error::PreconditionViolated(format!(
            "lists of size {} for t = {t}",
            lists.k()
        )));
    }
    if lists.n() != n {
        return Err(Error::PreconditionViolated(format!(
            "{} lists for {n} vertices",
            lists.n()
        )));
    }
    let cert = verify_special_partition(g, p);
    if !cert.valid {
        return Err(Error::PreconditionViolated(format!(
            "partition fails verification: {:?}",
            cert.violation
        )));
    }
    if n == 0 {
        return Ok(Colouring::with_witness(Vec::new(), Vec::new()));
    }

    let eta = (n - 1) / k;
    debug_assert_eq!(p.blocks.len(), eta + 1);
    let beta = (n - 1) / t;
    let r2 = n - beta * t;
    let gamma = (t - 1) / k;
    let r = t - gamma * k;
    assert!(beta * gamma <= eta, "group blocks outnumber the partition blocks");
    let q = eta + 1 - beta * gamma;

    let mut order: Vec<(usize, usize)> = Vec::with_capacity(n);
    for (j, block) in p.blocks.iter().enumerate() {
        for &v in block.iter().rev() {
            order.push((v, j));
        }
    }
    let v1_total: usize = p.blocks[..q].iter().map(Vec::len).sum();
    debug_assert_eq!(v1_total, beta * r + r2);

    let mut colours: Vec<Option<u32>> = vec![None; n];
    colour_segment(g, p, lists, &order, 0, v1_total, r2, q, gamma, None, &mut colours)?;

    let r_ids: Vec<usize> = order[..r2].iter().map(|&(v, _)| v).collect();
    let mut witness: Vec<Vec<usize>> = vec![r_ids];
    if beta > 0 {
        let mut rest: Vec<Vec<usize>> = Vec::new();
        let mut current = usize::MAX;
        for &(v, j) in &order[r2..v1_total] {
            if j != current {
                rest.push(Vec::new());
                current = j;
            }
            rest.last_mut().unwrap().push(v);
        }
        let flat: Vec<u32> = colours.iter().map(|c| c.unwrap_or(0)).collect();
        let rechunked =
            downscale_partition(g, &RainbowPartition { k, blocks: rest, colours: flat }, r)?;
        debug_assert_eq!(rechunked.blocks.len(), beta);
        let t_sets: Vec<BTreeSet<u32>> = rechunked
            .blocks
            .iter()
            .map(|b| b.iter().map(|&v| colours[v].unwrap()).collect())
            .collect();

        colour_segment(g, p, lists, &order, v1_total, n, r2, q, gamma, Some(&t_sets), &mut colours)?;

        for (m, chunk) in rechunked.blocks.iter().enumerate() {
            let mut block = chunk.clone();
            for j in (q + m * gamma)..(q + (m + 1) * gamma) {
                block.extend_from_slice(&p.blocks[j]);
            }
            block.sort_unstable();
            witness.push(block);
        }
    }

    let flat: Vec<u32> = colours.into_iter().map(Option::unwrap).collect();
    let colouring = Colouring::with_witness(flat, witness);
    let cert = verify_colouring(g, Some(lists), &colouring, p.mode, t, SizeRule::AtMostCeil);
    if !cert.valid {
        return Err(Error::VerificationFailed(format!(
            "engine output rejected: {:?}",
            cert.violation
        )));
    }
    Ok(colouring)
}

/// Colours `order[lo..hi]` left to right, backtracking over at most the
/// two most recent blocks and at most [`ENGINE_NODE_CAP`] assignments.
#[allow(clippy::too_many_arguments)]
fn colour_segment(
    g: &Graph,
    p: &SpecialPartition,
    lists: &ListAssignment,
    order: &[(usize, usize)],
    lo: usize,
    hi: usize,
    r2: usize,
    q: usize,
    gamma: usize,
    t_sets: Option<&[BTreeSet<u32>]>,
    colours: &mut [Option<u32>],
) -> Result<()> {
    let mut cands: Vec<Vec<u32>> = vec![Vec::new(); hi - lo];
    let mut next: Vec<usize> = vec![0; hi - lo];
    let mut entered: Vec<bool> = vec![false; hi - lo];
    let mut idx = lo;
    let mut frontier = lo;
    let mut nodes = 0usize;
    while idx < hi {
        let slot = idx - lo;
        if !entered[slot] {
            cands[slot] = candidate_colours(g, p, lists, order, idx, r2, q, gamma, t_sets, colours);
            next[slot] = 0;
            entered[slot] = true;
        }
        if next[slot] < cands[slot].len() {
            let colour = cands[slot][next[slot]];
            next[slot] += 1;
            colours[order[idx].0] = Some(colour);
            nodes += 1;
            if nodes > ENGINE_NODE_CAP {
                return Err(Error::ConstructionFailed(format!(
                    "colour search exceeded {ENGINE_NODE_CAP} assignments near vertex {}",
                    order[frontier].0
                )));
            }
            idx += 1;
        } else {
            entered[slot] = false;
            if idx > frontier {
                frontier = idx;
            }
            if idx == lo {
                return Err(Error::ConstructionFailed(format!(
                    "no feasible colour for vertex {}",
                    order[frontier.min(hi - 1)].0
                )));
            }
            idx -= 1;
            colours[order[idx].0] = None;
            if order[frontier.min(hi - 1)].1 > order[idx].1 + 1 {
                return Err(Error::ConstructionFailed(format!(
                    "no feasible colour for vertex {} within the backtracking window",
                    order[frontier.min(hi - 1)].0
                )));
            }
        }
    }
    Ok(())
}

/// List entries still open for `order[idx]`, ranked by how often each
/// colour is used so far, ties to the smaller colour.
#[allow(clippy::too_many_arguments)]
fn candidate_colours(
    g: &Graph,
    p: &SpecialPartition,
    lists: &ListAssignment,
    order: &[(usize, usize)],
    idx: usize,
    r2: usize,
    q: usize,
    gamma: usize,
    t_sets: Option<&[BTreeSet<u32>]>,
    colours: &[Option<u32>],
) -> Vec<u32> {
    let (v, j) = order[idx];
    let k = p.k;
    let mut forbidden: BTreeSet<u32> = BTreeSet::new();
    if idx < r2 {
        for &(u, _) in &order[..idx] {
            if let Some(c) = colours[u] {
                forbidden.insert(c);
            }
        }
        assert!(forbidden.len() < r2, "the forced-rainbow prefix blocks too many colours");
    } else {
        for &u in &p.blocks[j] {
            if u != v {
                if let Some(c) = colours[u] {
                    forbidden.insert(c);
                }
            }
        }
        match p.mode {
            Mode::Proper => {
                for &u in g.neighbours(v) {
                    if let Some(c) = colours[u] {
                        forbidden.insert(c);
                    }
                }
            }
            Mode::Arbor => {
                let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
                for &u in g.neighbours(v) {
                    if let Some(c) = colours[u] {
                        *counts.entry(c).or_insert(0) += 1;
                    }
                }
                for (c, count) in counts {
                    if count >= 2 {
                        forbidden.insert(c);
                    }
                }
            }
        }
        assert!(forbidden.len() <= k - 1, "a block vertex has more than k - 1 blocked colours");
        if j >= q {
            let m = (j - q) / gamma;
            forbidden.extend(t_sets.expect("group sets exist in the second phase")[m].iter());
            for &u in p.blocks[(q + m * gamma)..j].iter().flatten() {
                if let Some(c) = colours[u] {
                    forbidden.insert(c);
                }
            }
        }
    }
    let mut usage: BTreeMap<u32, usize> = BTreeMap::new();
    for c in colours.iter().flatten() {
        *usage.entry(*c).or_insert(0) += 1;
    }
    let mut allowed: Vec<u32> =
        lists.list(v).iter().copied().filter(|c| !forbidden.contains(c)).collect();
    allowed.sort_by_key(|c| (usage.get(c).copied().unwrap_or(0), *c));
    allowed
}

struct Chain {
    verts: Vec<usize>,
    cycle: bool,
}

/// Strips blocks of exactly `k` vertices from the tails of paths (and
/// optionally arcs of cycles), crossing into the previous component when
/// one runs out; the leftovers become S_1. Within a block, vertices with
/// no remaining neighbour come first and the at most two pieces of the
/// boundary go last, which meets the proper budgets.
fn strip_blocks(g: &Graph, k: usize, allow_cycles: bool) -> Result<SpecialPartition> {
    if k < 2 {
        return Err(Error::PreconditionViolated(format!("k = {k} must be at least 2")));
    }
    let mut chains: Vec<Chain> = Vec::new();
    for comp in g.components() {
        if let Some(order) = recognize::path_order(g, &comp) {
            chains.push(Chain { verts: order, cycle: false });
        } else if let Some(order) = recognize::cycle_order(g, &comp) {
            if !allow_cycles {
                return Err(Error::NotLinearForest(format!(
                    "component containing vertex {} is a cycle",
                    comp[0]
                )));
            }
            if k < 3 {
                return Err(Error::PreconditionViolated(
                    "cycle components need k at least 3".into(),
                ));
            }
            chains.push(Chain { verts: order, cycle: true });
        } else {
            return Err(Error::NotLinearForest(format!(
                "component containing vertex {} has a vertex of degree 3 or more",
                comp[0]
            )));
        }
    }
    let mut total: usize = chains.iter().map(|c| c.verts.len()).sum();
    let mut peeled: Vec<Vec<usize>> = Vec::new();
    while total > k {
        let mut zeros: Vec<usize> = Vec::new();
        let mut ones: Vec<usize> = Vec::new();
        let mut twos: Vec<usize> = Vec::new();
        let mut need = k;
        while need > 0 {
            let last = chains
                .iter()
                .rposition(|c| !c.verts.is_empty())
                .expect("vertices remain while total > k");
            let chain = &mut chains[last];
            let len = chain.verts.len();
            if len > need {
                let tail = chain.verts.split_off(len - need);
                if chain.cycle {
                    if tail.len() == 1 {
                        twos.push(tail[0]);
                    } else {
                        ones.push(tail[0]);
                        ones.push(*tail.last().unwrap());
                        zeros.extend(&tail[1..tail.len() - 1]);
                    }
                    chain.cycle = false;
                } else {
                    ones.push(tail[0]);
                    zeros.extend(&tail[1..]);
                }
                need = 0;
            } else {
                need -= len;
                zeros.append(&mut chain.verts);
            }
        }
        zeros.sort_unstable();
        ones.sort_unstable();
        let mut block = zeros;
        block.extend(ones);
        block.extend(twos);
        peeled.push(block);
        total -= k;
    }
    let mut residue: Vec<usize> =
        chains.iter().flat_map(|c| c.verts.iter().copied()).collect();
    residue.sort_unstable();
    let mut blocks = Vec::with_capacity(peeled.len() + 1);
    if !residue.is_empty() {
        blocks.push(residue);
    }
    blocks.extend(peeled.into_iter().rev());
    let p = SpecialPartition { k, mode: Mode::Proper, blocks };
    let cert = verify_special_partition(g, &p);
    if !cert.valid {
        return Err(Error::ConstructionFailed(format!(
            "tail stripping produced an invalid partition: {:?}",
            cert.violation
        )));
    }
    Ok(p)
}

/// Special k-partition of a disjoint union of paths, for any `k >= 2`.
pub fn partition_linear_forest(g: &Graph, k: usize) -> Result<SpecialPartition> {
    strip_blocks(g, k, false)
}

/// Like [`partition_linear_forest`] but also accepts cycle components,
/// which need `k >= 3` so the two arc boundaries fit at positions with a
/// positive budget.
pub(crate) fn partition_degree_two(g: &Graph, k: usize) -> Result<SpecialPartition> {
    strip_blocks(g, k, true)
}

/// Special 3-partition of a graph whose components are ladders, ladders
/// minus a corner, or paths. Triples are peeled around a vertex of
/// minimum degree; the case analysis on that degree keeps every component
/// in the same family, so the peel runs to completion.
pub fn partition_g1(g: &Graph) -> Result<SpecialPartition> {
    for comp in g.components() {
        if recognize::as_ladder_family(g, &comp).is_none() {
            return Err(Error::NotInFamilyG1(format!(
                "component containing vertex {} is not a path, a ladder, or a ladder minus a corner",
                comp[0]
            )));
        }
    }
    let n = g.n();
    let mut alive = vec![true; n];
    let mut left = n;
    let mut peeled: Vec<Vec<usize>> = Vec::new();
    let deg = |alive: &[bool], v: usize| g.neighbours(v).iter().filter(|&&u| alive[u]).count();
    let nbrs = |alive: &[bool], v: usize| -> Vec<usize> {
        g.neighbours(v).iter().copied().filter(|&u| alive[u]).collect()
    };
    while left > 3 {
        let x1 = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (deg(&alive, v), v))
            .expect("vertices remain");
        let (x2, x3) = match deg(&alive, x1) {
            2 => {
                let nb = nbrs(&alive, x1);
                let x2 = nb
                    .iter()
                    .copied()
                    .find(|&u| deg(&alive, u) == 2)
                    .ok_or_else(|| {
                        Error::NotInFamilyG1(format!(
                            "degree-2 vertex {x1} has no degree-2 neighbour"
                        ))
                    })?;
                let x3 = nb.into_iter().find(|&u| u != x2).unwrap();
                (x2, x3)
            }
            1 => {
                let x2 = nbrs(&alive, x1)[0];
                match deg(&alive, x2) {
                    3 => {
                        let x3 = nbrs(&alive, x2)
                            .into_iter()
                            .filter(|&u| u != x1 && deg(&alive, u) <= 2)
                            .min()
                            .ok_or_else(|| {
                                Error::NotInFamilyG1(format!(
                                    "degree-3 vertex {x2} has no low-degree neighbour"
                                ))
                            })?;
                        (x2, x3)
                    }
                    2 => {
                        let x3 = nbrs(&alive, x2).into_iter().find(|&u| u != x1).unwrap();
                        (x2, x3)
                    }
                    _ => {
                        let x3 = (0..n)
                            .filter(|&v| alive[v] && v != x1 && v != x2)
                            .min_by_key(|&v| (deg(&alive, v), v))
                            .expect("more than three vertices remain");
                        (x2, x3)
                    }
                }
            }
            0 => {
                let pair = (0..n)
                    .filter(|&u| alive[u] && u != x1 && deg(&alive, u) <= 2)
                    .find_map(|u| {
                        nbrs(&alive, u)
                            .into_iter()
                            .find(|&w| w != x1 && deg(&alive, w) <= 2)
                            .map(|w| (u, w))
                    });
                match pair {
                    Some(p) => p,
                    None => {
                        let mut rest: Vec<usize> =
                            (0..n).filter(|&v| alive[v] && v != x1).collect();
                        rest.sort_by_key(|&v| (deg(&alive, v), v));
                        (rest[0], rest[1])
                    }
                }
            }
            d => {
                return Err(Error::NotInFamilyG1(format!("minimum degree {d} exceeds 2")));
            }
        };
        peeled.push(vec![x1, x2, x3]);
        for &v in &[x1, x2, x3] {
            alive[v] = false;
        }
        left -= 3;
    }
    let residue: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut blocks = Vec::with_capacity(peeled.len() + 1);
    if !residue.is_empty() {
        blocks.push(residue);
    }
    blocks.extend(peeled.into_iter().rev());
    let p = SpecialPartition { k: 3, mode: Mode::Proper, blocks };
    let cert = verify_special_partition(g, &p);
    if !cert.valid {
        return Err(Error::NotInFamilyG1(format!(
            "peeling produced an invalid partition: {:?}",
            cert.violation
        )));
    }
    Ok(p)
}

/// Special 4-partition of a graph whose components are grids with a
/// staircase of two-vertex columns removed from the top-right corner.
/// Peels a 2x2 block off the free corner while two full rows remain,
/// four consecutive column vertices when only one does, and path tails
/// otherwise; small components are combined into mixed blocks.
pub fn partition_g2(g: &Graph) -> Result<SpecialPartition> {
    let n = g.n();
    let mut alive = vec![true; n];
    let mut left = n;
    let mut peeled: Vec<Vec<usize>> = Vec::new();
    while left > 4 {
        let live: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        let (sub, back) = g.induced(&live);
        let comps = sub.components();
        let mut target = &comps[0];
        for comp in &comps[1..] {
            if comp.len() > target.len() {
                target = comp;
            }
        }
        let block = if target.len() > 4 {
            if let Some(order) = recognize::path_order(&sub, target) {
                let tail = &order[order.len() - 4..];
                let mut zeros: Vec<usize> = tail[1..].iter().map(|&v| back[v]).collect();
                zeros.sort_unstable();
                zeros.push(back[tail[0]]);
                zeros
            } else if let Some(shape) = recognize::as_notched_grid(&sub, target) {
                let (rows, cols, steps) = (shape.n1, shape.n2, shape.steps);
                let coords: [(usize, usize); 4] = if rows - steps >= 2 && cols >= 2 {
                    [
                        (rows - steps, cols),
                        (rows - steps - 1, cols),
                        (rows - steps, cols - 1),
                        (rows - steps - 1, cols - 1),
                    ]
                } else if rows - steps == 1 && cols >= 4 {
                    [(1, cols), (1, cols - 1), (1, cols - 2), (1, cols - 3)]
                } else {
                    return Err(Error::NotInFamilyG2(format!(
                        "no peelable corner in a {rows}x{cols} staircase with {steps} steps"
                    )));
                };
                coords.iter().map(|&(a, b)| back[shape.host(a, b)]).collect()
            } else {
                return Err(Error::NotInFamilyG2(format!(
                    "component containing vertex {} is neither a path nor a staircase grid",
                    back[target[0]]
                )));
            }
        } else {
            let mut ordered: Vec<&Vec<usize>> = comps.iter().collect();
            ordered.sort_by_key(|c| std::cmp::Reverse(c.len()));
            let mut zeros: Vec<usize> = Vec::new();
            let mut ones: Vec<usize> = Vec::new();
            let mut twos: Vec<usize> = Vec::new();
            let mut need = 4usize;
            for comp in ordered {
                if need == 0 {
                    break;
                }
                if comp.len() <= need {
                    need -= comp.len();
                    zeros.extend(comp.iter().map(|&v| back[v]));
                } else if let Some(order) = recognize::path_order(&sub, comp) {
                    let tail = &order[order.len() - need..];
                    ones.push(back[tail[0]]);
                    zeros.extend(tail[1..].iter().map(|&v| back[v]));
                    need = 0;
                } else if let Some(order) = recognize::cycle_order(&sub, comp) {
                    let arc = &order[order.len() - need..];
                    if arc.len() == 1 {
                        twos.push(back[arc[0]]);
                    } else {
                        ones.push(back[arc[0]]);
                        ones.push(back[*arc.last().unwrap()]);
                        zeros.extend(arc[1..arc.len() - 1].iter().map(|&v| back[v]));
                    }
                    need = 0;
                } else {
                    return Err(Error::NotInFamilyG2(format!(
                        "small component containing vertex {} is neither a path nor a cycle",
                        back[comp[0]]
                    )));
                }
            }
            zeros.sort_unstable();
            ones.sort_unstable();
            zeros.extend(ones);
            zeros.extend(twos);
            zeros
        };
        for &v in &block {
            alive[v] = false;
        }
        left -= 4;
        peeled.push(block);
    }
    let residue: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut blocks = Vec::with_capacity(peeled.len() + 1);
    if !residue.is_empty() {
        blocks.push(residue);
    }
    blocks.extend(peeled.into_iter().rev());
    let p = SpecialPartition { k: 4, mode: Mode::Proper, blocks };
    let cert = verify_special_partition(g, &p);
    if !cert.valid {
        return Err(Error::NotInFamilyG2(format!(
            "peeling produced an invalid partition: {:?}",
            cert.violation
        )));
    }
    Ok(p)
}

/// Special 5-partition of a grid with four factors, with arbor budgets.
/// Blocks are peeled from the lexicographic front: the three smallest
/// remaining vertices, then twice a remaining neighbour of the smallest
/// (falling back to the smallest vertex not yet taken), so the first
/// block vertex keeps at most one remaining neighbour.
pub fn partition_4d_lex(spec: &GridSpec) -> Result<SpecialPartition> {
    if spec.dim() != 4 {
        return Err(Error::NotFourDimensional(spec.dims().to_vec()));
    }
    let g = spec.build();
    let n = g.n();
    let mut alive = vec![true; n];
    let mut left = n;
    let mut peeled: Vec<Vec<usize>> = Vec::new();
    while left > 5 {
        let mut block: Vec<usize> = (0..n).filter(|&v| alive[v]).take(3).collect();
        while block.len() < 5 {
            let x1 = block[0];
            let next = g
                .neighbours(x1)
                .iter()
                .copied()
                .find(|&u| alive[u] && !block.contains(&u))
                .or_else(|| (0..n).find(|&v| alive[v] && !block.contains(&v)))
                .expect("more than five vertices remain");
            block.push(next);
        }
        for &v in &block {
            alive[v] = false;
        }
        left -= 5;
        peeled.push(block);
    }
    let residue: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
    let mut blocks = Vec::with_capacity(peeled.len() + 1);
    if !residue.is_empty() {
        blocks.push(residue);
    }
    blocks.extend(peeled.into_iter().rev());
    let p = SpecialPartition { k: 5, mode: Mode::Arbor, blocks };
    let cert = verify_special_partition(&g, &p);
    if !cert.valid {
        return Err(Error::ConstructionFailed(format!(
            "lexicographic peel violated its budget: {:?}",
            cert.violation
        )));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn path(n: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((n - 1, 0));
        Graph::from_edges(n, &edges).unwrap()
    }

    fn grid(dims: &[usize]) -> Graph {
        GridSpec::new(dims.to_vec()).unwrap().build()
    }

    fn block_sizes(p: &SpecialPartition) -> Vec<usize> {
        p.blocks.iter().map(Vec::len).collect()
    }

    #[test]
    fn verify_accepts_tail_blocks_of_a_path() {
        let g = path(4);
        let p = SpecialPartition { k: 2, mode: Mode::Proper, blocks: vec![vec![2, 3], vec![0, 1]] };
        assert!(verify_special_partition(&g, &p).valid);
    }

    #[test]
    fn verify_reports_first_budget_violation() {
        let g = path(4);
        let p = SpecialPartition { k: 2, mode: Mode::Proper, blocks: vec![vec![2, 3], vec![1, 0]] };
        let cert = verify_special_partition(&g, &p);
        assert!(!cert.valid);
        assert_eq!(
            cert.violation,
            Some(Violation::OrderingBudget { block: 1, pos: 0, vertex: 1, found: 1, allowed: 0 })
        );
    }

    #[test]
    fn arbor_budgets_accept_what_proper_rejects() {
        let g = path(4);
        let p = SpecialPartition { k: 2, mode: Mode::Arbor, blocks: vec![vec![2, 3], vec![1, 0]] };
        assert!(verify_special_partition(&g, &p).valid);
    }

    #[test]
    fn verify_rejects_short_middle_block() {
        let g = path(5);
        let p = SpecialPartition {
            k: 2,
            mode: Mode::Proper,
            blocks: vec![vec![4], vec![3], vec![0, 1, 2]],
        };
        let cert = verify_special_partition(&g, &p);
        assert_eq!(
            cert.violation,
            Some(Violation::BlockSize { block: 1, size: 1, expected: "exactly 2".into() })
        );
    }

    #[test]
    fn verify_rejects_repeated_vertex() {
        let g = path(4);
        let p = SpecialPartition {
            k: 2,
            mode: Mode::Proper,
            blocks: vec![vec![2, 3], vec![1, 1]],
        };
        let cert = verify_special_partition(&g, &p);
        assert_eq!(cert.violation, Some(Violation::NotAPartition { vertex: 1 }));
    }

    #[test]
    fn verify_accepts_single_block_within_cap() {
        let g = path(3);
        let p = SpecialPartition { k: 3, mode: Mode::Proper, blocks: vec![vec![0, 1, 2]] };
        assert!(verify_special_partition(&g, &p).valid);
    }

    #[test]
    fn rainbow_injective_colouring_gives_one_block() {
        let g = path(4);
        let c = Colouring::new(vec![1, 2, 3, 4]);
        let rp = find_rainbow_partition(&g, &c, 4).unwrap();
        assert_eq!(rp.blocks, vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn rainbow_partition_merges_into_two_triples() {
        let g = Graph::empty(6);
        let c = Colouring::new(vec![1, 1, 2, 2, 3, 3]);
        let rp = find_rainbow_partition(&g, &c, 3).unwrap();
        assert_eq!(rp.blocks.len(), 2);
        for block in &rp.blocks {
            let distinct: BTreeSet<u32> = block.iter().map(|&v| rp.colours[v]).collect();
            assert_eq!(distinct.len(), block.len());
        }
    }

    #[test]
    fn rainbow_partition_handles_unequal_classes() {
        let g = Graph::empty(5);
        let c = Colouring::new(vec![1, 1, 1, 2, 2]);
        let rp = find_rainbow_partition(&g, &c, 2).unwrap();
        assert_eq!(rp.blocks.len(), 3);
        let covered: usize = rp.blocks.iter().map(Vec::len).sum();
        assert_eq!(covered, 5);
        for block in &rp.blocks {
            let distinct: BTreeSet<u32> = block.iter().map(|&v| rp.colours[v]).collect();
            assert_eq!(distinct.len(), block.len());
        }
    }

    #[test]
    fn rainbow_partition_rejects_oversized_class() {
        let g = Graph::empty(3);
        let c = Colouring::new(vec![1, 1, 1]);
        assert!(matches!(
            find_rainbow_partition(&g, &c, 3),
            Err(Error::PreconditionViolated(_))
        ));
    }

    fn two_rainbow_triples() -> RainbowPartition {
        RainbowPartition {
            k: 3,
            blocks: vec![vec![0, 1, 2], vec![3, 4, 5]],
            colours: vec![1, 2, 3, 1, 2, 3],
        }
    }

    #[test]
    fn downscale_at_k_rechunks_without_loss() {
        let g = Graph::empty(6);
        let rp = two_rainbow_triples();
        let out = downscale_partition(&g, &rp, 3).unwrap();
        assert_eq!(out.blocks.len(), 2);
        assert!(out.blocks.iter().all(|b| b.len() == 3));
    }

    #[test]
    fn downscale_to_pairs_keeps_blocks_rainbow() {
        let g = Graph::empty(6);
        let rp = two_rainbow_triples();
        let out = downscale_partition(&g, &rp, 2).unwrap();
        assert_eq!(out.blocks.len(), 3);
        for block in &out.blocks {
            assert_eq!(block.len(), 2);
            assert_ne!(out.colours[block[0]], out.colours[block[1]]);
        }
    }

    #[test]
    fn downscale_to_singletons() {
        let g = Graph::empty(6);
        let out = downscale_partition(&g, &two_rainbow_triples(), 1).unwrap();
        assert_eq!(out.blocks.len(), 6);
    }

    #[test]
    fn downscale_rejects_x_above_k() {
        let g = Graph::empty(6);
        assert!(matches!(
            downscale_partition(&g, &two_rainbow_triples(), 4),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn engine_balances_identical_lists_on_a_path() {
        let g = path(6);
        let p = partition_linear_forest(&g, 2).unwrap();
        let lists = ListAssignment::identical(6, 2);
        let colouring = colour_via_partition(&g, &p, &lists, 2).unwrap();
        let sizes: Vec<usize> = colouring.class_sizes().values().copied().collect();
        assert_eq!(sizes, vec![3, 3]);
        assert_eq!(colouring.witness_blocks.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn engine_single_block_uses_distinct_colours() {
        let g = path(3);
        let p = SpecialPartition { k: 3, mode: Mode::Proper, blocks: vec![vec![0, 1, 2]] };
        let lists = ListAssignment::identical(3, 3);
        let colouring = colour_via_partition(&g, &p, &lists, 3).unwrap();
        let distinct: BTreeSet<u32> = colouring.colours.iter().copied().collect();
        assert_eq!(distinct.len(), 3);
    }

    #[test]
    fn engine_colours_grid_partition_with_arbor_budgets() {
        let g = grid(&[3, 3]);
        let proper = partition_g2(&g).unwrap();
        let p = SpecialPartition { k: 4, mode: Mode::Arbor, blocks: proper.blocks };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let pool: Vec<u32> = (1..=8).collect();
        for _ in 0..20 {
            let lists = ListAssignment::random_uniform(9, 4, &pool, &mut rng);
            let colouring = colour_via_partition(&g, &p, &lists, 4).unwrap();
            let cert =
                verify_colouring(&g, Some(&lists), &colouring, Mode::Arbor, 4, SizeRule::AtMostCeil);
            assert!(cert.valid, "{:?}", cert.violation);
        }
    }

    #[test]
    fn engine_colours_above_k_with_larger_lists() {
        let g = path(7);
        let p = partition_linear_forest(&g, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let pool: Vec<u32> = (1..=10).collect();
        for t in 3..=6 {
            for _ in 0..10 {
                let lists = ListAssignment::random_uniform(7, t, &pool, &mut rng);
                let colouring = colour_via_partition(&g, &p, &lists, t).unwrap();
                assert!(colouring.class_sizes().values().all(|&s| s <= ceil_div(7, t)));
            }
        }
    }

    #[test]
    fn engine_rejects_t_below_k() {
        let g = path(6);
        let p = partition_linear_forest(&g, 3).unwrap();
        let lists = ListAssignment::identical(6, 2);
        assert!(matches!(
            colour_via_partition(&g, &p, &lists, 2),
            Err(Error::PreconditionViolated(_))
        ));
    }

    #[test]
    fn linear_forest_strips_path_tails() {
        let g = path(7);
        let p = partition_linear_forest(&g, 3).unwrap();
        assert_eq!(block_sizes(&p), vec![1, 3, 3]);
    }

    #[test]
    fn linear_forest_single_short_block() {
        let g = path(2);
        let p = partition_linear_forest(&g, 2).unwrap();
        assert_eq!(block_sizes(&p), vec![2]);
    }

    #[test]
    fn linear_forest_crosses_components() {
        let edges = [(0, 1), (1, 2), (3, 4), (4, 5)];
        let g = Graph::from_edges(6, &edges).unwrap();
        let p = partition_linear_forest(&g, 2).unwrap();
        assert_eq!(block_sizes(&p), vec![2, 2, 2]);
    }

    #[test]
    fn linear_forest_rejects_cycles() {
        assert!(matches!(
            partition_linear_forest(&cycle(4), 2),
            Err(Error::NotLinearForest(_))
        ));
    }

    #[test]
    fn degree_two_strips_cycle_arcs() {
        let g = cycle(7);
        let p = partition_degree_two(&g, 3).unwrap();
        assert_eq!(block_sizes(&p), vec![1, 3, 3]);
    }

    #[test]
    fn g1_peels_a_ladder_into_triples() {
        let g = grid(&[3, 2]);
        let p = partition_g1(&g).unwrap();
        assert_eq!(block_sizes(&p), vec![3, 3]);
    }

    #[test]
    fn g1_single_edge_is_one_block() {
        let g = path(2);
        let p = partition_g1(&g).unwrap();
        assert_eq!(block_sizes(&p), vec![2]);
    }

    #[test]
    fn g1_handles_ladder_minus_corner() {
        let edges =
            [(0, 1), (2, 3), (4, 5), (0, 2), (2, 4), (4, 6), (1, 3), (3, 5)];
        let g = Graph::from_edges(7, &edges).unwrap();
        let p = partition_g1(&g).unwrap();
        assert_eq!(block_sizes(&p), vec![1, 3, 3]);
    }

    #[test]
    fn g1_rejects_a_six_cycle() {
        assert!(matches!(partition_g1(&cycle(6)), Err(Error::NotInFamilyG1(_))));
    }

    #[test]
    fn g2_square_is_a_single_block() {
        let g = grid(&[2, 2]);
        let p = partition_g2(&g).unwrap();
        assert_eq!(block_sizes(&p), vec![4]);
    }

    #[test]
    fn g2_splits_a_ladder() {
        let g = grid(&[3, 2]);
        let p = partition_g2(&g).unwrap();
        assert_eq!(block_sizes(&p), vec![2, 4]);
    }

    fn staircase_5_3_3() -> Graph {
        let cells: Vec<(usize, usize)> = vec![
            (1, 1),
            (1, 2),
            (1, 3),
            (2, 1),
            (2, 2),
            (2, 3),
            (3, 1),
            (4, 1),
            (5, 1),
        ];
        let id = |a: usize, b: usize| cells.iter().position(|&c| c == (a, b));
        let mut edges = Vec::new();
        for &(a, b) in &cells {
            for (na, nb) in [(a + 1, b), (a, b + 1)] {
                if let (Some(u), Some(v)) = (id(a, b), id(na, nb)) {
                    edges.push((u, v));
                }
            }
        }
        Graph::from_edges(cells.len(), &edges).unwrap()
    }

    #[test]
    fn g2_peels_a_staircase() {
        let p = partition_g2(&staircase_5_3_3()).unwrap();
        assert_eq!(block_sizes(&p), vec![1, 4, 4]);
    }

    #[test]
    fn g2_fills_blocks_across_small_components() {
        let edges = [(0, 1), (1, 2), (3, 4), (4, 5)];
        let g = Graph::from_edges(6, &edges).unwrap();
        let p = partition_g2(&g).unwrap();
        assert_eq!(block_sizes(&p), vec![2, 4]);
    }

    #[test]
    fn fourd_peels_the_binary_hypercube() {
        let spec = GridSpec::new(vec![2, 2, 2, 2]).unwrap();
        let p = partition_4d_lex(&spec).unwrap();
        assert_eq!(p.mode, Mode::Arbor);
        assert_eq!(block_sizes(&p), vec![1, 5, 5, 5]);
    }

    #[test]
    fn fourd_peels_a_wider_grid() {
        let spec = GridSpec::new(vec![3, 2, 2, 2]).unwrap();
        let p = partition_4d_lex(&spec).unwrap();
        assert_eq!(block_sizes(&p), vec![4, 5, 5, 5, 5]);
    }

    #[test]
    fn fourd_requires_four_factors() {
        let spec = GridSpec::new(vec![2, 2, 2]).unwrap();
        assert!(matches!(
            partition_4d_lex(&spec),
            Err(Error::NotFourDimensional(_))
        ));
    }

    #[test]
    fn fourd_small_grid_is_one_block() {
        let spec = GridSpec::new(vec![2, 2, 1, 1]).unwrap();
        let p = partition_4d_lex(&spec).unwrap();
        assert_eq!(block_sizes(&p), vec![4]);
    }

    #[test]
    fn special_partition_round_trips_through_json() {
        let p = SpecialPartition {
            k: 2,
            mode: Mode::Proper,
            blocks: vec![vec![2, 3], vec![0, 1]],
        };
        let text = serde_json::to_string(&p).unwrap();
        let back: SpecialPartition = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
