//! Constructive equitable list colourers for the families where a direct
//! schedule exists: bipartite graphs of maximum degree two, ladder-like
//! unions, two-dimensional grids at k = 3, and height-two slabs at k = 4.
//!
//! The grid and slab colourers share one plan. The longest factor is cut
//! into slices of three (grids) or four (slab) vertices; leftover columns
//! and every component too narrow to slice form a prefix that an existing
//! partition route colours first. Slices are then coloured row by row,
//! rainbow whenever possible, and otherwise with a repeated colour chosen
//! so that merging the slice with the one below it still splits into two
//! rainbow sets. A backward pass performs exactly that merge, so the final
//! witness again has ceil(n / k) rainbow blocks.

use std::collections::{BTreeMap, BTreeSet};

use crate::colouring::{verify_colouring, Colouring, ListAssignment, Mode, SizeRule};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partitions;
use crate::recognize::{self, Grid2dShape, SlabShape};

/// Shape of the core left after repeatedly deleting degree-one vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoreKind {
    /// The whole graph was a tree.
    SingleVertex,
    /// An even cycle of the given length.
    EvenCycle { length: usize },
    /// Two branch vertices joined by three internally disjoint paths with
    /// edge counts 2, 2 and `long_path`, the last one even.
    Theta { long_path: usize },
}

/// Outcome of the 2-choosability test for a connected graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwoChoosability {
    TwoChoosable(CoreKind),
    NotTwoChoosable,
}

/// Decides whether a connected graph is 2-choosable by reducing it to its
/// core and matching the core against the three admissible shapes: a
/// single vertex, an even cycle, or a theta graph with path lengths
/// 2, 2 and an even third length.
pub fn classify_two_choosable(g: &Graph) -> Result<TwoChoosability> {
    if g.n() == 0 || g.components().len() != 1 {
        return Err(Error::NotConnected);
    }
    let mut alive = vec![true; g.n()];
    let mut degree: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut left = g.n();
    while let Some(v) = (0..g.n()).find(|&v| alive[v] && degree[v] == 1) {
        alive[v] = false;
        left -= 1;
        for &u in g.neighbours(v) {
            if alive[u] {
                degree[u] -= 1;
            }
        }
    }
    if left == 1 {
        return Ok(TwoChoosability::TwoChoosable(CoreKind::SingleVertex));
    }
    let core: Vec<usize> = (0..g.n()).filter(|&v| alive[v]).collect();
    if core.iter().all(|&v| degree[v] == 2) {
        if left % 2 == 0 {
            return Ok(TwoChoosability::TwoChoosable(CoreKind::EvenCycle { length: left }));
        }
        return Ok(TwoChoosability::NotTwoChoosable);
    }
    let branch: Vec<usize> = core.iter().copied().filter(|&v| degree[v] == 3).collect();
    if branch.len() != 2 || core.iter().any(|&v| degree[v] > 3) {
        return Ok(TwoChoosability::NotTwoChoosable);
    }
    let (u, w) = (branch[0], branch[1]);
    let mut lengths = Vec::new();
    for &start in g.neighbours(u) {
        if !alive[start] {
            continue;
        }
        let (mut prev, mut cur, mut len) = (u, start, 1);
        while degree[cur] == 2 {
            let next = g
                .neighbours(cur)
                .iter()
                .copied()
                .find(|&x| alive[x] && x != prev)
                .expect("degree-two core vertex has a second live neighbour");
            prev = cur;
            cur = next;
            len += 1;
        }
        if cur != w {
            return Ok(TwoChoosability::NotTwoChoosable);
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    let internal: usize = lengths.iter().map(|l| l - 1).sum();
    if lengths.len() == 3
        && internal + 2 == left
        && lengths[0] == 2
        && lengths[1] == 2
        && lengths[2] % 2 == 0
    {
        return Ok(TwoChoosability::TwoChoosable(CoreKind::Theta { long_path: lengths[2] }));
    }
    Ok(TwoChoosability::NotTwoChoosable)
}

fn pick_other(list: &[u32], banned: Option<u32>) -> u32 {
    list.iter().copied().find(|&c| Some(c) != banned).expect("2-uniform list beats one ban")
}

/// Properly colours a bipartite graph of maximum degree two from 2-uniform
/// lists. Path components are coloured greedily end to end and chained, so
/// the first vertex of each path also avoids the colour closing the
/// previous one; the chain behaves like a single long path and keeps both
/// classes within ceil(n / 2). An even cycle is rotated to start at an
/// adjacent pair with unequal lists and coloured the long way round; when
/// every list on the cycle is the same the two colours alternate.
pub fn list_colour_deg2(g: &Graph, lists: &ListAssignment) -> Result<Colouring> {
    let n = g.n();
    if lists.k() != 2 {
        return Err(Error::PreconditionViolated(format!(
            "expected 2-uniform lists, got k = {}",
            lists.k()
        )));
    }
    check_deg2_input(g, lists)?;
    let mut colours: Vec<Option<u32>> = vec![None; n];
    let mut seam: Option<u32> = None;
    for comp in g.components() {
        if let Some(order) = recognize::path_order(g, &comp) {
            for &v in &order {
                let c = pick_other(lists.list(v), seam);
                colours[v] = Some(c);
                seam = Some(c);
            }
        } else {
            let order = recognize::cycle_order(g, &comp)
                .expect("components of a degree-two graph are paths or cycles");
            colour_even_cycle(lists, &order, &mut colours);
        }
    }
    let flat: Vec<u32> = colours.into_iter().map(|c| c.expect("all vertices coloured")).collect();
    let colouring = Colouring::new(flat);
    let cap = n.div_ceil(2);
    assert!(
        colouring.class_sizes().values().all(|&s| s <= cap),
        "chained paths and even cycles bound both classes by ceil(n / 2)"
    );
    Ok(colouring)
}

fn check_deg2_input(g: &Graph, lists: &ListAssignment) -> Result<()> {
    if lists.n() != g.n() {
        return Err(Error::PreconditionViolated(format!(
            "lists cover {} vertices, graph has {}",
            lists.n(),
            g.n()
        )));
    }
    if g.max_degree() > 2 {
        return Err(Error::PreconditionViolated(format!(
            "maximum degree {} exceeds two",
            g.max_degree()
        )));
    }
    if g.bipartition().is_none() {
        return Err(Error::PreconditionViolated("graph contains an odd cycle".into()));
    }
    Ok(())
}

fn colour_even_cycle(lists: &ListAssignment, order: &[usize], colours: &mut [Option<u32>]) {
    let m = order.len();
    let start = (0..m).find(|&i| lists.list(order[i]) != lists.list(order[(i + 1) % m]));
    let Some(i) = start else {
        let list = lists.list(order[0]);
        for (pos, &v) in order.iter().enumerate() {
            colours[v] = Some(list[pos % 2]);
        }
        return;
    };
    let u = order[i];
    let v = order[(i + 1) % m];
    let cu = lists
        .list(u)
        .iter()
        .copied()
        .find(|&c| !lists.contains(v, c))
        .expect("unequal lists of equal size differ by an element");
    colours[u] = Some(cu);
    let mut prev = cu;
    for step in 1..m {
        let w = order[(i + m - step) % m];
        let c = pick_other(lists.list(w), Some(prev));
        colours[w] = Some(c);
        prev = c;
    }
}

/// Equitably list-colours a bipartite graph of maximum degree two from
/// k-uniform lists, k >= 2, attaching a rainbow partition witness. k = 2
/// colours directly and regroups the classes; k >= 3 strips blocks of k
/// consecutive path or cycle vertices and runs the partition engine.
pub fn equitable_choose_deg2(g: &Graph, lists: &ListAssignment) -> Result<Colouring> {
    let k = lists.k();
    if k < 2 {
        return Err(Error::PreconditionViolated(format!("k = {k} must be at least 2")));
    }
    check_deg2_input(g, lists)?;
    if g.n() == 0 {
        return Ok(Colouring::with_witness(Vec::new(), Vec::new()));
    }
    if k == 2 {
        let base = list_colour_deg2(g, lists)?;
        let rp = partitions::find_rainbow_partition(g, &base, 2)?;
        return checked(g, lists, Colouring::with_witness(base.colours, rp.blocks), 2);
    }
    let p = partitions::partition_degree_two(g, k)?;
    partitions::colour_via_partition(g, &p, lists, k)
}

/// Equitably k-list-colours a disjoint union of 2-dimensional grid
/// components for k >= 3. k = 3 runs the slice schedule; k >= 4 builds the
/// staircase-grid partition and hands it to the engine.
pub fn equitable_choose_grid2d(g: &Graph, lists: &ListAssignment) -> Result<Colouring> {
    let k = lists.k();
    if k < 3 {
        return Err(Error::PreconditionViolated(format!("k = {k} must be at least 3")));
    }
    if lists.n() != g.n() {
        return Err(Error::PreconditionViolated(format!(
            "lists cover {} vertices, graph has {}",
            lists.n(),
            g.n()
        )));
    }
    if k == 3 {
        return equitable_choose_grid2d_k3(g, lists);
    }
    if g.n() == 0 {
        return Ok(Colouring::with_witness(Vec::new(), Vec::new()));
    }
    let p = partitions::partition_g2(g)?;
    partitions::colour_via_partition(g, &p, lists, k)
}

/// Equitably 3-list-colours a disjoint union of 2-dimensional grid
/// components. Components with both factors at least three are sliced
/// along the longer factor into vertical triples; leftover columns and
/// every narrow component join a prefix coloured through the ladder-family
/// partition. The slices are coloured row by row and repartitioned
/// backwards into a rainbow 3-partition witness.
pub fn equitable_choose_grid2d_k3(g: &Graph, lists: &ListAssignment) -> Result<Colouring> {
    let n = g.n();
    if lists.k() != 3 {
        return Err(Error::PreconditionViolated(format!(
            "expected 3-uniform lists, got k = {}",
            lists.k()
        )));
    }
    if lists.n() != n {
        return Err(Error::PreconditionViolated(format!(
            "lists cover {} vertices, graph has {n}",
            lists.n()
        )));
    }
    if n == 0 {
        return Ok(Colouring::with_witness(Vec::new(), Vec::new()));
    }
    let mut sliced: Vec<(Grid2dShape, usize, usize)> = Vec::new();
    let mut prefix: Vec<usize> = Vec::new();
    for comp in g.components() {
        match recognize::as_grid2d(g, &comp) {
            Some(shape) if shape.n2 >= 3 => {
                let q = shape.n1 / 3;
                let r = shape.n1 % 3;
                for a in 1..=r {
                    for b in 1..=shape.n2 {
                        prefix.push(shape.host(a, b));
                    }
                }
                sliced.push((shape, q, r));
            }
            Some(_) => prefix.extend(comp),
            None if recognize::path_order(g, &comp).is_some() => prefix.extend(comp),
            None => {
                return Err(Error::PreconditionViolated(format!(
                    "component containing vertex {} is not a 2-dimensional grid",
                    comp[0]
                )));
            }
        }
    }
    let mut colours: Vec<Option<u32>> = vec![None; n];
    let mut witness: Vec<Vec<usize>> = Vec::new();
    colour_prefix(g, lists, prefix, &mut colours, &mut witness, |h, hl| {
        let p = partitions::partition_g1(h)?;
        partitions::colour_via_partition(h, &p, hl, 3)
    })?;
    for (shape, q, r) in &sliced {
        let column = |i: usize, j: usize| {
            let x = r + 3 * (i - 1) + 1;
            vec![shape.host(x, j), shape.host(x + 1, j), shape.host(x + 2, j)]
        };
        colour_slices(g, lists, *q, shape.n2, column, &[(0, 1), (1, 2)], &mut colours, &mut witness)?;
    }
    let flat = colours.into_iter().map(|c| c.expect("all vertices coloured")).collect();
    checked(g, lists, Colouring::with_witness(flat, witness), 3)
}

/// Equitably 4-list-colours a disjoint union of height-two slabs and
/// 2-dimensional grid components. Each slab is cut along its longest
/// horizontal factor into four-vertex slices spanning both layers; an odd
/// leftover wall and all flat components form a prefix delegated to the
/// grid colourer. The backward repartition again yields a rainbow
/// 4-partition witness.
pub fn equitable_choose_slab_k4(g: &Graph, lists: &ListAssignment) -> Result<Colouring> {
    let n = g.n();
    if lists.k() != 4 {
        return Err(Error::PreconditionViolated(format!(
            "expected 4-uniform lists, got k = {}",
            lists.k()
        )));
    }
    if lists.n() != n {
        return Err(Error::PreconditionViolated(format!(
            "lists cover {} vertices, graph has {n}",
            lists.n()
        )));
    }
    if n == 0 {
        return Ok(Colouring::with_witness(Vec::new(), Vec::new()));
    }
    let mut sliced: Vec<(SlabShape, usize, usize)> = Vec::new();
    let mut prefix: Vec<usize> = Vec::new();
    for comp in g.components() {
        if let Some(shape) = recognize::as_slab(g, &comp) {
            let q = shape.n1 / 2;
            let r = shape.n1 % 2;
            if r == 1 {
                for b in 1..=shape.n2 {
                    for layer in 1..=2 {
                        prefix.push(shape.host(1, b, layer));
                    }
                }
            }
            sliced.push((shape, q, r));
        } else if comp.len() == 1
            || recognize::path_order(g, &comp).is_some()
            || recognize::as_grid2d(g, &comp).is_some()
        {
            prefix.extend(comp);
        } else {
            return Err(Error::PreconditionViolated(format!(
                "component containing vertex {} is neither a height-two slab nor a 2-dimensional grid",
                comp[0]
            )));
        }
    }
    let mut colours: Vec<Option<u32>> = vec![None; n];
    let mut witness: Vec<Vec<usize>> = Vec::new();
    colour_prefix(g, lists, prefix, &mut colours, &mut witness, equitable_choose_grid2d)?;
    for (shape, q, r) in &sliced {
        let window = |i: usize, j: usize| {
            let x = r + 2 * (i - 1) + 1;
            vec![
                shape.host(x, j, 1),
                shape.host(x, j, 2),
                shape.host(x + 1, j, 1),
                shape.host(x + 1, j, 2),
            ]
        };
        let rungs = [(0, 1), (2, 3), (0, 2), (1, 3)];
        colour_slices(g, lists, *q, shape.n2, window, &rungs, &mut colours, &mut witness)?;
    }
    let flat = colours.into_iter().map(|c| c.expect("all vertices coloured")).collect();
    checked(g, lists, Colouring::with_witness(flat, witness), 4)
}

fn checked(g: &Graph, lists: &ListAssignment, c: Colouring, k: usize) -> Result<Colouring> {
    let cert = verify_colouring(g, Some(lists), &c, Mode::Proper, k, SizeRule::AtMostCeil);
    if !cert.valid {
        return Err(Error::VerificationFailed(format!(
            "colourer output rejected: {:?}",
            cert.violation
        )));
    }
    Ok(c)
}

/// Colours the prefix subgraph induced by `prefix` with `colour_h` and
/// copies colours and witness blocks back to host vertex ids.
fn colour_prefix(
    g: &Graph,
    lists: &ListAssignment,
    mut prefix: Vec<usize>,
    colours: &mut [Option<u32>],
    witness: &mut Vec<Vec<usize>>,
    colour_h: impl Fn(&Graph, &ListAssignment) -> Result<Colouring>,
) -> Result<()> {
    if prefix.is_empty() {
        return Ok(());
    }
    prefix.sort_unstable();
    let (h, back) = g.induced(&prefix);
    let h_lists = ListAssignment::new(
        lists.k(),
        prefix.iter().map(|&v| lists.list(v).to_vec()).collect(),
    )?;
    let hc = colour_h(&h, &h_lists)?;
    for (sub, &host) in back.iter().enumerate() {
        colours[host] = Some(hc.colours[sub]);
    }
    let blocks = hc.witness_blocks.expect("prefix colourings carry a witness");
    for block in blocks {
        witness.push(block.into_iter().map(|v| back[v]).collect());
    }
    Ok(())
}

struct SliceState {
    verts: Vec<usize>,
    doubled: Vec<u32>,
}

/// Colours all slices of one component in row-major order, then merges
/// non-rainbow slices with the slice below them into pairs of rainbow
/// blocks appended to `witness`. `slice_verts(i, j)` lists the vertices of
/// slice i in row j, bottom-up along the sliced factor; `inner_edges`
/// names the adjacent index pairs inside one slice.
#[allow(clippy::too_many_arguments)]
fn colour_slices(
    g: &Graph,
    lists: &ListAssignment,
    q: usize,
    rows: usize,
    slice_verts: impl Fn(usize, usize) -> Vec<usize>,
    inner_edges: &[(usize, usize)],
    colours: &mut Vec<Option<u32>>,
    witness: &mut Vec<Vec<usize>>,
) -> Result<()> {
    let mut states: Vec<Vec<Option<SliceState>>> = (0..=q).map(|_| (0..=rows).map(|_| None).collect()).collect();
    for j in 1..=rows {
        for i in 1..=q {
            let verts = slice_verts(i, j);
            debug_assert!(inner_edges.iter().all(|&(a, b)| g.has_edge(verts[a], verts[b])));
            let below = if j >= 2 { states[i][j - 1].as_ref() } else { None };
            let state = colour_slice(g, lists, verts, inner_edges, below, colours)?;
            assert!(
                j > 1 || state.doubled.is_empty(),
                "first-row slices admit a rainbow colouring"
            );
            states[i][j] = Some(state);
        }
    }
    let mut consumed = vec![vec![false; rows + 1]; q + 1];
    for j in (1..=rows).rev() {
        for i in (1..=q).rev() {
            if consumed[i][j] {
                continue;
            }
            let state = states[i][j].take().expect("slice coloured");
            if state.doubled.is_empty() {
                witness.push(state.verts);
            } else {
                assert!(j >= 2, "non-rainbow slices never appear in the first row");
                consumed[i][j - 1] = true;
                let below = states[i][j - 1].take().expect("slice coloured");
                let mut merged = below.verts;
                merged.extend(state.verts);
                let (first, second) = split_rainbow(&merged, colours);
                witness.push(first);
                witness.push(second);
            }
        }
    }
    Ok(())
}

/// Picks colours for one slice. Every coloured neighbour bans its colour;
/// properness inside the still-uncoloured slice follows `inner_edges`.
/// Rainbow assignments win, lexicographically smallest first. Otherwise
/// the fallback must keep each repeated colour out of the slice below and
/// avoid every colour the slice below repeated, which is exactly what the
/// later merge into two rainbow sets needs.
fn colour_slice(
    g: &Graph,
    lists: &ListAssignment,
    verts: Vec<usize>,
    inner_edges: &[(usize, usize)],
    below: Option<&SliceState>,
    colours: &mut [Option<u32>],
) -> Result<SliceState> {
    let free: Vec<Vec<u32>> = verts
        .iter()
        .map(|&v| {
            let banned: BTreeSet<u32> =
                g.neighbours(v).iter().filter_map(|&u| colours[u]).collect();
            lists.list(v).iter().copied().filter(|c| !banned.contains(c)).collect()
        })
        .collect();
    let below_colours: BTreeSet<u32> = below
        .map(|s| s.verts.iter().map(|&v| colours[v].expect("slice below coloured")).collect())
        .unwrap_or_default();
    let below_doubled: Vec<u32> = below.map(|s| s.doubled.clone()).unwrap_or_default();

    let mut fallback: Option<(Vec<u32>, Vec<u32>)> = None;
    let mut chosen: Option<(Vec<u32>, Vec<u32>)> = None;
    if free.iter().all(|f| !f.is_empty()) {
        let mut idx = vec![0usize; verts.len()];
        'search: loop {
            let cand: Vec<u32> = idx.iter().zip(&free).map(|(&p, f)| f[p]).collect();
            if inner_edges.iter().all(|&(a, b)| cand[a] != cand[b]) {
                let mut mult: BTreeMap<u32, usize> = BTreeMap::new();
                for &c in &cand {
                    *mult.entry(c).or_insert(0) += 1;
                }
                let doubled: Vec<u32> =
                    mult.iter().filter(|&(_, &m)| m >= 2).map(|(&c, _)| c).collect();
                if doubled.is_empty() {
                    chosen = Some((cand, doubled));
                    break 'search;
                }
                if fallback.is_none()
                    && below.is_some()
                    && doubled.iter().all(|c| !below_colours.contains(c))
                    && below_doubled.iter().all(|c| !cand.contains(c))
                {
                    fallback = Some((cand, doubled));
                }
            }
            let mut pos = idx.len();
            loop {
                if pos == 0 {
                    break 'search;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < free[pos].len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
    let Some((assignment, doubled)) = chosen.or(fallback) else {
        return Err(Error::ConstructionFailed(format!(
            "no admissible colouring for the slice at vertices {verts:?}"
        )));
    };
    for (&v, &c) in verts.iter().zip(&assignment) {
        colours[v] = Some(c);
    }
    Ok(SliceState { verts, doubled })
}

/// Splits the union of two merged slices into two equal rainbow blocks.
/// The slice rules cap every colour at two occurrences; doubled colours
/// contribute one vertex to each half and the rest fill up the first half.
fn split_rainbow(merged: &[usize], colours: &[Option<u32>]) -> (Vec<usize>, Vec<usize>) {
    let half = merged.len() / 2;
    let mut groups: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for &v in merged {
        groups.entry(colours[v].expect("merged slices coloured")).or_default().push(v);
    }
    let mut first = Vec::with_capacity(half);
    let mut second = Vec::with_capacity(half);
    for vs in groups.values() {
        assert!(vs.len() <= 2, "merged slices repeat a colour at most twice");
        if vs.len() == 2 {
            first.push(vs[0]);
            second.push(vs[1]);
        }
    }
    for vs in groups.values() {
        if vs.len() == 1 {
            if first.len() < half {
                first.push(vs[0]);
            } else {
                second.push(vs[0]);
            }
        }
    }
    assert!(first.len() == half && second.len() == half, "merged slices split evenly");
    (first, second)
}
