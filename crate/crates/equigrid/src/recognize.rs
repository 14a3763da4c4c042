//! Structural recognition of the component shapes the colourers consume:
//! paths, cycles, ladders, two-dimensional grids with or without a notched
//! corner region, and slabs (grids with a factor of two). Everything is
//! built on one small exact-isomorphism backtracker, which is fast here
//! because these targets are rigid and degree-constrained.

use crate::graph::Graph;
use crate::grid::GridSpec;

/// Exact isomorphism from `target` onto the subgraph of `g` induced by
/// `comp`. Returns `map` with `map[target_vertex] = host_vertex`.
pub fn find_embedding(g: &Graph, comp: &[usize], target: &Graph) -> Option<Vec<usize>> {
    let (sub, back) = g.induced(comp);
    let map = isomorphism(&sub, target)?;
    Some(map.into_iter().map(|v| back[v]).collect())
}

/// Isomorphism between whole graphs; `map[target_vertex] = g_vertex`.
fn isomorphism(g: &Graph, target: &Graph) -> Option<Vec<usize>> {
    let n = target.n();
    if g.n() != n || g.m() != target.m() {
        return None;
    }
    let mut g_degs: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut t_degs: Vec<usize> = (0..n).map(|v| target.degree(v)).collect();
    g_degs.sort_unstable();
    t_degs.sort_unstable();
    if g_degs != t_degs {
        return None;
    }
    if n == 0 {
        return Some(Vec::new());
    }
    // BFS order of the target so every vertex after the first connects to an
    // earlier one; recognisable targets are connected.
    let order = bfs_order(target);
    if order.len() != n {
        return None;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    if assign(g, target, &order, 0, &mut map, &mut used) {
        Some(map)
    } else {
        None
    }
}

fn bfs_order(g: &Graph) -> Vec<usize> {
    let mut order = Vec::with_capacity(g.n());
    let mut seen = vec![false; g.n()];
    let mut queue = std::collections::VecDeque::new();
    seen[0] = true;
    queue.push_back(0);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in g.neighbours(u) {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    order
}

fn assign(
    g: &Graph,
    target: &Graph,
    order: &[usize],
    pos: usize,
    map: &mut Vec<usize>,
    used: &mut Vec<bool>,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let t = order[pos];
    let earlier: Vec<usize> = target
        .neighbours(t)
        .iter()
        .copied()
        .filter(|&e| map[e] != usize::MAX)
        .collect();
    let try_candidate = |cand: usize, map: &mut Vec<usize>, used: &mut Vec<bool>| -> bool {
        if used[cand]
            || g.degree(cand) != target.degree(t)
            || !earlier.iter().all(|&e| g.has_edge(cand, map[e]))
        {
            return false;
        }
        map[t] = cand;
        used[cand] = true;
        if assign(g, target, order, pos + 1, map, used) {
            return true;
        }
        map[t] = usize::MAX;
        used[cand] = false;
        false
    };
    match earlier.first() {
        None => {
            for cand in 0..g.n() {
                if try_candidate(cand, map, used) {
                    return true;
                }
            }
        }
        Some(&anchor) => {
            let pivot = map[anchor];
            for &cand in g.neighbours(pivot) {
                if try_candidate(cand, map, used) {
                    return true;
                }
            }
        }
    }
    false
}

/// The vertices of `comp` in path order, if the component is a path
/// (including a single vertex). Starts from the lower-id endpoint.
pub fn path_order(g: &Graph, comp: &[usize]) -> Option<Vec<usize>> {
    if comp.len() == 1 {
        return Some(comp.to_vec());
    }
    let inside = |v: usize| comp.binary_search(&v).is_ok();
    let deg = |v: usize| g.neighbours(v).iter().filter(|&&w| inside(w)).count();
    let mut ends = comp.iter().copied().filter(|&v| deg(v) == 1);
    let start = ends.next()?;
    if comp.iter().any(|&v| deg(v) > 2) {
        return None;
    }
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < comp.len() {
        let next = g
            .neighbours(cur)
            .iter()
            .copied()
            .find(|&w| inside(w) && w != prev)?;
        order.push(next);
        prev = cur;
        cur = next;
    }
    if deg(cur) == 1 {
        Some(order)
    } else {
        None
    }
}

/// The vertices of `comp` in cyclic order, if the component is a cycle.
/// Starts at the smallest vertex and moves towards its smaller neighbour.
pub fn cycle_order(g: &Graph, comp: &[usize]) -> Option<Vec<usize>> {
    if comp.len() < 3 {
        return None;
    }
    let inside = |v: usize| comp.binary_search(&v).is_ok();
    for &v in comp {
        if g.neighbours(v).iter().filter(|&&w| inside(w)).count() != 2 {
            return None;
        }
    }
    let start = comp[0];
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < comp.len() {
        let next = g
            .neighbours(cur)
            .iter()
            .copied()
            .find(|&w| inside(w) && w != prev)?;
        if next == start {
            return None;
        }
        order.push(next);
        prev = cur;
        cur = next;
    }
    if g.has_edge(cur, start) {
        Some(order)
    } else {
        None
    }
}

/// A two-dimensional grid embedding of a component: dimensions plus the
/// host vertex at each 1-based `(column, row)` coordinate.
#[derive(Debug, Clone)]
pub struct Grid2dShape {
    pub n1: usize,
    pub n2: usize,
    /// `at[(a - 1) * n2 + (b - 1)] = host vertex at (a, b)`.
    pub at: Vec<usize>,
}

impl Grid2dShape {
    pub fn host(&self, a: usize, b: usize) -> usize {
        self.at[(a - 1) * self.n2 + (b - 1)]
    }
}

/// Recognises a full two-dimensional grid with both sides at least 2,
/// preferring the orientation with `n1 >= n2`.
pub fn as_grid2d(g: &Graph, comp: &[usize]) -> Option<Grid2dShape> {
    let s = comp.len();
    let mut shapes = Vec::new();
    for n2 in 2..=s {
        if s % n2 == 0 {
            let n1 = s / n2;
            if n1 >= n2 {
                shapes.push((n1, n2));
            }
        }
    }
    shapes.sort_unstable();
    shapes.reverse();
    for (n1, n2) in shapes {
        let spec = GridSpec::new(vec![n1, n2]).expect("small dims");
        if let Some(map) = find_embedding(g, comp, &spec.build()) {
            return Some(Grid2dShape { n1, n2, at: map });
        }
    }
    None
}

/// A grid with a two-row notch cut from the high end of the first axis:
/// the vertex set of `P_{n1} x P_{n2}` minus `(a, b)` for `a > n1 - steps`
/// and `b > n2 - 2`. `steps = 0` is the full grid. Rows `1..=n2-2` always
/// span every column; the last two rows stop at column `n1 - steps`.
#[derive(Debug, Clone)]
pub struct NotchedShape {
    pub n1: usize,
    pub n2: usize,
    pub steps: usize,
    at: std::collections::HashMap<(usize, usize), usize>,
}

impl NotchedShape {
    pub fn host(&self, a: usize, b: usize) -> usize {
        self.at[&(a, b)]
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.at.contains_key(&(a, b))
    }

    pub fn coords(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.at.keys().copied()
    }
}

/// Builds the notched target graph along with its coordinate labels.
fn notched_target(n1: usize, n2: usize, steps: usize) -> (Graph, Vec<(usize, usize)>) {
    let mut coords = Vec::new();
    for a in 1..=n1 {
        for b in 1..=n2 {
            if a > n1 - steps && b > n2 - 2 {
                continue;
            }
            coords.push((a, b));
        }
    }
    let idx = |a: usize, b: usize| coords.binary_search(&(a, b)).ok();
    let mut edges = Vec::new();
    for (i, &(a, b)) in coords.iter().enumerate() {
        if let Some(j) = idx(a + 1, b) {
            edges.push((i, j));
        }
        if let Some(j) = idx(a, b + 1) {
            edges.push((i, j));
        }
    }
    (Graph::from_edges(coords.len(), &edges).expect("simple by construction"), coords)
}

/// Recognises a (possibly notched) grid with `n2 >= 2`. Full grids are
/// preferred over notched representations of the same component, and paths
/// are rejected (callers handle those separately).
pub fn as_notched_grid(g: &Graph, comp: &[usize]) -> Option<NotchedShape> {
    let s = comp.len();
    if path_order(g, comp).is_some() {
        return None;
    }
    let mut candidates = Vec::new();
    for n2 in 2..=s {
        for n1 in 1..=s {
            let full = n1 * n2;
            if full < s || (full - s) % 2 != 0 {
                continue;
            }
            let steps = (full - s) / 2;
            if steps >= n1 {
                continue;
            }
            candidates.push((steps, n1, n2));
        }
    }
    candidates.sort_unstable();
    for (steps, n1, n2) in candidates {
        let (target, coords) = notched_target(n1, n2, steps);
        if let Some(map) = find_embedding(g, comp, &target) {
            let at = coords.into_iter().zip(map).collect();
            return Some(NotchedShape { n1, n2, steps, at });
        }
    }
    None
}

/// Component shapes accepted by the ladder peeler: ladders `P_m x P_2`,
/// ladders minus one corner, and paths.
#[derive(Debug, Clone)]
pub enum LadderShape {
    Path(Vec<usize>),
    Ladder(Grid2dShape),
    LadderMinusCorner { m: usize, map: Vec<usize> },
}

/// The `m x 2` ladder minus its `(m, 2)` corner. Target ids follow the
/// column-major labelling of the full ladder with the corner dropped, so
/// `2(a - 1) + (b - 1)` indexes vertex `(a, b)` for `a < m` and the last
/// id is `(m, 1)`.
fn ladder_minus_corner_target(m: usize) -> Graph {
    let idx = |a: usize, b: usize| -> Option<usize> {
        if a == m && b == 2 {
            None
        } else {
            Some(2 * (a - 1) + (b - 1))
        }
    };
    let mut edges = Vec::new();
    for a in 1..=m {
        for b in 1..=2 {
            let Some(i) = idx(a, b) else { continue };
            if let Some(j) = (a < m).then(|| idx(a + 1, b)).flatten() {
                edges.push((i, j));
            }
            if let Some(j) = (b < 2).then(|| idx(a, b + 1)).flatten() {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(2 * m - 1, &edges).expect("simple by construction")
}

/// Recognises the ladder-family shape of a component, if any.
pub fn as_ladder_family(g: &Graph, comp: &[usize]) -> Option<LadderShape> {
    if let Some(p) = path_order(g, comp) {
        return Some(LadderShape::Path(p));
    }
    let s = comp.len();
    if s % 2 == 0 {
        let spec = GridSpec::new(vec![s / 2, 2]).expect("small dims");
        if let Some(map) = find_embedding(g, comp, &spec.build()) {
            return Some(LadderShape::Ladder(Grid2dShape { n1: s / 2, n2: 2, at: map }));
        }
    } else {
        let m = (s + 1) / 2;
        if m >= 3 {
            let target = ladder_minus_corner_target(m);
            if let Some(map) = find_embedding(g, comp, &target) {
                return Some(LadderShape::LadderMinusCorner { m, map });
            }
        }
    }
    None
}

/// A slab embedding: `P_{n1} x P_{n2} x P_2` with the doubled factor last.
#[derive(Debug, Clone)]
pub struct SlabShape {
    pub n1: usize,
    pub n2: usize,
    at: Vec<usize>,
}

impl SlabShape {
    /// Host vertex at 1-based `(a, b, layer)`, layer in `{1, 2}`.
    pub fn host(&self, a: usize, b: usize, layer: usize) -> usize {
        self.at[((a - 1) * self.n2 + (b - 1)) * 2 + (layer - 1)]
    }
}

/// Recognises `P_{n1} x P_{n2} x P_2` with `n1 >= n2 >= 2`.
pub fn as_slab(g: &Graph, comp: &[usize]) -> Option<SlabShape> {
    let s = comp.len();
    if s % 2 != 0 {
        return None;
    }
    let flat = s / 2;
    let mut shapes = Vec::new();
    for n2 in 2..=flat {
        if flat % n2 == 0 && flat / n2 >= n2 {
            shapes.push((flat / n2, n2));
        }
    }
    shapes.sort_unstable();
    shapes.reverse();
    for (n1, n2) in shapes {
        let spec = GridSpec::new(vec![n1, n2, 2]).expect("small dims");
        if let Some(map) = find_embedding(g, comp, &spec.build()) {
            return Some(SlabShape { n1, n2, at: map });
        }
    }
    None
}
