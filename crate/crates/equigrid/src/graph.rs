//! Simple undirected graphs with sorted adjacency lists, plus the small
//! structural toolbox the rest of the crate leans on: components, bipartite
//! test, acyclicity, degeneracy orders, and simple-cycle enumeration.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// An undirected simple graph on vertices `0..n`.
///
/// Adjacency lists are kept sorted, which makes neighbourhood scans
/// deterministic everywhere tie-breaking matters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects loops, duplicate edges, and
    /// endpoints outside `0..n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::BadGraph(format!("edge ({u},{v}) out of range for n={n}")));
            }
            if u == v {
                return Err(Error::BadGraph(format!("loop at vertex {u}")));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for (v, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::BadGraph(format!("duplicate edge at vertex {v}")));
            }
        }
        Ok(Graph { adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as sorted `(min, max)` pairs, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.m());
        for u in 0..self.n() {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Connected components, each sorted ascending, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            stack.push(s);
            let mut comp = Vec::new();
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// The subgraph induced by `vertices`, along with the map from new ids
    /// back to the original ones (`back[new] = old`).
    pub fn induced(&self, vertices: &[usize]) -> (Graph, Vec<usize>) {
        let mut back: Vec<usize> = vertices.to_vec();
        back.sort_unstable();
        back.dedup();
        let mut fwd = vec![usize::MAX; self.n()];
        for (i, &v) in back.iter().enumerate() {
            fwd[v] = i;
        }
        let mut adj = vec![Vec::new(); back.len()];
        for (i, &v) in back.iter().enumerate() {
            for &w in &self.adj[v] {
                if fwd[w] != usize::MAX {
                    adj[i].push(fwd[w]);
                }
            }
        }
        (Graph { adj }, back)
    }

    /// Whether the subgraph induced by `subset` is a forest (union-find over
    /// the induced edges).
    pub fn is_acyclic(&self, subset: &[usize]) -> bool {
        let mut inside = vec![false; self.n()];
        for &v in subset {
            inside[v] = true;
        }
        let mut dsu = DisjointSets::new(self.n());
        for &v in subset {
            for &w in &self.adj[v] {
                if w < v && inside[w] && !dsu.union(v, w) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Two-colours the graph if possible; side\[v\] in {0,1}.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        let n = self.n();
        let mut side = vec![u8::MAX; n];
        let mut queue = std::collections::VecDeque::new();
        for s in 0..n {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            queue.push_back(s);
            while let Some(u) = queue.pop_front() {
                for &w in &self.adj[u] {
                    if side[w] == u8::MAX {
                        side[w] = 1 - side[u];
                        queue.push_back(w);
                    } else if side[w] == side[u] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }

    /// Degeneracy of the graph together with a matching order: in the
    /// returned order every vertex has at most `degeneracy` neighbours among
    /// the vertices preceding it. Computed by repeated minimum-degree peeling
    /// (lowest id on ties) and reversing the peel sequence.
    pub fn degeneracy_order(&self) -> (usize, Vec<usize>) {
        let n = self.n();
        let mut deg: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut removed = vec![false; n];
        let mut peel = Vec::with_capacity(n);
        let mut degeneracy = 0;
        for _ in 0..n {
            let v = (0..n)
                .filter(|&v| !removed[v])
                .min_by_key(|&v| (deg[v], v))
                .expect("vertices remain");
            degeneracy = degeneracy.max(deg[v]);
            removed[v] = true;
            peel.push(v);
            for &w in &self.adj[v] {
                if !removed[w] {
                    deg[w] -= 1;
                }
            }
        }
        peel.reverse();
        (degeneracy, peel)
    }

    /// Enumerates the vertex set of every simple cycle exactly once.
    ///
    /// Each cycle is reported through its canonical representative: the walk
    /// starting at the cycle's smallest vertex whose second vertex is smaller
    /// than its last. Guarded by a vertex cap because cycle counts explode;
    /// use [`crate::covering::verify_cover`] for covering questions on larger
    /// graphs, which prunes instead of enumerating.
    pub fn enumerate_cycles(&self, cap: usize) -> Result<Vec<Vec<usize>>> {
        if self.n() > cap {
            return Err(Error::CapExceeded { n: self.n(), cap });
        }
        let mut out = Vec::new();
        self.for_each_cycle(
            |_, _| false,
            |cycle| {
                let mut c = cycle.to_vec();
                c.sort_unstable();
                out.push(c);
                true
            },
        );
        Ok(out)
    }

    /// Core cycle search shared by full enumeration and pruned covering
    /// checks. Explores simple paths from each root in increasing order,
    /// restricted to vertices larger than the root; a path is abandoned as
    /// soon as `prune(path, next)` answers true for the vertex about to be
    /// appended. `on_cycle` receives the cycle as a path (root first) and
    /// returns false to stop the whole search.
    pub(crate) fn for_each_cycle(
        &self,
        prune: impl Fn(&[usize], usize) -> bool,
        mut on_cycle: impl FnMut(&[usize]) -> bool,
    ) {
        let n = self.n();
        let mut on_path = vec![false; n];
        let mut path: Vec<usize> = Vec::new();
        // Frames hold (vertex, next neighbour index to try).
        let mut frames: Vec<(usize, usize)> = Vec::new();
        for root in 0..n {
            path.push(root);
            on_path[root] = true;
            frames.push((root, 0));
            while let Some(top) = frames.last_mut() {
                let u = top.0;
                if top.1 >= self.adj[u].len() {
                    frames.pop();
                    let done = path.pop().expect("path tracks frames");
                    on_path[done] = false;
                    continue;
                }
                let w = self.adj[u][top.1];
                top.1 += 1;
                if w == root {
                    if path.len() >= 3 && path[1] < *path.last().unwrap() && !on_cycle(&path) {
                        return;
                    }
                    continue;
                }
                if w < root || on_path[w] || prune(&path, w) {
                    continue;
                }
                on_path[w] = true;
                path.push(w);
                frames.push((w, 0));
            }
        }
    }
}

/// Union-find with union by rank; `union` returns false when both vertices
/// were already in the same set.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n).collect(), rank: vec![0; n] }
    }

    pub fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Union-find without path compression whose unions can be rolled back,
/// for backtracking searches.
#[derive(Debug, Clone)]
pub struct RollbackDsu {
    parent: Vec<usize>,
    rank: Vec<u32>,
    log: Vec<(usize, u32)>,
}

impl RollbackDsu {
    pub fn new(n: usize) -> Self {
        RollbackDsu { parent: (0..n).collect(), rank: vec![0; n], log: Vec::new() }
    }

    pub fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    /// Returns false (and records nothing) if already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.rank[ra] < self.rank[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.log.push((rb, self.rank[ra]));
        self.parent[rb] = ra;
        if self.rank[ra] == self.rank[rb] {
            self.rank[ra] += 1;
        }
        true
    }

    /// Number of unions performed so far; pass it back to `rollback_to`.
    pub fn mark(&self) -> usize {
        self.log.len()
    }

    pub fn rollback_to(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (child, old_rank) = self.log.pop().unwrap();
            let root = self.find(child);
            self.rank[root] = old_rank;
            self.parent[child] = child;
        }
    }
}

/// Serde shape shared by files and the command line: `{"n": .., "edges": [[u,v], ..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphData {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl From<&Graph> for GraphData {
    fn from(g: &Graph) -> Self {
        GraphData { n: g.n(), edges: g.edges() }
    }
}

impl TryFrom<GraphData> for Graph {
    type Error = Error;
    fn try_from(d: GraphData) -> Result<Graph> {
        Graph::from_edges(d.n, &d.edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, &(1..n).map(|v| (v - 1, v)).collect::<Vec<_>>()).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        let mut e: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        e.push((n - 1, 0));
        Graph::from_edges(n, &e).unwrap()
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn components_sorted_by_smallest_vertex() {
        let g = Graph::from_edges(6, &[(3, 4), (0, 5)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 5], vec![1], vec![2], vec![3, 4]]);
    }

    #[test]
    fn acyclicity_matches_cycle_enumeration_on_small_graphs() {
        // Independent brute-force check of is_acyclic against the enumerator
        // on every graph in a small deterministic family.
        let cases: Vec<Graph> = vec![
            path(1),
            path(5),
            cycle(4),
            cycle(5),
            Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4)]).unwrap(),
            Graph::from_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (4, 5), (5, 6), (6, 4)])
                .unwrap(),
        ];
        for g in cases {
            let all: Vec<usize> = (0..g.n()).collect();
            let cycles = g.enumerate_cycles(12).unwrap();
            assert_eq!(g.is_acyclic(&all), cycles.is_empty());
        }
    }

    #[test]
    fn cycle_enumeration_counts() {
        assert_eq!(path(4).enumerate_cycles(40).unwrap().len(), 0);
        assert_eq!(cycle(6).enumerate_cycles(40).unwrap().len(), 1);
        // K4: four triangles plus three 4-cycles.
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4.enumerate_cycles(40).unwrap().len(), 7);
    }

    #[test]
    fn cycle_cap_is_enforced() {
        let g = path(50);
        assert_eq!(g.enumerate_cycles(40).unwrap_err(), Error::CapExceeded { n: 50, cap: 40 });
    }

    #[test]
    fn degeneracy_of_paths_and_cycles() {
        let (d, order) = path(5).degeneracy_order();
        assert_eq!(d, 1);
        assert_eq!(order.len(), 5);
        let (d, _) = cycle(8).degeneracy_order();
        assert_eq!(d, 2);
    }

    #[test]
    fn degeneracy_order_bounds_back_degree() {
        let g = Graph::from_edges(
            6,
            &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4), (4, 5), (3, 5)],
        )
        .unwrap();
        let (d, order) = g.degeneracy_order();
        let mut pos = vec![0; g.n()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        for (i, &v) in order.iter().enumerate() {
            let back = g.neighbours(v).iter().filter(|&&w| pos[w] < i).count();
            assert!(back <= d);
        }
    }

    #[test]
    fn bipartite_detection() {
        assert!(cycle(6).is_bipartite());
        assert!(!cycle(5).is_bipartite());
        assert!(path(7).is_bipartite());
    }

    #[test]
    fn rollback_dsu_restores_state() {
        let mut dsu = RollbackDsu::new(5);
        assert!(dsu.union(0, 1));
        let mark = dsu.mark();
        assert!(dsu.union(1, 2));
        assert!(dsu.union(3, 4));
        assert_eq!(dsu.find(0), dsu.find(2));
        dsu.rollback_to(mark);
        assert_ne!(dsu.find(0), dsu.find(2));
        assert_ne!(dsu.find(3), dsu.find(4));
        assert_eq!(dsu.find(0), dsu.find(1));
    }
}
